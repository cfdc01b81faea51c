#include "rmrw/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rmrw/parallel.hpp"
#include "rmrw/quadrature.hpp"

namespace rmrw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json vec_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

double log_sum_exp(const std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t index) {
  Rng r = make_rng(seed, Stream::probe, index);
  return r();
}

}  // namespace

nlohmann::json to_json(const CheckReport& r) {
  return {{"check", r.check},     {"seed", r.seed},         {"instances", r.instances},
          {"skipped", r.skipped}, {"worst_margin", r.worst_margin}, {"tol", r.tol},
          {"passed", r.passed},   {"witness", r.witness},   {"details", r.details}};
}

// ---- Poincaré combination ------------------------------------------------

void PoincareCombinationInput::validate() const {
  if (!(C1 > 0.0) || !(C2 > 0.0) || !std::isfinite(C1) || !std::isfinite(C2)) {
    throw std::invalid_argument("C1 and C2 must be finite and > 0");
  }
  if (!(L >= 0.0) || !std::isfinite(L)) throw std::invalid_argument("L must be finite and >= 0");
}

double PoincareCombinationInput::bound() const {
  validate();
  return 2.0 * (C1 + C2 + C1 * C2 * L * L);
}

PoincareCombinationTerms poincare_combination_terms(const GridDensity& joint) {
  if (joint.dim() != 2) throw std::invalid_argument("combination check needs a 2-D grid");
  const int m0 = joint.axis(0).m, m1 = joint.axis(1).m;
  PoincareCombinationTerms t;
  t.input.C1 = poincare_constant(joint.marginal(0));
  std::vector<std::vector<double>> logcond(m0);
  for (int i = 0; i < m0; ++i) {
    double col = 0.0;
    for (int j = 0; j < m1; ++j) col += joint.mass_at(i, j);
    if (!(col > 0.0)) throw std::invalid_argument("conditional undefined: column " + std::to_string(i) + " has no mass");
    const GridDensity cond = joint.conditional(i);
    const double c = poincare_constant(cond);
    if (c > t.input.C2) {
      t.input.C2 = c;
      t.worst_column = i;
    }
    logcond[i] = cond.logmass();
  }
  const double h0 = joint.axis(0).width();
  for (int i = 0; i + 1 < m0; ++i) {
    for (int j = 0; j < m1; ++j) {
      const double a = logcond[i][j], b = logcond[i + 1][j];
      if (std::isfinite(a) && std::isfinite(b)) t.input.L = std::max(t.input.L, std::abs(b - a) / h0);
    }
  }
  t.C_joint = poincare_constant(joint);
  return t;
}

CheckReport check_poincare_combination(const GridDensity& joint) {
  const PoincareCombinationTerms t = poincare_combination_terms(joint);
  CheckReport r;
  r.check = "poincare_combination";
  r.instances = 1;
  const double bound = t.input.bound();
  r.worst_margin = bound - t.C_joint;
  r.details = {{"C1", t.input.C1}, {"C2", t.input.C2}, {"L", t.input.L},
               {"bound", bound},   {"C_joint", t.C_joint}};
  r.witness = {{"worst_conditional_column", t.worst_column}};
  r.finish();
  return r;
}

// ---- One-dimensional isoperimetry -----------------------------------------

double unimodality_margin(const std::vector<double>& mass) {
  if (mass.size() < 2) return 0.0;
  const std::size_t p = static_cast<std::size_t>(std::max_element(mass.begin(), mass.end()) - mass.begin());
  double margin = kInf;
  for (std::size_t i = 0; i + 1 < mass.size(); ++i) {
    const double diff = mass[i + 1] - mass[i];
    margin = std::min(margin, i < p ? diff : -diff);
  }
  return margin;
}

CheckReport check_quasiconcave_isoperimetry(const GridDensity& gd, int partitions, std::uint64_t seed,
                                            bool require_unimodal) {
  if (gd.dim() != 1) throw std::invalid_argument("isoperimetry check needs a 1-D grid");
  if (partitions < 1) throw std::invalid_argument("partitions must be >= 1");
  const auto& mass = gd.mass();
  const double pre = unimodality_margin(mass);
  if (require_unimodal && pre < -1e-12) {
    throw std::invalid_argument("density fails the unimodality pre-check (margin " + std::to_string(pre) + ")");
  }
  const int m = static_cast<int>(mass.size());
  if (m < 3) throw std::invalid_argument("isoperimetry check needs at least 3 cells");
  const double A = gd.axis(0).hi - gd.axis(0).lo;
  const double h = gd.axis(0).width();
  std::vector<double> cum(m + 1, 0.0);
  for (int i = 0; i < m; ++i) cum[i + 1] = cum[i] + mass[i];

  Rng rng = make_rng(seed, Stream::theory);
  std::uniform_int_distribution<int> n_cuts(2, 8), cut_pos(1, m - 1), label(1, 3);
  CheckReport r;
  r.check = "quasiconcave_isoperimetry";
  r.seed = seed;
  r.worst_margin = kInf;
  for (int trial = 0; trial < partitions; ++trial) {
    std::vector<int> cuts;
    const int k = n_cuts(rng);
    for (int c = 0; c < k; ++c) cuts.push_back(cut_pos(rng));
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<int> starts{0};
    for (int c : cuts) starts.push_back(c);
    const int pieces = static_cast<int>(starts.size());
    std::vector<int> labels(pieces);
    for (auto& l : labels) l = label(rng);
    // Guarantee S₁ and S₂ are nonempty.
    if (std::find(labels.begin(), labels.end(), 1) == labels.end()) labels[0] = 1;
    if (std::find(labels.begin(), labels.end(), 2) == labels.end()) labels[pieces - 1] = 2;
    if (std::find(labels.begin(), labels.end(), 1) == labels.end()) continue;

    double ms[4] = {0, 0, 0, 0};
    auto piece_end = [&](int p) { return p + 1 < pieces ? starts[p + 1] : m; };  // exclusive
    for (int p = 0; p < pieces; ++p) ms[labels[p]] += cum[piece_end(p)] - cum[starts[p]];
    double dist = kInf;
    int last1 = -1, last2 = -1;  // exclusive end of the latest S₁ / S₂ piece
    for (int p = 0; p < pieces; ++p) {
      if (labels[p] == 1) {
        if (last2 >= 0) dist = std::min(dist, (starts[p] - last2) * h);
        last1 = piece_end(p);
      } else if (labels[p] == 2) {
        if (last1 >= 0) dist = std::min(dist, (starts[p] - last1) * h);
        last2 = piece_end(p);
      }
    }
    const double margin = ms[3] - dist / A * std::min(ms[1], ms[2]);
    ++r.instances;
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.witness = {{"trial", trial}, {"piece_starts", starts}, {"labels", labels},
                   {"mass_S1", ms[1]}, {"mass_S2", ms[2]},    {"mass_S3", ms[3]},
                   {"dist", dist}};
    }
  }
  r.details = {{"A", A}, {"cells", m}, {"unimodality_margin", pre}};
  r.finish();
  return r;
}

CheckReport check_cheeger_inequality(const std::vector<GridDensity>& densities) {
  CheckReport r;
  r.check = "cheeger_inequality";
  r.worst_margin = kInf;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < densities.size(); ++k) {
    const double C = poincare_constant(densities[k]);
    const double zeta = cheeger_constant(densities[k]).value;
    const double margin = 4.0 / (zeta * zeta) - C;
    rows.push_back({{"C", C}, {"zeta", zeta}, {"margin", margin}});
    ++r.instances;
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.witness = {{"instance", k}, {"C", C}, {"zeta", zeta}};
    }
  }
  r.details = {{"instances", rows}};
  r.finish();
  return r;
}

CheckReport observe_buser_direction(const std::vector<GridDensity>& densities) {
  CheckReport r;
  r.check = "buser_direction";
  r.worst_margin = kInf;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < densities.size(); ++k) {
    const GridDensity& g = densities[k];
    if (g.dim() != 1) throw std::invalid_argument("Buser check needs 1-D densities");
    const auto& lm = g.logmass();
    const double h = g.axis(0).width();
    double K = 0.0;
    for (std::size_t i = 1; i + 1 < lm.size(); ++i) {
      if (!std::isfinite(lm[i - 1]) || !std::isfinite(lm[i + 1])) continue;
      const double u2 = -(lm[i + 1] - 2.0 * lm[i] + lm[i - 1]) / (h * h);
      K = std::max(K, -u2);
    }
    const double C = poincare_constant(g);
    const double zeta = cheeger_constant(g).value;
    const double margin = 10.0 * (zeta * std::sqrt(K) + zeta * zeta) - 1.0 / C;
    rows.push_back({{"C", C}, {"zeta", zeta}, {"K", K}, {"margin", margin}});
    ++r.instances;
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.witness = {{"instance", k}, {"C", C}, {"zeta", zeta}, {"K", K}};
    }
  }
  r.details = {{"instances", rows}};
  r.finish();
  return r;
}

std::vector<GridDensity> random_densities_1d(int count, int cells, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::theory, 1);
  std::uniform_int_distribution<int> ncomp(1, 3);
  std::uniform_real_distribution<double> mean(-3.0, 3.0), sd(0.3, 1.5), weight(0.2, 1.0);
  std::vector<GridDensity> out;
  for (int k = 0; k < count; ++k) {
    const int c = ncomp(rng);
    std::vector<double> mu(c), s(c), w(c);
    for (int i = 0; i < c; ++i) {
      mu[i] = mean(rng);
      s[i] = sd(rng);
      w[i] = weight(rng);
    }
    out.push_back(GridDensity::from_log_function({Axis(-8.0, 8.0, cells)}, [&](const Vector& x) {
      std::vector<double> terms(c);
      for (int i = 0; i < c; ++i) {
        const double z = (x[0] - mu[i]) / s[i];
        terms[i] = std::log(w[i] / s[i]) - 0.5 * z * z;
      }
      return log_sum_exp(terms);
    }));
  }
  return out;
}

std::vector<GridDensity> random_densities_2d(int count, int cells, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::theory, 2);
  std::uniform_real_distribution<double> scale(0.7, 1.5), rho(-0.4, 0.4), cubic(-0.3, 0.3);
  std::vector<GridDensity> out;
  for (int k = 0; k < count; ++k) {
    const double s1 = scale(rng), s2 = scale(rng), r = rho(rng), c1 = cubic(rng), c2 = cubic(rng);
    const Axis ax(-4.0, 4.0, cells);
    out.push_back(GridDensity::from_log_function({ax, ax}, [=](const Vector& x) {
      const double a = x[0], b = x[1];
      return -0.5 * (a * a / (s1 * s1) + b * b / (s2 * s2)) + r * a * b +
             (c1 * a * a * b + c2 * a * b * b) / 8.0;
    }));
  }
  return out;
}

std::vector<GridDensity> random_unimodal_densities(int count, int cells, double A, std::uint64_t seed) {
  if (!(A > 0.0)) throw std::invalid_argument("A must be > 0");
  Rng rng = make_rng(seed, Stream::theory, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GridDensity> out;
  const Axis ax(0.0, A, cells);
  for (int k = 0; k < count; ++k) {
    const double peak = A * (0.05 + 0.9 * unit(rng));
    const double width = A * (0.05 + 0.5 * unit(rng));
    const double power = 0.5 + 3.0 * unit(rng);
    std::function<double(const Vector&)> f;
    switch (k % 5) {
      case 0:  // triangle
        f = [=](const Vector& x) {
          const double v = x[0] <= peak ? x[0] / peak : (A - x[0]) / (A - peak);
          return std::log(std::max(v, 1e-300));
        };
        break;
      case 1:  // Gaussian bump
        f = [=](const Vector& x) { return -0.5 * std::pow((x[0] - peak) / width, 2.0); };
        break;
      case 2:  // heavy-tailed, quasi-concave but not log-concave
        f = [=](const Vector& x) { return -power * std::log1p(std::pow((x[0] - peak) / width, 2.0)); };
        break;
      case 3:  // asymmetric exponential
        f = [=](const Vector& x) {
          return x[0] <= peak ? -(peak - x[0]) / width : -power * (x[0] - peak) / width;
        };
        break;
      default:  // monotone: maximum at the boundary
        f = [=](const Vector& x) { return -x[0] / width; };
        break;
    }
    out.push_back(GridDensity::from_log_function({ax}, f));
  }
  return out;
}

// ---- Population structure --------------------------------------------------

CheckReport check_structure(const PowerPosterior& pp, const Axis& axis0, const Axis& axis1, int nodes) {
  if (pp.dim() != 2) throw std::invalid_argument("structure check needs d = 2");
  if (axis0.m < 200 || axis1.m < 200) {
    throw std::invalid_argument("structure check needs at least 200 cells per axis");
  }
  if (axis0.lo < 0.0) throw std::invalid_argument("axis 0 must lie in [0, inf)");
  const Vector& t0 = pp.spec().theta0;
  if (t0[1] != 0.0 || t0[0] < 0.0) throw std::invalid_argument("structure check needs theta0 = a0 e1, a0 >= 0");
  const GridDensity gd = GridDensity::from_log_function(
      {axis0, axis1}, [&](const Vector& c) { return -population_potential(pp, c, nodes); });

  CheckReport r;
  r.check = "population_structure";
  r.instances = 1;
  const GridDensity marg = gd.marginal(0);
  const double marginal_margin = unimodality_margin(marg.mass());

  const auto& lm = gd.logmass();
  double logc_margin = kInf;
  nlohmann::json logc_witness;
  for (int i = 0; i < axis0.m; ++i) {
    for (int j = 1; j + 1 < axis1.m; ++j) {
      const double d2 = lm[gd.index(i, j + 1)] - 2.0 * lm[gd.index(i, j)] + lm[gd.index(i, j - 1)];
      if (-d2 < logc_margin) {
        logc_margin = -d2;
        logc_witness = {{"x1", axis0.center(i)}, {"x2", axis1.center(j)}, {"second_difference", d2}};
      }
    }
  }
  constexpr double kMarginalTol = 1e-9;
  constexpr double kLogConcaveTol = 1e-8;
  const bool marg_ok = marginal_margin >= -kMarginalTol;
  const bool logc_ok = logc_margin >= -kLogConcaveTol;
  r.worst_margin = std::min(marginal_margin, logc_margin);
  r.tol = kLogConcaveTol;
  r.passed = marg_ok && logc_ok;
  r.witness = logc_witness;
  r.details = {{"a0", t0[0]},
               {"beta", pp.beta()},
               {"marginal_unimodality_margin", marginal_margin},
               {"marginal_tol", kMarginalTol},
               {"marginal_pass", marg_ok},
               {"conditional_logconcavity_margin", logc_margin},
               {"conditional_tol", kLogConcaveTol},
               {"conditional_pass", logc_ok},
               {"axis0", to_json(axis0)},
               {"axis1", to_json(axis1)}};
  return r;
}

CheckReport check_convex_quasiconcave(const PowerPosterior& pp, const std::vector<Vector>& offsets,
                                      bool minimum_at_a0, double a_max, int a_points) {
  const int d = pp.dim();
  const Vector& t0 = pp.spec().theta0;
  const double a0 = t0.norm();
  if (a0 > 0.0 && std::abs(t0[0] - a0) > 1e-12 * a0) {
    throw std::invalid_argument("convex/quasi-concave check needs theta0 = a0 e1");
  }
  if (a_points < 2 || !(a_max > 0.0)) throw std::invalid_argument("invalid a grid");
  CheckReport r;
  r.check = minimum_at_a0 ? "monotone_about_a0" : "single_sign_change";
  r.worst_margin = kInf;
  Rng rng = make_rng(0, Stream::theory, 4);
  std::normal_distribution<double> normal;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const Vector& z = offsets[k];
    if (z.size() != d || z[0] != 0.0) throw std::invalid_argument("offsets must be orthogonal to e1");
    std::vector<double> a(a_points + 1), g(a_points + 1);
    for (int i = 0; i <= a_points; ++i) {
      a[i] = a_max * i / a_points;
      Vector th = z;
      th[0] = a[i];
      g[i] = population_gradient(pp, th)[0];
    }
    double mono = kInf;
    int where = -1;
    if (minimum_at_a0) {
      for (int i = 0; i <= a_points; ++i) {
        const double m = a[i] <= a0 ? -g[i] : g[i];
        if (m < mono) {
          mono = m;
          where = i;
        }
      }
    } else {
      // Best split p: −g ≥ 0 before p, g ≥ 0 from p on.
      std::vector<double> pre(a_points + 2, kInf), suf(a_points + 2, kInf);
      for (int i = 0; i <= a_points; ++i) pre[i + 1] = std::min(pre[i], -g[i]);
      for (int i = a_points; i >= 0; --i) suf[i] = std::min(suf[i + 1], g[i]);
      mono = -kInf;
      for (int p = 0; p <= a_points + 1; ++p) {
        const double m = std::min(pre[p], suf[p]);
        if (m > mono) {
          mono = m;
          where = std::min(p, a_points);
        }
      }
    }
    // Convexity along a random direction orthogonal to e₁.
    double convex = kInf;
    if (d >= 2) {
      for (double a_fixed : {0.5, 1.0, a0 > 0.0 ? a0 : 1.5, 3.0}) {
        Vector u = Vector::Zero(d);
        for (int c = 1; c < d; ++c) u[c] = normal(rng);
        u /= u.norm();
        const double h = 0.05;
        std::vector<double> vals;
        for (int s = -60; s <= 60; ++s) {
          Vector th = z + (s * h) * u;
          th[0] = a_fixed;
          vals.push_back(population_potential(pp, th));
        }
        for (std::size_t s = 1; s + 1 < vals.size(); ++s) {
          convex = std::min(convex, vals[s + 1] - 2.0 * vals[s] + vals[s - 1]);
        }
      }
    }
    const double margin = std::min(mono, convex);
    rows.push_back({{"offset_norm", z.norm()}, {"monotonicity_margin", mono},
                    {"convexity_margin", d >= 2 ? nlohmann::json(convex) : nlohmann::json()},
                    {"at_a", a[std::max(where, 0)]}});
    ++r.instances;
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.witness = {{"offset", vec_json(z)}, {"a", a[std::max(where, 0)]}};
    }
  }
  r.details = {{"a0", a0}, {"beta", pp.beta()}, {"offsets", rows}};
  r.finish();
  return r;
}

// ---- Exact kernels ---------------------------------------------------------

GridKernel build_rmrw_grid_kernel(const PowerPosterior& pp, double eta, const Axis& axis, Algorithm alg) {
  if (pp.dim() != 1) throw std::invalid_argument("grid kernel needs d = 1");
  const double R = tail_radius(1, pp.spec().theta0.norm(), pp.beta(), 0.001);
  if (axis.lo > -R || axis.hi < R) {
    throw std::invalid_argument("grid must cover [-R, R] with R = " + std::to_string(R));
  }
  const bool population = pp.n() == 0;
  const GridDensity gd = GridDensity::from_log_function({axis}, [&](const Vector& c) {
    return population ? -population_potential(pp, c) : -empirical_potential(pp, c);
  });
  return build_grid_kernel(gd, eta, alg);
}

KernelOverlap kernel_overlap(const PowerPosterior& pp, double eta, double x, double y, int nodes) {
  if (pp.dim() != 1) throw std::invalid_argument("kernel overlap needs d = 1");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  const double sigma = std::sqrt(eta);
  auto U = [&](double z) {
    Vector v(1);
    v[0] = z;
    return population_potential(pp, v, nodes);
  };
  const double ux = U(x), uy = U(y);
  auto q = [&](double c, double z) {
    const double a = (z - c) / sigma, b = (z + c) / sigma;
    return 0.5 * (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
  };
  std::vector<std::pair<double, double>> win;
  for (double c : {x, -x, y, -y}) win.push_back({c - 12.0 * sigma, c + 12.0 * sigma});
  std::sort(win.begin(), win.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& w : win) {
    if (!merged.empty() && w.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, w.second);
    } else {
      merged.push_back(w);
    }
  }
  const GaussRule& gl = gauss_legendre(16);
  double ax = 0.0, ay = 0.0, diff_x = 0.0, diff_pair = 0.0;
  for (const auto& [lo, hi] : merged) {
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / (0.5 * sigma))));
    const double pw = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * pw;
      for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
        const double z = mid + 0.5 * pw * gl.nodes[k];
        const double w = 0.5 * pw * gl.weights[k];
        const double uz = U(z);
        const double qx = q(x, z), qy = q(y, z);
        const double alx = std::min(1.0, std::exp(ux - uz));
        const double aly = std::min(1.0, std::exp(uy - uz));
        ax += w * alx * qx;
        ay += w * aly * qy;
        diff_x += w * (1.0 - alx) * qx;
        diff_pair += w * std::abs(alx * qx - aly * qy);
      }
    }
  }
  KernelOverlap o;
  o.rejection_x = std::clamp(1.0 - ax, 0.0, 1.0);
  o.rejection_y = std::clamp(1.0 - ay, 0.0, 1.0);
  o.tv_proposal = std::min(1.0, 0.5 * (diff_x + o.rejection_x));
  o.tv_pair = x == y ? 0.0 : std::min(1.0, 0.5 * (diff_pair + o.rejection_x + o.rejection_y));
  o.kl_gaussian = (x - y) * (x - y) / (2.0 * eta);
  o.pinsker = std::sqrt(0.5 * o.kl_gaussian);
  return o;
}

CheckReport check_kernel_overlap(const PowerPosterior& pp, double eta, double x, double y, double A,
                                 OverlapCondition cond) {
  CheckReport r;
  r.check = "kernel_overlap";
  const double eta_max = 1.0 / (400.0 * std::pow(2.0 * A + 1.0, 2.0));
  const double r0 = std::sqrt(eta) / 10.0;
  const double sep = cond == OverlapCondition::both ? std::max(std::abs(x - y), std::abs(x + y))
                                                    : std::min(std::abs(x - y), std::abs(x + y));
  const bool ok = eta > 0.0 && eta <= eta_max && std::abs(x) <= A && std::abs(y) <= A && sep <= r0;
  r.details = {{"eta", eta}, {"eta_max", eta_max}, {"x", x}, {"y", y}, {"A", A},
               {"condition", cond == OverlapCondition::both ? "both" : "either"}};
  if (!ok) {
    r.skipped = 1;
    r.passed = true;
    r.details["skipped"] = true;
    return r;
  }
  const KernelOverlap o = kernel_overlap(pp, eta, x, y);
  r.instances = 1;
  r.worst_margin = std::min(0.1 - o.tv_proposal, 0.5 - o.tv_pair);
  r.details["tv_proposal"] = o.tv_proposal;
  r.details["tv_pair"] = o.tv_pair;
  r.details["rejection_x"] = o.rejection_x;
  r.details["kl_gaussian"] = o.kl_gaussian;
  r.details["pinsker"] = o.pinsker;
  r.witness = {{"x", x}, {"y", y}};
  r.finish();
  return r;
}

CheckReport kernel_overlap_sweep(const PowerPosterior& pp, double eta, double A, int pairs,
                                 std::uint64_t seed, OverlapCondition cond) {
  Rng rng = make_rng(seed, Stream::theory, 5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r0 = std::sqrt(eta) / 10.0;
  CheckReport r;
  r.check = "kernel_overlap";
  r.seed = seed;
  r.worst_margin = kInf;
  double max_tv_prop = 0.0, max_tv_pair = 0.0;
  for (int k = 0; k < pairs; ++k) {
    double x, y;
    if (cond == OverlapCondition::both) {
      x = r0 * (2.0 * unit(rng) - 1.0);
      const double room = r0 - std::abs(x);
      y = room * (2.0 * unit(rng) - 1.0);
    } else {
      do {
        x = A * (2.0 * unit(rng) - 1.0);
        const double sign = unit(rng) < 0.5 ? 1.0 : -1.0;
        y = sign * x + r0 * (2.0 * unit(rng) - 1.0);
      } while (std::abs(y) > A);
    }
    const CheckReport one = check_kernel_overlap(pp, eta, x, y, A, cond);
    r.skipped += one.skipped;
    if (one.instances == 0) continue;
    ++r.instances;
    max_tv_prop = std::max(max_tv_prop, one.details["tv_proposal"].get<double>());
    max_tv_pair = std::max(max_tv_pair, one.details["tv_pair"].get<double>());
    if (one.worst_margin < r.worst_margin) {
      r.worst_margin = one.worst_margin;
      r.witness = one.witness;
    }
  }
  r.details = {{"eta", eta}, {"A", A}, {"max_tv_proposal", max_tv_prop}, {"max_tv_pair", max_tv_pair},
               {"condition", cond == OverlapCondition::both ? "both" : "either"}};
  r.finish();
  return r;
}

// ---- Empirical process -----------------------------------------------------

std::vector<Vector> theta_grid(int d, double A, double M, int points) {
  if (d < 1 || d > 3) throw std::invalid_argument("theta grid supports d <= 3");
  if (points < 2) throw std::invalid_argument("theta grid needs >= 2 points per axis");
  auto node = [&](double half, int i) { return -half + 2.0 * half * i / (points - 1); };
  std::vector<Vector> out;
  for (int i = 0; i < points; ++i) {
    if (d == 1) {
      out.push_back(Vector::Constant(1, node(A, i)));
      continue;
    }
    for (int j = 0; j < points; ++j) {
      if (d == 2) {
        Vector v(2);
        v << node(A, i), node(M, j);
        out.push_back(v);
        continue;
      }
      for (int k = 0; k < points; ++k) {
        const double b = node(M, j), c = node(M, k);
        if (b * b + c * c > M * M * (1.0 + 1e-12)) continue;
        Vector v(3);
        v << node(A, i), b, c;
        out.push_back(v);
      }
    }
  }
  return out;
}

double sup_deviation(const Dataset& data, const MixtureSpec& spec, const std::vector<Vector>& grid, int nodes) {
  if (data.rows() == 0) throw std::invalid_argument("empty dataset");
  if (data.cols() != spec.dim()) throw std::invalid_argument("data dimension mismatch");
  const double n = static_cast<double>(data.rows());
  const double quad = data.rowwise().squaredNorm().sum() / n;
  const double base = -0.5 * (quad - (spec.dim() + spec.theta0.squaredNorm()));
  double best = 0.0;
  for (const Vector& th : grid) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) acc += logcosh(data.row(i).dot(th.transpose()));
    const double pop = gaussian_logcosh_moments(th.dot(spec.theta0), th.norm(), nodes).logcosh;
    best = std::max(best, std::abs(base + acc / n - pop));
  }
  return best;
}

namespace {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t k = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < k; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace

EmpiricalProcessResult empirical_process_run(const EmpiricalProcessConfig& cfg) {
  cfg.spec.validate();
  if (cfg.n_list.size() < 2) throw std::invalid_argument("n_list needs at least two sizes");
  if (cfg.reps < 1) throw std::invalid_argument("reps must be >= 1");
  const std::vector<Vector> grid = theta_grid(cfg.spec.dim(), cfg.A, cfg.M, cfg.grid_points);
  const int K = static_cast<int>(cfg.n_list.size());
  EmpiricalProcessResult res;
  res.n = cfg.n_list;
  res.deviations = Matrix::Zero(cfg.reps, K);
  parallel_for(static_cast<std::size_t>(cfg.reps) * K, cfg.jobs, [&](std::size_t idx) {
    const int r = static_cast<int>(idx / K), k = static_cast<int>(idx % K);
    const Dataset data = sample_data(cfg.spec, std::nullopt, cfg.n_list[k], derived_seed(cfg.seed, idx));
    res.deviations(r, k) = sup_deviation(data, cfg.spec, grid);
  });
  std::vector<double> nn;
  for (int k = 0; k < K; ++k) {
    res.mean_deviation.push_back(res.deviations.col(k).mean());
    nn.push_back(cfg.n_list[k]);
  }
  for (int k = 0; k + 1 < K; ++k) res.ratios.push_back(res.mean_deviation[k + 1] / res.mean_deviation[k]);
  res.slope = loglog_slope(nn, res.mean_deviation);
  return res;
}

CheckReport empirical_process_sweep(const EmpiricalProcessConfig& cfg) {
  const EmpiricalProcessResult res = empirical_process_run(cfg);
  CheckReport r;
  r.check = "empirical_process_scaling";
  r.seed = cfg.seed;
  r.instances = cfg.reps * static_cast<int>(cfg.n_list.size());
  r.worst_margin = std::min(res.slope + 0.65, -0.35 - res.slope);
  r.details = {{"n", res.n}, {"mean_deviation", res.mean_deviation}, {"ratios", res.ratios},
               {"slope", res.slope}, {"slope_range", {-0.65, -0.35}}, {"reps", cfg.reps},
               {"A", cfg.A}, {"M", cfg.M}, {"grid_points", cfg.grid_points}};
  r.finish();
  return r;
}

ContaminatedProcessResult contaminated_process_run(const EmpiricalProcessConfig& cfg, int n,
                                                   const std::vector<double>& gammas,
                                                   const ContaminationSpec& noise) {
  if (gammas.size() < 3 || gammas.front() != 0.0) {
    throw std::invalid_argument("gammas must start at 0 and have at least 3 values");
  }
  const std::vector<Vector> grid = theta_grid(cfg.spec.dim(), cfg.A, cfg.M, cfg.grid_points);
  const int G = static_cast<int>(gammas.size());
  Matrix dev(cfg.reps, G);
  parallel_for(static_cast<std::size_t>(cfg.reps) * G, cfg.jobs, [&](std::size_t idx) {
    const int r = static_cast<int>(idx / G), g = static_cast<int>(idx % G);
    ContaminationSpec c = noise;
    c.gamma = gammas[g];
    const Dataset data = sample_data(cfg.spec, c, n, derived_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    dev(r, g) = sup_deviation(data, cfg.spec, grid);
  });
  ContaminatedProcessResult res;
  res.gammas = gammas;
  const double base = dev.col(0).mean();
  Matrix X(G, 3);
  Vector y(G);
  for (int g = 0; g < G; ++g) {
    res.extra.push_back(dev.col(g).mean() - base);
    X(g, 0) = 1.0;
    X(g, 1) = gammas[g];
    X(g, 2) = gammas[g] * gammas[g];
    y[g] = res.extra.back();
  }
  const Vector c = X.colPivHouseholderQr().solve(y);
  res.c0 = c[0];
  res.c1 = c[1];
  res.c2 = c[2];
  return res;
}

CheckReport contaminated_process_check(const EmpiricalProcessConfig& cfg, int n,
                                       const std::vector<double>& gammas, const ContaminationSpec& noise) {
  const ContaminatedProcessResult res = contaminated_process_run(cfg, n, gammas, noise);
  const double gmax = *std::max_element(gammas.begin(), gammas.end());
  CheckReport r;
  r.check = "contaminated_process_linearity";
  r.seed = cfg.seed;
  r.instances = cfg.reps * static_cast<int>(gammas.size());
  r.worst_margin = std::min(res.c1, 0.25 * res.c1 - std::abs(res.c2) * gmax);
  r.details = {{"n", n}, {"gammas", res.gammas}, {"extra_deviation", res.extra},
               {"c0", res.c0}, {"c1", res.c1}, {"c2", res.c2}, {"noise", to_json(noise)}};
  r.finish();
  return r;
}

// ---- Dissipativity ---------------------------------------------------------

Vector uniform_in_ball(int d, double radius, Rng& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector v(d);
  double nrm = 0.0;
  do {
    for (int i = 0; i < d; ++i) v[i] = normal(rng);
    nrm = v.norm();
  } while (!(nrm > 0.0));
  return v * (radius * std::pow(unit(rng), 1.0 / d) / nrm);
}

CheckReport check_dissipativity_field(const PowerPosterior& pp, bool empirical, double radius, int samples,
                                      std::uint64_t seed, double slack) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be > 0");
  Rng rng = make_rng(seed, Stream::theory, 6);
  CheckReport r;
  r.check = empirical ? "dissipativity_empirical" : "dissipativity_population";
  r.seed = seed;
  r.worst_margin = kInf;
  for (int k = 0; k < samples; ++k) {
    const Vector th = uniform_in_ball(pp.dim(), radius, rng);
    const double m = dissipativity_margin(pp, th, empirical) + slack;
    ++r.instances;
    if (m < r.worst_margin) {
      r.worst_margin = m;
      r.witness = {{"theta", vec_json(th)}, {"index", k}};
    }
  }
  r.details = {{"radius", radius}, {"samples", samples}, {"slack", slack}, {"beta", pp.beta()},
               {"theta0_norm", pp.spec().theta0.norm()}};
  r.finish();
  return r;
}

int tail_sample_size(int d, double theta0_norm, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const double q = d + theta0_norm * theta0_norm;
  return std::max(1, static_cast<int>(std::ceil(q * std::log(q / delta))));
}

CheckReport dissipativity_replications(const DissipativityReplicationConfig& cfg) {
  cfg.spec.validate();
  const int d = cfg.spec.dim();
  const int n = cfg.n > 0 ? cfg.n : tail_sample_size(d, cfg.spec.theta0.norm(), cfg.delta);
  double slack = 0.0;
  if (cfg.contamination) {
    cfg.contamination->validate(d);
    slack = 2.0 * cfg.beta * cfg.contamination->gamma * d * cfg.contamination->K *
            cfg.contamination->K * std::log(n / cfg.delta);
  }
  std::vector<double> mins(cfg.reps);
  parallel_for(static_cast<std::size_t>(cfg.reps), cfg.jobs, [&](std::size_t r) {
    const Dataset data = sample_data(cfg.spec, cfg.contamination, n, derived_seed(cfg.seed, r));
    const PowerPosterior pp(data, cfg.beta, PriorSpec::uniform(), cfg.spec);
    mins[r] = check_dissipativity_field(pp, true, cfg.radius, cfg.samples, derived_seed(cfg.seed ^ 0x5a5a, r), slack)
                  .worst_margin;
  });
  int pass = 0;
  for (double m : mins) pass += m >= -kCheckTol;
  const double frac = static_cast<double>(pass) / cfg.reps;
  CheckReport rep;
  rep.check = cfg.contamination ? "dissipativity_contaminated" : "dissipativity_empirical";
  rep.seed = cfg.seed;
  rep.instances = cfg.reps;
  rep.worst_margin = frac - cfg.required_fraction;
  rep.tol = 0.0;
  const auto [lo, hi] = std::minmax_element(mins.begin(), mins.end());
  rep.details = {{"n", n}, {"beta", cfg.beta}, {"theta0_norm", cfg.spec.theta0.norm()},
                 {"slack", slack}, {"passing_fraction", frac}, {"required_fraction", cfg.required_fraction},
                 {"min_replication_margin", *lo}, {"max_replication_margin", *hi},
                 {"samples", cfg.samples}, {"radius", cfg.radius}, {"delta", cfg.delta}};
  if (cfg.contamination) rep.details["contamination"] = to_json(*cfg.contamination);
  rep.witness = {{"replication", static_cast<int>(lo - mins.begin())}};
  rep.finish();
  return rep;
}

// ---- Curvature and tails ---------------------------------------------------

CheckReport check_curvature_floor(const PowerPosterior& pp, double radius, int samples, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::theory, 7);
  const double floor = -pp.beta() * pp.spec().theta0.squaredNorm();
  CheckReport r;
  r.check = "curvature_floor";
  r.seed = seed;
  r.worst_margin = kInf;
  for (int k = 0; k < samples; ++k) {
    const Vector th = uniform_in_ball(pp.dim(), radius, rng);
    const Matrix H = population_hessian(pp, th);
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(H, Eigen::EigenvaluesOnly).eigenvalues()[0];
    ++r.instances;
    if (lmin - floor < r.worst_margin) {
      r.worst_margin = lmin - floor;
      r.witness = {{"theta", vec_json(th)}, {"min_eigenvalue", lmin}};
    }
  }
  r.details = {{"floor", floor}, {"radius", radius}, {"samples", samples}, {"beta", pp.beta()},
               {"theta0_norm", pp.spec().theta0.norm()}};
  r.finish();
  return r;
}

CheckReport check_tail_bound(const PowerPosterior& pp, const std::vector<double>& eps_list, double C,
                             int cells) {
  const int d = pp.dim();
  if (d > 2) throw std::invalid_argument("tail check supports d <= 2");
  const double a = pp.spec().theta0.norm();
  double L = tail_radius(d, a, pp.beta(), 0.001, 1.0);
  for (double eps : eps_list) L = std::max(L, tail_radius(d, a, pp.beta(), eps, C));
  L += 2.0;
  const ReferenceDensity ref = build_reference(pp, std::vector<Axis>(d, Axis(-L, L, cells)), pp.n() == 0);
  CheckReport r;
  r.check = "tail_bound";
  r.worst_margin = kInf;
  nlohmann::json rows = nlohmann::json::array();
  for (double eps : eps_list) {
    const double R = tail_radius(d, a, pp.beta(), eps, C);
    const double outside = tail_mass(ref, R);
    rows.push_back({{"eps", eps}, {"radius", R}, {"mass_outside", outside}});
    ++r.instances;
    if (eps - outside < r.worst_margin) {
      r.worst_margin = eps - outside;
      r.witness = {{"eps", eps}, {"radius", R}};
    }
  }
  r.details = {{"d", d}, {"theta0_norm", a}, {"beta", pp.beta()}, {"C", C}, {"rows", rows}};
  r.finish();
  return r;
}

// ---- Cheeger scaling observation ---------------------------------------------

CheckReport observe_cheeger_scaling(const std::vector<double>& a0_list, const std::vector<double>& AM_list,
                                    double beta, int cells) {
  CheckReport r;
  r.check = "cheeger_scaling_observation";
  r.worst_margin = kInf;
  nlohmann::json rows = nlohmann::json::array();
  for (double a0 : a0_list) {
    const PowerPosterior pp = PowerPosterior::population(MixtureSpec::along_first_axis(2, a0), beta);
    for (double A : AM_list) {
      for (double M : AM_list) {
        const GridDensity gd = GridDensity::from_log_function(
            {Axis(0.0, A, cells), Axis(-M, M, cells)},
            [&](const Vector& c) { return -population_potential(pp, c); });
        const double zeta = cheeger_constant(gd).value;
        const double scaled = zeta * std::sqrt(2.0) * std::pow(A, 5.0) * M * M;
        rows.push_back({{"a0", a0}, {"A", A}, {"M", M}, {"zeta_upper", zeta}, {"scaled", scaled}});
        ++r.instances;
        if (scaled < r.worst_margin) {
          r.worst_margin = scaled;
          r.witness = {{"a0", a0}, {"A", A}, {"M", M}};
        }
      }
    }
  }
  r.details = {{"beta", beta}, {"cells", cells}, {"rows", rows}};
  r.finish();
  return r;
}

}  // namespace rmrw
