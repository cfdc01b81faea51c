#include "rmrw/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "rmrw/parallel.hpp"

namespace rmrw {

double tail_radius(int d, double theta0_norm, double beta, double eps, double C) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  if (!(theta0_norm >= 0.0)) throw std::invalid_argument("theta0_norm must be >= 0");
  if (!(C > 0.0)) throw std::invalid_argument("C must be > 0");
  return C * (1.0 + theta0_norm + std::sqrt(d + std::log(1.0 / eps)) / beta);
}

ReferenceDensity build_reference(const PowerPosterior& pp, std::vector<Axis> axes, bool population,
                                 int nodes) {
  const int d = pp.dim();
  if (d > 2) throw std::invalid_argument("reference densities are limited to d <= 2");
  if (static_cast<int>(axes.size()) != d) throw std::invalid_argument("grid dimension must equal d");
  if (!population && pp.n() == 0) throw std::invalid_argument("empirical reference needs data");
  const double R = tail_radius(d, pp.spec().theta0.norm(), pp.beta(), 0.001);
  for (const auto& a : axes) {
    if (a.lo > -R || a.hi < R) {
      throw std::invalid_argument("grid must cover [-R, R] with R = " + std::to_string(R));
    }
  }
  return GridDensity::from_log_function(std::move(axes), [&](const Vector& c) {
    return population ? -population_potential(pp, c, nodes) : -empirical_potential(pp, c);
  });
}

double tv_distance(const GridDensity& p, const GridDensity& q) {
  if (p.cells() != q.cells()) throw std::invalid_argument("tv_distance needs identical grids");
  double acc = 0.0;
  for (std::size_t k = 0; k < p.cells(); ++k) acc += std::abs(p.mass()[k] - q.mass()[k]);
  return std::min(1.0, 0.5 * acc);
}

namespace {

long cell_index(const GridDensity& ref, const double* x) {
  const int i = ref.axis(0).cell_of(x[0]);
  if (i < 0) return -1;
  if (ref.dim() == 1) return i;
  const int j = ref.axis(1).cell_of(x[1]);
  if (j < 0) return -1;
  return static_cast<long>(ref.index(i, j));
}

int post_burn_rows(const Dataset& states, int burn_in) {
  if (burn_in < 0) throw std::invalid_argument("burn_in must be >= 0");
  const int rows = static_cast<int>(states.rows()) - burn_in;
  if (rows <= 0) throw std::invalid_argument("no states after burn-in");
  return rows;
}

}  // namespace

std::vector<double> grid_counts(const Dataset& states, const GridDensity& ref, int burn_in) {
  if (states.cols() != ref.dim()) throw std::invalid_argument("state dimension must match the grid");
  post_burn_rows(states, burn_in);
  std::vector<double> counts(ref.cells() + 1, 0.0);
  for (Eigen::Index t = burn_in; t < states.rows(); ++t) {
    const long c = cell_index(ref, states.row(t).data());
    counts[c < 0 ? ref.cells() : static_cast<std::size_t>(c)] += 1.0;
  }
  return counts;
}

namespace {

double tv_from_counts(const std::vector<double>& counts, const GridDensity& ref) {
  double total = 0.0;
  for (double c : counts) total += c;
  double acc = counts.back() / total;
  for (std::size_t k = 0; k < ref.cells(); ++k) acc += std::abs(counts[k] / total - ref.mass()[k]);
  return std::min(1.0, 0.5 * acc);
}

}  // namespace

double tv_to_reference(const Dataset& states, const ReferenceDensity& ref, int burn_in) {
  return tv_from_counts(grid_counts(states, ref, burn_in), ref);
}

double tv_to_reference(const std::vector<ChainTrace>& traces, const ReferenceDensity& ref, int burn_in) {
  if (traces.empty()) throw std::invalid_argument("no traces");
  std::vector<double> counts(ref.cells() + 1, 0.0);
  for (const auto& tr : traces) {
    const auto c = grid_counts(tr.states, ref, burn_in);
    for (std::size_t k = 0; k < c.size(); ++k) counts[k] += c[k];
  }
  return tv_from_counts(counts, ref);
}

double mode_balance(const Dataset& states, const Vector& direction, int burn_in) {
  if (direction.size() != states.cols()) throw std::invalid_argument("direction has the wrong dimension");
  if (!(direction.norm() > 0.0)) throw std::invalid_argument("direction must be nonzero");
  const int rows = post_burn_rows(states, burn_in);
  double pos = 0.0;
  for (Eigen::Index t = burn_in; t < states.rows(); ++t) {
    const double p = states.row(t).dot(direction);
    pos += p > 0.0 ? 1.0 : (p == 0.0 ? 0.5 : 0.0);
  }
  return pos / rows;
}

double tail_mass(const Dataset& states, double R, int burn_in) {
  if (!(R >= 0.0)) throw std::invalid_argument("R must be >= 0");
  const int rows = post_burn_rows(states, burn_in);
  long out = 0;
  for (Eigen::Index t = burn_in; t < states.rows(); ++t) out += states.row(t).norm() > R;
  return static_cast<double>(out) / rows;
}

double tail_mass(const ReferenceDensity& ref, double R) {
  if (!(R >= 0.0)) throw std::invalid_argument("R must be >= 0");
  double acc = 0.0;
  for (std::size_t k = 0; k < ref.cells(); ++k) {
    if (ref.center(k).norm() > R) acc += ref.mass()[k];
  }
  return std::min(1.0, acc);
}

EssResult ess(const Dataset& states, int burn_in) {
  const int N = post_burn_rows(states, burn_in);
  const int d = static_cast<int>(states.cols());
  EssResult res;
  res.ess.resize(d);
  res.degenerate.assign(d, false);
  Eigen::FFT<double> fft;
  for (int c = 0; c < d; ++c) {
    std::vector<double> x(N);
    for (int t = 0; t < N; ++t) x[t] = states(burn_in + t, c);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= N;
    double var = 0.0;
    for (double& v : x) {
      v -= mean;
      var += v * v;
    }
    var /= N;
    if (!(var > 0.0) || var <= 1e-28 * (1.0 + mean * mean)) {
      res.ess[c] = N;
      res.degenerate[c] = true;
      res.any_degenerate = true;
      continue;
    }
    // Autocovariance through a zero-padded FFT.
    std::size_t L = 1;
    while (L < 2 * static_cast<std::size_t>(N)) L <<= 1;
    std::vector<double> padded(L, 0.0);
    std::copy(x.begin(), x.end(), padded.begin());
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, padded);
    for (auto& z : spec) z = std::norm(z);
    std::vector<double> acov;
    fft.inv(acov, spec);
    const double g0 = acov[0];
    double sum = 0.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (int m = 0; 2 * m + 1 < N; ++m) {
      double pair = (acov[2 * m] + acov[2 * m + 1]) / g0;
      if (!(pair > 0.0)) break;
      pair = std::min(pair, prev_pair);
      prev_pair = pair;
      sum += pair;
    }
    const double tau = std::max(-1.0 + 2.0 * sum, 1.0 / N);
    res.ess[c] = std::min(static_cast<double>(N), N / tau);
  }
  return res;
}

std::vector<int> checkpoint_schedule(int max_steps, double ratio) {
  if (max_steps < 0) throw std::invalid_argument("max_steps must be >= 0");
  if (!(ratio > 1.0)) throw std::invalid_argument("ratio must be > 1");
  std::vector<int> out{0};
  double t = 1.0;
  while (t <= max_steps) {
    const int v = static_cast<int>(std::ceil(t - 1e-9));
    if (v > out.back()) out.push_back(v);
    t = std::max(t * ratio, static_cast<double>(out.back() + 1));
  }
  return out;
}

GridDensity coarsen(const GridDensity& gd, int factor) {
  if (factor < 1) throw std::invalid_argument("coarsen factor must be >= 1");
  if (factor == 1) return gd;
  std::vector<Axis> axes;
  for (const auto& a : gd.axes()) {
    if (a.m % factor != 0) throw std::invalid_argument("coarsen factor must divide the cell count");
    axes.emplace_back(a.lo, a.hi, a.m / factor);
  }
  std::size_t total = 1;
  for (const auto& a : axes) total *= static_cast<std::size_t>(a.m);
  std::vector<double> acc(total, 0.0);
  const int m1 = gd.dim() == 2 ? gd.axis(1).m : 1;
  const int cm1 = gd.dim() == 2 ? axes[1].m : 1;
  for (int i = 0; i < gd.axis(0).m; ++i) {
    for (int j = 0; j < m1; ++j) {
      acc[static_cast<std::size_t>(i / factor) * cm1 + j / factor] += gd.mass()[gd.index(i, j)];
    }
  }
  std::vector<double> lm(total);
  for (std::size_t k = 0; k < total; ++k) {
    lm[k] = acc[k] > 0.0 ? std::log(acc[k]) : -std::numeric_limits<double>::infinity();
  }
  return GridDensity::from_logmass(std::move(axes), std::move(lm));
}

MixingCurve mixing_curve(const PowerPosterior& pp, const SamplerConfig& config,
                         const ReferenceDensity& ref, const MixingOptions& opt) {
  const int d = pp.dim();
  if (ref.dim() != d) throw std::invalid_argument("reference dimension must equal d");
  if (opt.chains < 1) throw std::invalid_argument("chains must be >= 1");
  SamplerConfig cfg = config;
  cfg.steps = std::max(1, opt.max_steps);
  cfg.validate(d);
  const GridDensity coarse = coarsen(ref, opt.coarsen);

  struct ChainState {
    Vector theta;
    double u = 0.0;
    Rng rng;
  };
  std::vector<ChainState> chains(opt.chains);
  for (int k = 0; k < opt.chains; ++k) {
    chains[k].rng = make_rng(cfg.seed + k, Stream::chain);
    chains[k].theta = initial_state(cfg, d, chains[k].rng);
    chains[k].u = empirical_potential(pp, chains[k].theta);
  }

  MixingCurve curve;
  curve.chains = opt.chains;
  curve.coarsen = opt.coarsen;
  Dataset snapshot(opt.chains, d);
  int now = 0;
  for (int t : checkpoint_schedule(opt.max_steps)) {
    const int advance = t - now;
    parallel_for(chains.size(), opt.jobs, [&](std::size_t k) {
      auto& c = chains[k];
      for (int s = 0; s < advance; ++s) {
        StepResult r = mh_step(pp, c.theta, c.u, cfg.eta, cfg.algorithm, c.rng);
        c.theta = std::move(r.next);
        c.u = r.potential;
      }
    });
    now = t;
    for (int k = 0; k < opt.chains; ++k) snapshot.row(k) = chains[k].theta.transpose();
    const double tv = tv_to_reference(snapshot, coarse, 0);
    curve.checkpoints.push_back(t);
    curve.tv.push_back(tv);
    if (opt.stop_below > 0.0 && tv < opt.stop_below) {
      curve.stopped_early = true;
      break;
    }
  }
  return curve;
}

std::optional<int> first_below(const MixingCurve& curve, double eps) {
  for (std::size_t k = 0; k < curve.tv.size(); ++k) {
    if (curve.tv[k] < eps) return curve.checkpoints[k];
  }
  return std::nullopt;
}

std::optional<int> mixing_time_estimate(const PowerPosterior& pp, const SamplerConfig& config,
                                        const ReferenceDensity& ref, double eps,
                                        const MixingOptions& opt) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (opt.chains < 50) {
    throw std::invalid_argument("mixing_time_estimate needs at least 50 chains");
  }
  MixingOptions o = opt;
  o.stop_below = eps;
  return first_below(mixing_curve(pp, config, ref, o), eps);
}

BarSeries projection_histogram(const Dataset& states, const Vector& direction, int burn_in,
                               double width) {
  if (!(width > 0.0)) throw std::invalid_argument("bin width must be > 0");
  if (direction.size() != states.cols()) throw std::invalid_argument("direction has the wrong dimension");
  post_burn_rows(states, burn_in);
  std::vector<long> bin;
  bin.reserve(states.rows() - burn_in);
  for (Eigen::Index t = burn_in; t < states.rows(); ++t) {
    bin.push_back(static_cast<long>(std::floor(states.row(t).dot(direction) / width)));
  }
  const auto [lo_it, hi_it] = std::minmax_element(bin.begin(), bin.end());
  const long lo = *lo_it - 1, hi = *hi_it + 1;
  BarSeries h;
  h.counts.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
  for (long b : bin) h.counts[static_cast<std::size_t>(b - lo)] += 1.0;
  for (long k = lo; k <= hi + 1; ++k) h.edges.push_back(static_cast<double>(k) * width);
  return h;
}

std::vector<double> moving_average(const std::vector<double>& counts, int window) {
  if (window < 1 || window % 2 == 0) throw std::invalid_argument("window must be a positive odd number");
  const int n = static_cast<int>(counts.size());
  const int half = window / 2;
  std::vector<double> s(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = i - half; k <= i + half; ++k) {
      if (k >= 0 && k < n) acc += counts[k];
    }
    s[i] = acc / window;
  }
  return s;
}

ModeSummary detect_modes(const BarSeries& hist, int window, double rel_floor) {
  const std::vector<double> s = moving_average(hist.counts, window);
  const int n = static_cast<int>(s.size());
  ModeSummary out;
  if (n == 0) return out;
  const double top = *std::max_element(s.begin(), s.end());
  if (!(top > 0.0)) return out;
  int i = 0;
  while (i < n) {
    int r = i;
    while (r + 1 < n && s[r + 1] == s[i]) ++r;
    const bool left = i == 0 || s[i - 1] < s[i];
    const bool right = r == n - 1 || s[r + 1] < s[r];
    if (left && right && s[i] > 0.0 && s[i] >= rel_floor * top) {
      const double c_lo = 0.5 * (hist.edges[i] + hist.edges[i + 1]);
      const double c_hi = 0.5 * (hist.edges[r] + hist.edges[r + 1]);
      out.centers.push_back(0.5 * (c_lo + c_hi));
      out.heights.push_back(s[i]);
    }
    i = r + 1;
  }
  return out;
}

nlohmann::json to_json(const DiagnosticsReport& r) {
  nlohmann::json j;
  j["tv_to_reference"] = r.tv_to_reference ? nlohmann::json(*r.tv_to_reference) : nlohmann::json();
  j["mode_balance"] = r.mode_balance;
  j["ess_per_coordinate"] = std::vector<double>(r.ess_per_coordinate.data(),
                                                r.ess_per_coordinate.data() + r.ess_per_coordinate.size());
  j["ess_degenerate"] = r.ess_degenerate;
  j["tail_radius"] = r.tail_radius;
  j["tail_mass_outside"] = r.tail_mass;
  j["mixing_time_estimate"] = r.mixing_time ? nlohmann::json(*r.mixing_time) : nlohmann::json();
  j["mixing_eps"] = r.mixing_eps;
  j["acceptance_rate"] = r.acceptance_rate;
  return j;
}

}  // namespace rmrw
