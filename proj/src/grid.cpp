#include "rmrw/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace rmrw {

Axis::Axis(double lo_, double hi_, int m_) : lo(lo_), hi(hi_), m(m_) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("axis needs finite lo < hi");
  }
  if (m < 1) throw std::invalid_argument("axis needs at least one cell");
}

int Axis::cell_of(double x) const {
  if (!(x >= lo && x <= hi)) return -1;
  const int i = static_cast<int>(std::floor((x - lo) / width()));
  return std::clamp(i, 0, m - 1);
}

nlohmann::json to_json(const Axis& a) { return {{"lo", a.lo}, {"hi", a.hi}, {"m", a.m}}; }

GridDensity GridDensity::from_logmass(std::vector<Axis> axes, std::vector<double> logmass) {
  if (axes.empty() || axes.size() > 2) throw std::invalid_argument("grid must be 1-D or 2-D");
  std::size_t total = 1;
  for (const auto& a : axes) total *= static_cast<std::size_t>(a.m);
  if (logmass.size() != total) throw std::invalid_argument("logmass size does not match the grid");
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : logmass) {
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("logmass must be finite or -inf");
    }
    mx = std::max(mx, v);
  }
  if (!std::isfinite(mx)) throw std::invalid_argument("grid density has no mass");
  double sum = 0.0;
  for (double v : logmass) sum += std::exp(v - mx);
  const double log_z = mx + std::log(sum);
  GridDensity g;
  g.axes_ = std::move(axes);
  g.logmass_.resize(total);
  g.mass_.resize(total);
  for (std::size_t k = 0; k < total; ++k) {
    g.logmass_[k] = logmass[k] - log_z;
    g.mass_[k] = std::exp(g.logmass_[k]);
  }
  return g;
}

GridDensity GridDensity::from_log_function(std::vector<Axis> axes,
                                           const std::function<double(const Vector&)>& f) {
  if (axes.empty() || axes.size() > 2) throw std::invalid_argument("grid must be 1-D or 2-D");
  const int m0 = axes[0].m;
  const int m1 = axes.size() == 2 ? axes[1].m : 1;
  std::vector<double> lm(static_cast<std::size_t>(m0) * m1);
  Vector c(static_cast<Eigen::Index>(axes.size()));
  for (int i = 0; i < m0; ++i) {
    c[0] = axes[0].center(i);
    for (int j = 0; j < m1; ++j) {
      if (axes.size() == 2) c[1] = axes[1].center(j);
      lm[static_cast<std::size_t>(i) * m1 + j] = f(c);
    }
  }
  return from_logmass(std::move(axes), std::move(lm));
}

std::size_t GridDensity::index(int i, int j) const {
  if (dim() == 1) return static_cast<std::size_t>(i);
  return static_cast<std::size_t>(i) * axes_[1].m + j;
}

Vector GridDensity::center(std::size_t flat) const {
  Vector c(dim());
  if (dim() == 1) {
    c[0] = axes_[0].center(static_cast<int>(flat));
  } else {
    const int m1 = axes_[1].m;
    c[0] = axes_[0].center(static_cast<int>(flat / m1));
    c[1] = axes_[1].center(static_cast<int>(flat % m1));
  }
  return c;
}

GridDensity GridDensity::marginal(int k) const {
  if (dim() != 2 || k < 0 || k > 1) throw std::invalid_argument("marginal needs a 2-D grid and k in {0,1}");
  const int m0 = axes_[0].m, m1 = axes_[1].m;
  std::vector<double> acc(k == 0 ? m0 : m1, 0.0);
  for (int i = 0; i < m0; ++i) {
    for (int j = 0; j < m1; ++j) acc[k == 0 ? i : j] += mass_[index(i, j)];
  }
  std::vector<double> lm(acc.size());
  for (std::size_t t = 0; t < acc.size(); ++t) {
    lm[t] = acc[t] > 0.0 ? std::log(acc[t]) : -std::numeric_limits<double>::infinity();
  }
  return from_logmass({axes_[k]}, std::move(lm));
}

GridDensity GridDensity::conditional(int i) const {
  if (dim() != 2) throw std::invalid_argument("conditional needs a 2-D grid");
  if (i < 0 || i >= axes_[0].m) throw std::out_of_range("conditional column out of range");
  const int m1 = axes_[1].m;
  std::vector<double> lm(m1);
  for (int j = 0; j < m1; ++j) lm[j] = logmass_[index(i, j)];
  return from_logmass({axes_[1]}, std::move(lm));
}

double GridKernel::row_sum_error() const {
  return (T.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

double GridKernel::detailed_balance_residual() const {
  const Matrix F = pi.asDiagonal() * T;
  return (F - F.transpose()).cwiseAbs().maxCoeff();
}

double GridKernel::stationarity_residual() const {
  return (T.transpose() * pi - pi).lpNorm<1>();
}

double GridKernel::second_eigenvalue_modulus() const {
  // D^{1/2} T D^{-1/2} is symmetric for a reversible kernel.
  const Vector sq = pi.array().sqrt();
  const Vector inv = sq.cwiseInverse();
  Matrix S = sq.asDiagonal() * T * inv.asDiagonal();
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
  const Vector ev = es.eigenvalues();
  // Eigenvalues ascend; the largest is the stationary 1.
  double best = 0.0;
  for (Eigen::Index k = 0; k + 1 < ev.size(); ++k) best = std::max(best, std::abs(ev[k]));
  return best;
}

double gaussian_interval_mass(double mu, double sigma, double a, double b) {
  if (!(b > a)) return 0.0;
  const double s = sigma * std::numbers::sqrt2;
  const double za = (a - mu) / s, zb = (b - mu) / s;
  if (za >= 0.0) return 0.5 * (std::erfc(za) - std::erfc(zb));
  if (zb <= 0.0) return 0.5 * (std::erfc(-zb) - std::erfc(-za));
  return 1.0 - 0.5 * (std::erfc(-za) + std::erfc(zb));
}

GridKernel build_grid_kernel(const GridDensity& gd, double eta, Algorithm alg) {
  if (gd.dim() != 1) throw std::invalid_argument("grid kernel needs a 1-D grid");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  const Axis& ax = gd.axis(0);
  const int m = ax.m;
  const double sigma = std::sqrt(eta);
  GridKernel gk;
  gk.axis = ax;
  gk.algorithm = alg;
  gk.eta = eta;
  gk.pi = Eigen::Map<const Vector>(gd.mass().data(), m);
  gk.T = Matrix::Zero(m, m);
  const auto& lm = gd.logmass();
  for (int i = 0; i < m; ++i) {
    const double x = ax.center(i);
    double off = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double a = ax.edge(j), b = ax.edge(j + 1);
      double q = gaussian_interval_mass(x, sigma, a, b);
      if (alg == Algorithm::rmrw) {
        q = 0.5 * q + 0.5 * gaussian_interval_mass(x, sigma, -b, -a);
      }
      if (q == 0.0) continue;
      const double log_ratio = lm[j] - lm[i];
      const double acc = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
      gk.T(i, j) = q * acc;
      off += gk.T(i, j);
    }
    gk.T(i, i) = 1.0 - off;
  }
  return gk;
}

ConductanceResult s_conductance(const GridKernel& gk, double s) {
  if (!(s >= 0.0) || s >= 0.5) throw std::invalid_argument("s-conductance needs s in [0, 1/2)");
  const int m = static_cast<int>(gk.pi.size());
  // P(a, b) = Σ_{i<a, j<b} π_i T_ij.
  Matrix P = Matrix::Zero(m + 1, m + 1);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      P(i + 1, j + 1) = gk.pi[i] * gk.T(i, j) + P(i, j + 1) + P(i + 1, j) - P(i, j);
    }
  }
  std::vector<double> cum(m + 1, 0.0);
  for (int i = 0; i < m; ++i) cum[i + 1] = cum[i] + gk.pi[i];
  auto block = [&](int r0, int r1, int c0, int c1) {  // rows [r0, r1], cols [c0, c1]
    return P(r1 + 1, c1 + 1) - P(r0, c1 + 1) - P(r1 + 1, c0) + P(r0, c0);
  };
  auto mass = [&](int l, int r) { return cum[r + 1] - cum[l]; };

  ConductanceResult best;
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](double ms, double inner, std::vector<std::pair<int, int>> w) {
    if (!(ms > s) || ms > 0.5) return;
    const double flow = std::max(0.0, ms - inner);
    const double v = flow / (ms - s);
    if (v < best.value) {
      best.value = v;
      best.set_mass = ms;
      best.flow = flow;
      best.witness = std::move(w);
      best.found = true;
    }
  };

  const bool symmetric = std::abs(gk.axis.lo + gk.axis.hi) <= 1e-12 * (gk.axis.hi - gk.axis.lo);
  for (int l = 0; l < m; ++l) {
    for (int r = l; r < m; ++r) {
      consider(mass(l, r), block(l, r, l, r), {{l, r}});
      if (!symmetric) continue;
      const int ml = m - 1 - r, mr = m - 1 - l;
      if (ml > r) {  // disjoint mirror on the right
        const double inner = block(l, r, l, r) + block(ml, mr, ml, mr) + block(l, r, ml, mr) +
                             block(ml, mr, l, r);
        consider(mass(l, r) + mass(ml, mr), inner, {{l, r}, {ml, mr}});
      }
    }
  }
  if (!best.found) best.value = std::numeric_limits<double>::quiet_NaN();
  return best;
}

}  // namespace rmrw
