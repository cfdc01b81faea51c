#pragma once

// Reference computations that share no code with the library. Each one is
// slow and simple on purpose; tests compare the library against them.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline long double logcosh(long double t) {
  t = std::fabs(t);
  return t + std::log1p(std::exp(-2.0L * t)) - std::log(2.0L);
}

/// E logcosh(m + sZ) by composite Simpson over z ∈ [−40, 40].
inline long double gaussian_logcosh(long double m, long double s, int panels = 400000) {
  const long double lo = -40.0L, hi = 40.0L, h = (hi - lo) / panels;
  const long double c = 1.0L / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
  auto f = [&](long double z) { return logcosh(m + s * z) * c * std::exp(-0.5L * z * z); };
  long double acc = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0L : 2.0L) * f(lo + i * h);
  return acc * h / 3.0L;
}

/// log(½φ_d(x − θ₀) + ½φ_d(x + θ₀)) summed directly in long double.
inline long double mixture_log_density(const Vec& theta0, const Vec& x) {
  const long double d = x.size();
  long double p = 0, q = 0;
  for (int k = 0; k < x.size(); ++k) {
    p += (long double)(x[k] - theta0[k]) * (x[k] - theta0[k]);
    q += (long double)(x[k] + theta0[k]) * (x[k] + theta0[k]);
  }
  const long double norm = std::pow(2.0L * 3.14159265358979323846264338327950288L, -d / 2.0L);
  return std::log(0.5L * norm * std::exp(-0.5L * p) + 0.5L * norm * std::exp(-0.5L * q));
}

/// −(β/n) Σᵢ log(½φ(θ − Xᵢ) + ½φ(θ + Xᵢ)), rows of X are the data.
template <class Data>
long double naive_potential(const Data& X, double beta, const Vec& theta) {
  long double acc = 0;
  for (int i = 0; i < X.rows(); ++i) acc += mixture_log_density(Vec(X.row(i).transpose()), theta);
  return -(long double)beta / X.rows() * acc;
}

inline Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec p = x, m = x;
    p[i] += h;
    m[i] -= h;
    g[i] = (f(p) - f(m)) / (2.0 * h);
  }
  return g;
}

/// Second-order central differences of f.
inline Mat fd_hessian(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  const int d = x.size();
  Mat H(d, d);
  const double f0 = f(x);
  for (int i = 0; i < d; ++i) {
    Vec p = x, m = x;
    p[i] += h;
    m[i] -= h;
    H(i, i) = (f(p) - 2.0 * f0 + f(m)) / (h * h);
    for (int j = 0; j < i; ++j) {
      Vec pp = x, pm = x, mp = x, mm = x;
      pp[i] += h, pp[j] += h;
      pm[i] += h, pm[j] -= h;
      mp[i] -= h, mp[j] += h;
      mm[i] -= h, mm[j] -= h;
      H(i, j) = H(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
    }
  }
  return H;
}

/// max |a − b| / max(1, max |b|).
inline double scaled_error(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

/// 1-D Cheeger constant by enumerating every interval [i, j] of cells; the
/// cut between adjacent cells a, b has weight √(π_a π_b)/h.
inline double cheeger_bruteforce(const std::vector<double>& mass, double h) {
  const int m = mass.size();
  long double total = 0;
  for (double v : mass) total += v;
  double best = INFINITY;
  for (int i = 0; i < m; ++i) {
    long double inside = 0;
    for (int j = i; j < m; ++j) {
      inside += mass[j];
      const long double pin = inside / total;
      const long double side = std::min(pin, 1.0L - pin);
      if (side <= 0) continue;
      long double boundary = 0;
      if (i > 0) boundary += std::sqrt((long double)mass[i - 1] * mass[i]) / total / h;
      if (j + 1 < m) boundary += std::sqrt((long double)mass[j] * mass[j + 1]) / total / h;
      best = std::min(best, (double)(boundary / side));
    }
  }
  return best;
}

/// Integrated autocorrelation time truncated at the first non-positive
/// pair sum, computed with direct O(T·lag) autocovariances.
inline double ess_bruteforce(const std::vector<double>& x) {
  const int T = x.size();
  long double mean = 0;
  for (double v : x) mean += v;
  mean /= T;
  auto acov = [&](int k) {
    long double s = 0;
    for (int t = 0; t + k < T; ++t) s += (x[t] - mean) * (x[t + k] - mean);
    return s / T;
  };
  const long double c0 = acov(0);
  long double tau = -1.0L;
  for (int k = 0; k + 1 < T; k += 2) {
    const long double pair = (acov(k) + acov(k + 1)) / c0;
    if (pair <= 0) break;
    tau += 2.0L * pair;
  }
  return T / (double)tau;
}

}  // namespace oracle
