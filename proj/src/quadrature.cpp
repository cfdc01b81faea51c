#include "rmrw/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace rmrw {

namespace {

GaussRule build_legendre(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

// Newton iteration on orthonormal Hermite polynomials with the usual
// asymptotic starting guesses.
GaussRule build_hermite(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * r.nodes[n - 1];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * r.nodes[n - 2];
    } else {
      z = 2.0 * z - r.nodes[n - 1 - (i - 2)];
    }
    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    // Keep descending order bookkeeping for the starting guesses: node i from the top.
    r.nodes[n - 1 - i] = z;
    r.nodes[i] = -z;
    const double w = 2.0 / (pp * pp);
    r.weights[n - 1 - i] = w;
    r.weights[i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

template <class Builder>
const GaussRule& cached(std::map<int, GaussRule>& cache, std::mutex& mu, int n, Builder build) {
  if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build(n)).first;
  return it->second;
}

constexpr double kLocalizedCutoff = 20.0;  // e^{-2|t|} < 5e-18 beyond
constexpr double kWindowSigmas = 12.0;

struct Accum {
  double log1p_e = 0.0, tanh_rest = 0.0, sech2 = 0.0, d_sech2 = 0.0, dd_sech2 = 0.0;

  void add(double t, double w) {
    const double e = std::exp(-2.0 * std::abs(t));
    const double sgn = t < 0.0 ? -1.0 : 1.0;
    const double inv = 1.0 / (1.0 + e);
    const double th = sgn * (1.0 - e) * inv;
    const double s2 = 4.0 * e * inv * inv;
    log1p_e += w * std::log1p(e);
    tanh_rest += w * (-sgn * 2.0 * e * inv);
    sech2 += w * s2;
    d_sech2 += w * (-2.0 * s2 * th);
    dd_sech2 += w * (4.0 * s2 * th * th - 2.0 * s2 * s2);
  }
};

void integrate_segment(Accum& acc, const GaussRule& rule, double a, double b, double m, double s) {
  if (!(b > a)) return;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double norm = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = mid + half * rule.nodes[i];
    const double z = (t - m) / s;
    acc.add(t, rule.weights[i] * half * norm * std::exp(-0.5 * z * z));
  }
}

LogcoshMoments at_point(double m) {
  LogcoshMoments out;
  Accum acc;
  acc.add(m, 1.0);
  out.logcosh = std::abs(m) - std::numbers::ln2 + acc.log1p_e;
  out.tanh = std::tanh(m);
  out.sech2 = acc.sech2;
  out.d_sech2 = acc.d_sech2;
  out.dd_sech2 = acc.dd_sech2;
  return out;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, build_legendre);
}

const GaussRule& gauss_hermite(int n) {
  static std::map<int, GaussRule> cache;
  static std::mutex mu;
  return cached(cache, mu, n, build_hermite);
}

LogcoshMoments gaussian_logcosh_moments(double m, double s, int nodes, QuadratureRule rule) {
  if (nodes < 8) throw std::invalid_argument("quadrature needs at least 8 nodes");
  if (!(s >= 0.0) || !std::isfinite(m) || !std::isfinite(s)) {
    throw std::invalid_argument("moments need finite m and s >= 0");
  }
  if (s == 0.0) return at_point(m);

  if (rule == QuadratureRule::gauss_hermite) {
    const GaussRule& gh = gauss_hermite(nodes);
    Accum acc;
    double lc = 0.0, th = 0.0;
    const double c = 1.0 / std::sqrt(std::numbers::pi);
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
      const double t = m + s * std::numbers::sqrt2 * gh.nodes[i];
      const double w = c * gh.weights[i];
      acc.add(t, w);
      lc += w * (std::abs(t) - std::numbers::ln2);
      th += w * std::tanh(t);
    }
    return {lc + acc.log1p_e, th, acc.sech2, acc.d_sech2, acc.dd_sech2};
  }

  // E|m + sZ| and E sign(m + sZ) in closed form.
  const double r = m / s;
  const double abs_mean = s * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * r * r) +
                          m * std::erf(r / std::numbers::sqrt2);
  const double sign_mean = std::erf(r / std::numbers::sqrt2);

  const GaussRule& gl = gauss_legendre(nodes);
  const double lo = std::max(-kLocalizedCutoff, m - kWindowSigmas * s);
  const double hi = std::min(kLocalizedCutoff, m + kWindowSigmas * s);
  Accum acc;
  if (lo < hi) {
    // The remainders have a kink at t = 0, so each half-line gets its own panel.
    integrate_segment(acc, gl, lo, std::min(hi, 0.0), m, s);
    integrate_segment(acc, gl, std::max(lo, 0.0), hi, m, s);
  }
  LogcoshMoments out;
  out.logcosh = abs_mean - std::numbers::ln2 + acc.log1p_e;
  out.tanh = sign_mean + acc.tanh_rest;
  out.sech2 = acc.sech2;
  out.d_sech2 = acc.d_sech2;
  out.dd_sech2 = acc.dd_sech2;
  return out;
}

}  // namespace rmrw
