#pragma once

#include <vector>

namespace rmrw {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss–Legendre rule on [-1, 1].
const GaussRule& gauss_legendre(int n);

/// Gauss–Hermite rule for the weight e^{-x²} on the real line.
const GaussRule& gauss_hermite(int n);

enum class QuadratureRule {
  /// Closed form for the non-decaying part of each integrand, Gauss–Legendre
  /// in t-space for the exponentially localized remainder. Accurate for any (m, s).
  split,
  /// Plain Gauss–Hermite in Z-space; loses accuracy once s ≳ 2.
  gauss_hermite,
};

/// Gaussian expectations of logcosh and its derivatives at t = m + sZ, Z ~ N(0, 1).
struct LogcoshMoments {
  double logcosh = 0.0;   // E logcosh(t)
  double tanh = 0.0;      // E tanh(t)
  double sech2 = 0.0;     // E sech²(t)
  double d_sech2 = 0.0;   // E (sech²)'(t)  = E[-2 sech² tanh]
  double dd_sech2 = 0.0;  // E (sech²)''(t) = E[4 sech² tanh² - 2 sech⁴]
};

/// Requires s >= 0 and nodes >= 8.
LogcoshMoments gaussian_logcosh_moments(double m, double s, int nodes,
                                        QuadratureRule rule = QuadratureRule::split);

}  // namespace rmrw
