#include <cmath>
#include <numbers>

#include <doctest.h>

#include "oracles.hpp"
#include "rmrw/quadrature.hpp"

using namespace rmrw;

// E logcosh(4 + 2Z), from the long-double Simpson oracle.
constexpr double kLogcoshMean_4_2 = 3.3672798062631330183;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const GaussRule& r = gauss_legendre(10);
  for (int p = 0; p <= 19; ++p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * std::pow(r.nodes[i], p);
    const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
    CHECK(acc == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("Gauss-Hermite moments of e^{-x^2}") {
  const GaussRule& r = gauss_hermite(20);
  double w = 0.0, x2 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    w += r.weights[i];
    x2 += r.weights[i] * r.nodes[i] * r.nodes[i];
  }
  CHECK(w == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
  CHECK(x2 == doctest::Approx(std::sqrt(std::numbers::pi) / 2.0).epsilon(1e-13));
}

TEST_CASE("split rule: frozen regression value") {
  CHECK(gaussian_logcosh_moments(4.0, 2.0, 64).logcosh == doctest::Approx(kLogcoshMean_4_2).epsilon(1e-13));
  CHECK(gaussian_logcosh_moments(4.0, 2.0, 256).logcosh == doctest::Approx(kLogcoshMean_4_2).epsilon(1e-14));
}

TEST_CASE("split rule matches the Simpson oracle across scales") {
  for (double m : {0.0, 0.7, 3.0, 25.0}) {
    for (double s : {1e-3, 0.5, 2.0, 6.0, 20.0}) {
      const double expected = (double)oracle::gaussian_logcosh(m, s, 200000);
      const double got = gaussian_logcosh_moments(m, s, 64).logcosh;
      CHECK_MESSAGE(std::abs(got - expected) <= 1e-11 * std::max(1.0, std::abs(expected)), "m=", m, " s=", s);
    }
  }
}

TEST_CASE("derivative moments agree with finite differences in m") {
  const double h = 1e-4;
  for (double m : {0.0, 1.3, 5.0}) {
    for (double s : {0.3, 2.5}) {
      auto at = [&](double mm) { return gaussian_logcosh_moments(mm, s, 64); };
      const LogcoshMoments c = at(m), p = at(m + h), q = at(m - h);
      CHECK(c.tanh == doctest::Approx((p.logcosh - q.logcosh) / (2 * h)).epsilon(1e-7));
      CHECK(c.sech2 == doctest::Approx((p.tanh - q.tanh) / (2 * h)).epsilon(1e-6));
      CHECK(c.d_sech2 == doctest::Approx((p.sech2 - q.sech2) / (2 * h)).epsilon(1e-5));
      CHECK(c.dd_sech2 == doctest::Approx((p.d_sech2 - q.d_sech2) / (2 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("point mass and small-scale agreement with Gauss-Hermite") {
  const LogcoshMoments z = gaussian_logcosh_moments(1.2, 0.0, 16);
  CHECK(z.logcosh == doctest::Approx((double)oracle::logcosh(1.2L)).epsilon(1e-15));
  CHECK(z.tanh == doctest::Approx(std::tanh(1.2)).epsilon(1e-15));
  const double split = gaussian_logcosh_moments(0.8, 0.4, 64).logcosh;
  const double gh = gaussian_logcosh_moments(0.8, 0.4, 64, QuadratureRule::gauss_hermite).logcosh;
  CHECK(std::abs(split - gh) < 1e-12);
}

TEST_CASE("quadrature rejects bad arguments") {
  CHECK_THROWS_AS(gaussian_logcosh_moments(0.0, -1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_logcosh_moments(NAN, 1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(gaussian_logcosh_moments(0.0, 1.0, 4), std::invalid_argument);
}
