#include <cmath>
#include <numbers>

#include <doctest.h>

#include "oracles.hpp"
#include "rmrw/grid.hpp"
#include "rmrw/spectral.hpp"

using namespace rmrw;

namespace {

GridDensity gaussian_1d(double lo, double hi, int m, double mu = 0.0, double sd = 1.0) {
  return GridDensity::from_log_function({Axis(lo, hi, m)}, [=](const Vector& x) {
    const double z = (x[0] - mu) / sd;
    return -0.5 * z * z;
  });
}

GridDensity uniform_1d(double lo, double hi, int m) {
  return GridDensity::from_log_function({Axis(lo, hi, m)}, [](const Vector&) { return 0.0; });
}

}  // namespace

TEST_CASE("axis geometry") {
  const Axis ax(-2.0, 2.0, 8);
  CHECK(ax.width() == 0.5);
  CHECK(ax.center(0) == -1.75);
  CHECK(ax.cell_of(-2.0) == 0);
  CHECK(ax.cell_of(1.99) == 7);
  CHECK(ax.cell_of(2.0) == 7);
  CHECK(ax.cell_of(2.01) == -1);
  CHECK(ax.cell_of(-3.0) == -1);
  CHECK_THROWS_AS(Axis(1.0, 0.0, 4), std::invalid_argument);
}

TEST_CASE("grid densities normalize and marginalize") {
  const auto gd = GridDensity::from_log_function({Axis(-3, 3, 30), Axis(-2, 2, 20)}, [](const Vector& x) {
    return -0.5 * x[0] * x[0] - x[1] * x[1] + 0.3 * x[0] * x[1];
  });
  double total = 0.0;
  for (double m : gd.mass()) total += m;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  const GridDensity m0 = gd.marginal(0);
  CHECK(m0.cells() == 30);
  double row = 0.0;
  for (int j = 0; j < 20; ++j) row += gd.mass_at(4, j);
  CHECK(m0.mass_at(4) == doctest::Approx(row).epsilon(1e-13));
  const GridDensity c = gd.conditional(4);
  CHECK(c.mass_at(7) == doctest::Approx(gd.mass_at(4, 7) / row).epsilon(1e-13));
}

TEST_CASE("gaussian interval mass stays accurate in the far tail") {
  CHECK(gaussian_interval_mass(0.0, 1.0, -1.0, 1.0) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-15));
  const double far = gaussian_interval_mass(0.0, 1.0, 30.0, 31.0);
  const double expected = 0.5 * (std::erfc(30.0 / std::sqrt(2.0)) - std::erfc(31.0 / std::sqrt(2.0)));
  CHECK(far == doctest::Approx(expected).epsilon(1e-12));
  CHECK(far > 0.0);
}

TEST_CASE("grid MH kernels are stochastic, reversible and ergodic") {
  const auto gd = GridDensity::from_log_function({Axis(-5, 5, 120)}, [](const Vector& x) {
    return std::log(std::exp(-2.0 * (x[0] - 2) * (x[0] - 2)) + std::exp(-2.0 * (x[0] + 2) * (x[0] + 2)));
  });
  for (Algorithm alg : {Algorithm::rmrw, Algorithm::mrw}) {
    const GridKernel k = build_grid_kernel(gd, 0.05, alg);
    CHECK(k.row_sum_error() <= 1e-12);
    CHECK(k.detailed_balance_residual() <= 1e-10);
    CHECK(k.stationarity_residual() <= 1e-10);
    CHECK(k.second_eigenvalue_modulus() < 1.0);
    CHECK((k.T.array() >= 0.0).all());
  }
}

TEST_CASE("s-conductance: two-state kernel and monotonicity in s") {
  GridKernel k;
  k.axis = Axis(-1.0, 1.0, 2);
  const double p = 0.3;
  k.T.resize(2, 2);
  k.T << 1 - p, p, p, 1 - p;
  k.pi = Vector::Constant(2, 0.5);
  const ConductanceResult r = s_conductance(k, 0.0);
  REQUIRE(r.found);
  CHECK(r.value == doctest::Approx(p).epsilon(1e-14));

  const auto gd = gaussian_1d(-4, 4, 60, 0.0, 1.0);
  const GridKernel g = build_grid_kernel(gd, 0.1, Algorithm::mrw);
  double last = 0.0;
  for (double s : {0.0, 0.01, 0.05, 0.1, 0.2, 0.4}) {
    const ConductanceResult c = s_conductance(g, s);
    REQUIRE(c.found);
    CHECK(c.value >= last - 1e-15);
    last = c.value;
  }
}

TEST_CASE("Poincare constants of reference densities") {
  const double unit = poincare_constant(uniform_1d(0, 1, 2000));
  CHECK(unit == doctest::Approx(1.0 / (std::numbers::pi * std::numbers::pi)).epsilon(0.02));
  CHECK(poincare_constant(uniform_1d(0, 2, 2000)) == doctest::Approx(4.0 * unit).epsilon(0.02));
  CHECK(poincare_constant(gaussian_1d(-6, 6, 2000)) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(poincare_constant(gaussian_1d(-12, 12, 2000, 1.0, 2.0)) == doctest::Approx(4.0).epsilon(0.02));
  const auto g2 = GridDensity::from_log_function({Axis(-6, 6, 80), Axis(-6, 6, 80)}, [](const Vector& x) {
    return -0.5 * x.squaredNorm();
  });
  const PoincareResult pr = poincare_spectrum(g2);
  CHECK(pr.converged);
  CHECK(pr.constant == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("Cheeger constants: analytic values and brute-force agreement") {
  CHECK(cheeger_constant(uniform_1d(0, 1, 400)).value == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(cheeger_constant(gaussian_1d(-8, 8, 4000)).value == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(2e-3));
  CHECK_FALSE(cheeger_constant(uniform_1d(0, 1, 10)).upper_bound);

  Rng rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double c1 = u(rng), c2 = u(rng), w = 0.5 + std::abs(u(rng));
    const auto gd = GridDensity::from_log_function({Axis(-6, 6, 150)}, [=](const Vector& x) {
      return std::log(std::exp(-w * (x[0] - c1) * (x[0] - c1)) + 0.5 * std::exp(-(x[0] - c2) * (x[0] - c2)));
    });
    CHECK(cheeger_constant(gd).value ==
          doctest::Approx(oracle::cheeger_bruteforce(gd.mass(), gd.axis(0).width())).epsilon(1e-10));
  }

  // Deep valley: the best cut sits at the valley and ζ ≈ valley density / ½.
  const auto valley = GridDensity::from_log_function({Axis(-6, 6, 600)}, [](const Vector& x) {
    return std::log(std::exp(-2.0 * (x[0] - 3) * (x[0] - 3)) + std::exp(-2.0 * (x[0] + 3) * (x[0] + 3)));
  });
  const CheegerResult cv = cheeger_constant(valley);
  const double h = valley.axis(0).width();
  const double mid = std::sqrt(valley.mass_at(299) * valley.mass_at(300)) / h;
  CHECK(cv.value == doctest::Approx(mid / 0.5).epsilon(1e-6));
}

TEST_CASE("two-dimensional Cheeger value is an upper bound") {
  const auto g2 = GridDensity::from_log_function({Axis(-5, 5, 40), Axis(-5, 5, 40)}, [](const Vector& x) {
    return -0.5 * x.squaredNorm();
  });
  const CheegerResult c = cheeger_constant(g2);
  CHECK(c.upper_bound);
  // A halfspace cut through the mean of N(0, I) gives 2φ(0).
  CHECK(c.value <= std::sqrt(2.0 / std::numbers::pi) * 1.01);
  CHECK(c.value > 0.0);
}

TEST_CASE("disconnected support is rejected") {
  std::vector<double> lm(20, 0.0);
  for (int i = 8; i < 12; ++i) lm[i] = -INFINITY;
  const auto gd = GridDensity::from_logmass({Axis(0, 1, 20)}, lm);
  CHECK_THROWS(poincare_constant(gd));
}
