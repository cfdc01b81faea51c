#include <cmath>
#include <filesystem>
#include <numbers>

#include <doctest.h>

#include "oracles.hpp"
#include "rmrw/mixture.hpp"
#include "rmrw/random.hpp"

using namespace rmrw;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(v.size());
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("density: closed-form values") {
  CHECK(density(MixtureSpec(vec({0.0})), vec({0.0})) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
  const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi), phi2 = phi0 * std::exp(-2.0);
  CHECK(density(MixtureSpec(vec({1.0})), vec({1.0})) == doctest::Approx(0.5 * phi0 + 0.5 * phi2).epsilon(1e-14));
  CHECK(density(MixtureSpec(vec({1.0})), vec({1.0})) == doctest::Approx(0.2264666).epsilon(1e-6));
}

TEST_CASE("density is even in x") {
  Rng rng(3);
  std::normal_distribution<double> g;
  const MixtureSpec spec(vec({1.5, -0.5, 2.0}));
  for (int i = 0; i < 200; ++i) {
    Vector x(3);
    for (auto& v : x) v = 3.0 * g(rng);
    CHECK(density(spec, x) == density(spec, Vector(-x)));
  }
}

TEST_CASE("log_density: values, extended-precision agreement, stability") {
  CHECK(log_density(MixtureSpec(vec({0.0})), vec({0.0})) == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-14));
  const Vector t0 = vec({3.0, 0.0});
  CHECK(std::abs(log_density(MixtureSpec(t0), t0) - (double)oracle::mixture_log_density(t0, t0)) < 1e-10);
  Rng rng(5);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    const Vector th = vec({2.0 * g(rng), 2.0 * g(rng)});
    const Vector x = vec({4.0 * g(rng), 4.0 * g(rng)});
    CHECK(std::abs(log_density(MixtureSpec(th), x) - (double)oracle::mixture_log_density(th, x)) < 1e-10);
  }
  const double v = log_density(MixtureSpec(vec({40.0})), vec({20.0}));  // θ₀ᵀx = 800
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(-0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * (400.0 + 1600.0) + 800.0 - std::log(2.0)));
}

TEST_CASE("logcosh matches the long-double form and never overflows") {
  for (double t : {0.0, 1e-8, 0.3, -2.0, 17.0, 710.0, -1e6}) {
    CHECK(logcosh(t) == doctest::Approx((double)oracle::logcosh(t)).epsilon(1e-15));
  }
}

TEST_CASE("sample_data: second moment matches I + θ₀θ₀ᵀ") {
  const Vector t0 = vec({1.0, -2.0, 0.5});
  const int n = 100000;
  const Dataset X = sample_data(MixtureSpec(t0), std::nullopt, n, 11);
  const Matrix expected = Matrix::Identity(3, 3) + t0 * t0.transpose();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Eigen::ArrayXd prod = X.col(i).array() * X.col(j).array();
      const double mean = prod.mean();
      const double se = std::sqrt((prod - mean).square().sum() / (n - 1) / n);
      CHECK(std::abs(mean - expected(i, j)) < 5.0 * se);
    }
  }
}

TEST_CASE("sample_data: point mass at γ = 1, reproducibility, γ only relabels points") {
  const MixtureSpec spec(vec({2.0, 0.0}));
  ContaminationSpec c;
  c.gamma = 1.0;
  c.kind = NoiseKind::point_mass;
  c.location = vec({7.0, -1.0});
  const Dataset X = sample_data(spec, c, 500, 4);
  for (int i = 0; i < X.rows(); ++i) CHECK((X.row(i).transpose() - c.location).norm() == 0.0);

  CHECK(sample_data(spec, std::nullopt, 300, 9) == sample_data(spec, std::nullopt, 300, 9));
  CHECK(sample_data(spec, std::nullopt, 300, 9) != sample_data(spec, std::nullopt, 300, 10));

  c.gamma = 0.0;
  CHECK(sample_data(spec, c, 300, 9) == sample_data(spec, std::nullopt, 300, 9));
  // Points kept clean at γ = 0.1 stay clean and unchanged at γ = 0.05.
  c.gamma = 0.1;
  const Dataset a = sample_data(spec, c, 300, 9);
  c.gamma = 0.05;
  const Dataset b = sample_data(spec, c, 300, 9);
  const Dataset clean = sample_data(spec, std::nullopt, 300, 9);
  for (int i = 0; i < 300; ++i) {
    if (a.row(i) == clean.row(i)) CHECK(b.row(i) == clean.row(i));
  }
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(MixtureSpec{Vector()}, std::invalid_argument);
  CHECK_THROWS_AS(MixtureSpec(vec({NAN})), std::invalid_argument);
  CHECK_THROWS_AS(sample_data(MixtureSpec(vec({1.0})), std::nullopt, 0, 1), std::invalid_argument);
  ContaminationSpec c;
  c.gamma = 1.5;
  c.location = vec({0.0});
  CHECK_THROWS_AS(sample_data(MixtureSpec(vec({1.0})), c, 10, 1), std::invalid_argument);
  c.gamma = 0.1;
  c.location = vec({0.0, 0.0});
  CHECK_THROWS_AS(sample_data(MixtureSpec(vec({1.0})), c, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS(noise_kind_from_string("laplace"), std::invalid_argument);
  CHECK_THROWS_AS(density(MixtureSpec(vec({1.0})), vec({1.0, 2.0})), std::invalid_argument);
}

TEST_CASE("dataset CSV round trip is exact") {
  const auto dir = std::filesystem::temp_directory_path() / "rmrw_unit_dataset";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "data.csv").string();
  const MixtureSpec spec(vec({1.25, -3.0}));
  const Dataset X = sample_data(spec, std::nullopt, 64, 21);
  save_dataset(path, X, spec, std::nullopt, 21, "0123456789abcdef");
  CHECK(load_dataset(path) == X);
  CHECK(std::filesystem::exists(path + ".json"));
}
