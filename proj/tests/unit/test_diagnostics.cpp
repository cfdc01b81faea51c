#include <cmath>

#include <doctest.h>

#include "oracles.hpp"
#include "rmrw/diagnostics.hpp"

using namespace rmrw;

namespace {

PowerPosterior posterior(int d, double a, int n, double beta, std::uint64_t seed) {
  const MixtureSpec spec = MixtureSpec::along_first_axis(d, a);
  return PowerPosterior(sample_data(spec, std::nullopt, n, seed), beta, PriorSpec::uniform(), spec);
}

Dataset column(const std::vector<double>& v) {
  Dataset s(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) s(i, 0) = v[i];
  return s;
}

BarSeries bars(const std::vector<double>& counts) {
  BarSeries b;
  b.counts = counts;
  for (std::size_t i = 0; i <= counts.size(); ++i) b.edges.push_back(static_cast<double>(i));
  return b;
}

}  // namespace

TEST_CASE("tail radius: arithmetic and monotonicity") {
  CHECK(tail_radius(1, 0.0, 1.0, std::exp(-1.0)) == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-14));
  CHECK(tail_radius(1, 0.0, 1.0, std::exp(-1.0), 3.0) == doctest::Approx(3.0 * (1.0 + std::sqrt(2.0))).epsilon(1e-14));
  double last = 0.0;
  for (double eps : {0.5, 0.1, 0.01, 1e-4}) {
    const double r = tail_radius(3, 2.0, 4.0, eps);
    CHECK(r > last);
    last = r;
  }
}

TEST_CASE("reference densities: symmetry, centring, refinement") {
  const PowerPosterior pp = PowerPosterior::population(MixtureSpec::along_first_axis(1, 2.0), 4.0);
  const double R = std::ceil(tail_radius(1, 2.0, 4.0, 0.001)) + 1.0;
  const ReferenceDensity ref = build_reference(pp, {Axis(-R, R, 400)}, true);
  for (int i = 0; i < 400; ++i) CHECK(std::abs(ref.mass_at(i) - ref.mass_at(399 - i)) <= 1e-12);

  const ReferenceDensity fine = build_reference(pp, {Axis(-R, R, 800)}, true);
  CHECK(tv_distance(ref, coarsen(fine, 2)) < 1e-3);

  const PowerPosterior g = PowerPosterior::population(MixtureSpec::along_first_axis(1, 0.0), 200.0);
  const ReferenceDensity gref = build_reference(g, {Axis(-4, 4, 400)}, true);
  double mean = 0.0;
  for (int i = 0; i < 400; ++i) mean += gref.mass_at(i) * gref.axis(0).center(i);
  CHECK(std::abs(mean) < gref.axis(0).width());

  CHECK_THROWS_AS(build_reference(pp, {Axis(-1, 1, 40)}, true), std::invalid_argument);
}

TEST_CASE("TV to a reference: sampling noise and disjoint support") {
  const auto ref = GridDensity::from_log_function({Axis(-4, 4, 40)}, [](const Vector& x) { return -0.5 * x[0] * x[0]; });
  Rng rng(8);
  std::discrete_distribution<int> pick(ref.mass().begin(), ref.mass().end());
  std::vector<double> draws(1000000);
  for (double& v : draws) v = ref.axis(0).center(pick(rng));
  CHECK(tv_to_reference(column(draws), ref, 0) < 0.01);
  CHECK(tv_to_reference(column(std::vector<double>(100, 9.0)), ref, 0) == doctest::Approx(1.0));
}

TEST_CASE("single long chain approaches the quadrature reference") {
  const PowerPosterior pp = posterior(1, 2.0, 50, 50.0, 20240611);
  const double L = std::ceil(tail_radius(1, 2.0, 50.0, 0.001) + 1.0);
  const ReferenceDensity ref = coarsen(build_reference(pp, {Axis(-L, L, 400)}, false), 4);
  SamplerConfig c;
  c.eta = 0.01;
  c.steps = 100000;
  c.seed = 3;
  CHECK(tv_to_reference(run_chain(pp, c).states, ref, 10000) < 0.05);
}

TEST_CASE("mode balance and tail mass") {
  Dataset sym(6, 2);
  sym << 1, 2, -1, -2, 3, 0, -3, 0, 0.5, 1, -0.5, -1;
  Vector e1 = Vector::Unit(2, 0);
  CHECK(mode_balance(sym, e1, 0) == 0.5);
  Dataset pos = sym.cwiseAbs();
  pos(2, 1) = 1.0;
  CHECK(mode_balance(pos, e1, 0) == 1.0);
  CHECK(tail_mass(sym, 0.0) == 1.0);
  CHECK(tail_mass(sym, 10.0) == 0.0);

  const auto ref = GridDensity::from_log_function({Axis(-4, 4, 40)}, [](const Vector& x) { return -0.5 * x[0] * x[0]; });
  CHECK(tail_mass(ref, 10.0) == 0.0);
  CHECK(tail_mass(ref, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("effective sample size") {
  Rng rng(12);
  std::normal_distribution<double> g;
  const int T = 20000;
  std::vector<double> iid(T), doubled(T);
  for (double& v : iid) v = g(rng);
  for (int t = 0; t < T; ++t) doubled[t] = iid[t / 2];
  const double e_iid = ess(column(iid), 0).ess[0];
  CHECK(e_iid / T > 0.8);
  CHECK(e_iid / T < 1.2);
  const double e_dbl = ess(column(doubled), 0).ess[0];
  CHECK(e_dbl == doctest::Approx(T / 2.0).epsilon(0.15));
  CHECK(e_dbl == doctest::Approx(oracle::ess_bruteforce(doubled)).epsilon(0.05));

  std::vector<double> ar(T);
  ar[0] = 0.0;
  for (int t = 1; t < T; ++t) ar[t] = 0.9 * ar[t - 1] + g(rng);
  const double e_ar = ess(column(ar), 0).ess[0];
  CHECK(e_ar == doctest::Approx(T * 0.1 / 1.9).epsilon(0.25));
  CHECK(e_ar == doctest::Approx(oracle::ess_bruteforce(ar)).epsilon(0.05));

  const EssResult frozen = ess(column(std::vector<double>(500, 1.5)), 0);
  CHECK(frozen.any_degenerate);
  CHECK(frozen.degenerate[0]);
}

TEST_CASE("checkpoint schedules are strictly increasing and nested") {
  const std::vector<int> s = checkpoint_schedule(1000);
  CHECK(s.front() == 0);
  CHECK(std::vector<int>(s.begin(), s.begin() + 7) == std::vector<int>{0, 1, 2, 3, 5, 7, 11});
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
  CHECK(s.back() <= 1000);
  const std::vector<int> twice = checkpoint_schedule(2000);
  REQUIRE(twice.size() >= s.size());
  CHECK(std::equal(s.begin(), s.end(), twice.begin()));
}

TEST_CASE("doubling the horizon keeps every mixing estimate") {
  const PowerPosterior pp = posterior(1, 0.0, 50, 50.0, 4);
  const double L = std::ceil(tail_radius(1, 0.0, 50.0, 0.001) + 1.0);
  const ReferenceDensity ref = coarsen(build_reference(pp, {Axis(-L, L, 400)}, false), 10);
  SamplerConfig c;
  c.eta = 0.005;
  c.seed = 1;
  MixingOptions opt;
  opt.chains = 100;
  opt.max_steps = 2000;
  const MixingCurve a = mixing_curve(pp, c, ref, opt);
  opt.max_steps = 4000;
  const MixingCurve b = mixing_curve(pp, c, ref, opt);
  REQUIRE(b.tv.size() >= a.tv.size());
  for (std::size_t k = 0; k < a.tv.size(); ++k) CHECK(a.tv[k] == b.tv[k]);
  if (first_below(a, 0.3)) CHECK(first_below(b, 0.3) == first_below(a, 0.3));
}

TEST_CASE("mixing estimate: degenerate start and separation slows mixing") {
  // Point-mass reference: chains started in its only cell pass at t = 0.
  const PowerPosterior pp0 = posterior(1, 0.0, 50, 50.0, 5);
  const auto point = GridDensity::from_logmass({Axis(-0.5, 0.5, 1)}, {0.0});
  SamplerConfig c;
  c.eta = 1e-10;
  c.init = InitKind::fixed;
  c.init_point = Vector::Zero(1);
  MixingOptions opt;
  opt.chains = 50;
  opt.max_steps = 10;
  CHECK(mixing_time_estimate(pp0, c, point, 0.1, opt) == 0);

  auto estimate = [](double a) {
    const PowerPosterior pp = posterior(1, a, 50, 50.0, 20240611);
    const double L = std::ceil(tail_radius(1, a, 50.0, 0.001) + 1.0);
    const ReferenceDensity ref = coarsen(build_reference(pp, {Axis(-L, L, 400)}, false), 10);
    SamplerConfig sc;
    sc.eta = default_step_size(1, a, 50.0, 0.001);
    sc.seed = 20240611;
    MixingOptions o;
    o.chains = 500;
    o.max_steps = 100000;
    return mixing_time_estimate(pp, sc, ref, 0.1, o);
  };
  const auto t0 = estimate(0.0), t2 = estimate(2.0);
  REQUIRE(t0.has_value());
  REQUIRE(t2.has_value());
  CHECK(*t0 < *t2);
  CHECK_THROWS_AS(mixing_time_estimate(pp0, c, point, 0.1, MixingOptions{10, 10, 1, 0, 0.0}), std::invalid_argument);
}

TEST_CASE("projection histograms and mode detection") {
  const BarSeries h = projection_histogram(column({0.1, 0.2, 0.3, 0.6}), Vector::Ones(1), 0, 0.25);
  CHECK(h.edges.size() == h.counts.size() + 1);
  CHECK(h.edges.front() == -0.25);
  CHECK(h.counts.front() == 0.0);
  CHECK(h.counts.back() == 0.0);
  double total = 0.0;
  for (double v : h.counts) total += v;
  CHECK(total == 4.0);
  CHECK(projection_histogram(column({0.1, 0.2, 0.3, 0.6}), Vector::Ones(1), 2, 0.25).counts.size() == 4);

  CHECK(moving_average({0, 3, 0}, 3) == std::vector<double>{1, 1, 1});
  CHECK(detect_modes(bars({0, 1, 5, 9, 5, 1, 0, 0, 1, 6, 8, 6, 1, 0})).count() == 2);
  CHECK(detect_modes(bars({0, 1, 4, 4, 4, 4, 1, 0})).count() == 1);
  // A lone count far below the main peak is ignored by the relative floor.
  const ModeSummary m = detect_modes(bars({0, 0, 1, 0, 0, 0, 200, 500, 200, 0}), 3, 0.01);
  CHECK(m.count() == 1);
  CHECK(m.centers[0] == doctest::Approx(7.5));
  CHECK(detect_modes(bars({0, 0, 1, 0, 0, 0, 200, 500, 200, 0}), 3, 0.0).count() == 2);
  CHECK_THROWS_AS(moving_average({1, 2}, 2), std::invalid_argument);
}
