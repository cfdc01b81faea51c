// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Usage: rmrw_acceptance [out_dir]. Exit status is the number of failures, capped at 1.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rmrw/experiments.hpp"
#include "rmrw/spectral.hpp"
#include "rmrw/theory.hpp"

using namespace rmrw;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kFigure1Seconds = 60.0;
constexpr double kAblationSeconds = 120.0;
constexpr double kPoincareSeconds = 300.0;
constexpr double kGradRelTol = 1e-5;
constexpr double kHessRelTol = 1e-4;
constexpr double kGradFdStep = 1e-4;
constexpr double kHessFdStep = 1e-3;
constexpr double kStationaryGradTol = 1e-8;
constexpr double kMarginTol = 1e-8;
constexpr double kPoincareRelTol = 0.02;
constexpr double kRowSumTol = 1e-12;
constexpr double kDetailedBalanceTol = 1e-10;
constexpr double kConductanceRatio = 10.0;
constexpr double kRatioLo = 0.35, kRatioHi = 0.7;

constexpr std::uint64_t kSeed = kDefaultSeed;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Timed {
  ExperimentResult result;
  double seconds = 0.0;
};

class Harness {
 public:
  explicit Harness(fs::path root) : root_(std::move(root)) { fs::remove_all(root_); }

  const Timed& run(const std::string& cmd) {
    auto it = first_.find(cmd);
    if (it != first_.end()) return it->second;
    return first_[cmd] = execute(cmd, "run1");
  }

  Timed rerun(const std::string& cmd) { return execute(cmd, "run2"); }
  fs::path dir(const std::string& cmd, const std::string& pass) const { return root_ / pass / cmd; }

 private:
  Timed execute(const std::string& cmd, const std::string& pass) {
    RunContext ctx;
    ctx.out_dir = dir(cmd, pass).string();
    ctx.seed = kSeed;
    const auto t0 = Clock::now();
    Timed t;
    t.result = run_command(cmd, ctx);
    t.seconds = seconds_since(t0);
    return t;
  }

  fs::path root_;
  std::map<std::string, Timed> first_;
};

const Assertion* find_assertion(const ExperimentResult& r, const std::string& name) {
  for (const auto& a : r.assertions) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

std::string failed_names(const ExperimentResult& r) {
  std::string s;
  for (const auto& a : r.assertions) {
    if (!a.passed) s += (s.empty() ? "" : "; ") + a.name;
  }
  return s.empty() ? "none" : s;
}

PowerPosterior population(int d, double a, double beta) {
  return PowerPosterior::population(MixtureSpec::along_first_axis(d, a), beta);
}

Vector gaussian_vector(int d, double scale, Rng& rng) {
  std::normal_distribution<double> g;
  Vector v(d);
  for (auto& x : v) x = scale * g(rng);
  return v;
}

// ---- Criteria ------------------------------------------------------------------------

Outcome separated_mixture(Harness& h) {
  const Timed& t = h.run("figure1");
  const json& rep = t.result.report;
  std::string detail = "modes(a=5)=" + rep.at("a5").at("modes_e1").at("centers").dump() +
                       " balance=" + fmt("%.3f", rep.at("a5").at("diagnostics").at("mode_balance").get<double>()) +
                       " failed=" + failed_names(t.result) + " time=" + fmt("%.1fs", t.seconds);
  return {t.result.passed && t.seconds < kFigure1Seconds, detail};
}

Outcome reflection_ablation(Harness& h) {
  const Timed& t = h.run("ablation");
  const json& a5 = t.result.report.at("a5");
  const json& a0 = t.result.report.at("a0");
  const std::string detail = "rmrw=" + fmt("%.3f", a5.at("rmrw_balance").get<double>()) +
                             " mrw=" + fmt("%.4f", a5.at("mrw_balance").get<double>()) +
                             " control |diff|=" +
                             fmt("%.3f", std::abs(a0.at("rmrw_balance").get<double>() - a0.at("mrw_balance").get<double>())) +
                             " time=" + fmt("%.1fs", t.seconds);
  return {t.result.passed && t.seconds < kAblationSeconds, detail};
}

Outcome derivative_oracle() {
  Rng rng(kSeed);
  std::uniform_real_distribution<double> ua(0.0, 4.0);
  const double betas[] = {1.0, 4.0, 8.0};
  double worst_g = 0.0, worst_h = 0.0, worst_stat = 0.0;
  int points = 0;
  for (int d : {1, 2, 3, 5}) {
    for (int k = 0; k < 100; ++k) {
      const double a = ua(rng), beta = betas[k % 3];
      const PowerPosterior pp = population(d, a, beta);
      const Vector th = gaussian_vector(d, a + 1.0, rng);
      auto U = [&](const Vector& t) { return population_potential(pp, t); };
      worst_g = std::max(worst_g, oracle::scaled_error(population_gradient(pp, th), oracle::fd_gradient(U, th, kGradFdStep)));
      worst_h = std::max(worst_h, oracle::scaled_error(population_hessian(pp, th), oracle::fd_hessian(U, th, kHessFdStep)));
      ++points;
      if (k < 10) {
        worst_stat = std::max({worst_stat, population_gradient(pp, pp.spec().theta0).norm(),
                               population_gradient(pp, Vector::Zero(d)).norm()});
      }
    }
  }
  return {worst_g <= kGradRelTol && worst_h <= kHessRelTol && worst_stat <= kStationaryGradTol,
          std::to_string(points) + " points: grad err " + fmt("%.2e", worst_g) + ", hess err " + fmt("%.2e", worst_h) +
              ", |grad| at theta0/0 " + fmt("%.2e", worst_stat)};
}

Outcome curvature_floor() {
  Rng rng(kSeed + 1);
  double worst = INFINITY;
  for (double a : {0.5, 2.0, 5.0}) {
    for (double beta : {1.0, 4.0, 16.0}) {
      const PowerPosterior pp = population(3, a, beta);
      for (int k = 0; k < 1000; ++k) {
        const Vector th = gaussian_vector(3, a + 2.0, rng);
        Eigen::SelfAdjointEigenSolver<Matrix> es(population_hessian(pp, th));
        worst = std::min(worst, es.eigenvalues().minCoeff() + beta * a * a);
      }
    }
  }
  return {worst >= -kMarginTol, "9000 points: min(lambda_min + beta*|theta0|^2) = " + fmt("%.4g", worst)};
}

Outcome dissipativity() {
  Rng rng(kSeed + 2);
  double pop = INFINITY;
  double emp = 1.0, con = 1.0;
  for (double a : {0.5, 2.0, 5.0}) {
    for (double beta : {1.0, 4.0, 16.0}) {
      const MixtureSpec spec = MixtureSpec::along_first_axis(3, a);
      const PowerPosterior pp = PowerPosterior::population(spec, beta);
      for (int k = 0; k < 10000; ++k) pop = std::min(pop, dissipativity_margin(pp, uniform_in_ball(3, 20.0, rng), false));
      DissipativityReplicationConfig dc;
      dc.spec = spec;
      dc.beta = beta;
      dc.seed = kSeed;
      const CheckReport e = dissipativity_replications(dc);
      emp = std::min(emp, e.details.at("passing_fraction").get<double>());
      ContaminationSpec noise;
      noise.gamma = 0.1;
      noise.location = Vector::Zero(3);
      noise.K = 2.0;
      dc.contamination = noise;
      const CheckReport c = dissipativity_replications(dc);
      con = std::min(con, c.details.at("passing_fraction").get<double>());
    }
  }
  return {pop >= 0.0 && emp >= 0.95 && con >= 0.95,
          "population min margin " + fmt("%.4g", pop) + ", empirical pass fraction " + fmt("%.2f", emp) +
              ", contaminated " + fmt("%.2f", con)};
}

Outcome poincare_machinery() {
  const auto t0 = Clock::now();
  const auto gauss = GridDensity::from_log_function({Axis(-6.0, 6.0, 2000)}, [](const Vector& x) { return -0.5 * x[0] * x[0]; });
  const auto unif = GridDensity::from_log_function({Axis(0.0, 1.0, 2000)}, [](const Vector&) { return 0.0; });
  const double cg = poincare_constant(gauss), cu = poincare_constant(unif);
  const double target_u = 1.0 / (std::numbers::pi * std::numbers::pi);
  const bool analytic = std::abs(cg - 1.0) <= kPoincareRelTol && std::abs(cu - target_u) / target_u <= kPoincareRelTol;
  const CheckReport ch = check_cheeger_inequality(random_densities_1d(50, 600, kSeed));
  double comb = INFINITY;
  int instances = 0;
  for (const auto& g : random_densities_2d(20, 40, kSeed)) {
    comb = std::min(comb, check_poincare_combination(g).worst_margin);
    ++instances;
  }
  const double secs = seconds_since(t0);
  return {analytic && ch.passed && ch.instances == 50 && instances == 20 && comb >= -kMarginTol && secs < kPoincareSeconds,
          "gauss " + fmt("%.4f", cg) + ", uniform " + fmt("%.5f", cu) + ", cheeger margin " + fmt("%.3g", ch.worst_margin) +
              ", combination margin " + fmt("%.3g", comb) + ", time " + fmt("%.1fs", secs)};
}

Outcome isoperimetry() {
  double worst = INFINITY;
  int instances = 0;
  std::uint64_t k = 0;
  for (const auto& g : random_unimodal_densities(10, 400, 3.0, kSeed)) {
    const CheckReport r = check_quasiconcave_isoperimetry(g, 1000, kSeed + k++);
    worst = std::min(worst, r.worst_margin);
    instances += r.instances;
  }
  return {instances >= 9500 && worst >= -kMarginTol,
          std::to_string(instances) + " partitions on 10 densities, min margin " + fmt("%.3g", worst)};
}

Outcome structure() {
  bool ok = true;
  double worst = INFINITY;
  for (double a0 : {0.0, 1.0, 2.0}) {
    for (double beta : {2.0, 8.0}) {
      const PowerPosterior pp = population(2, a0, beta);
      const double R = tail_radius(2, a0, beta, 0.001);
      const CheckReport r = check_structure(pp, Axis(0.0, R, 400), Axis(-R, R, 400));
      ok = ok && r.passed;
      worst = std::min(worst, r.worst_margin);
    }
  }
  return {ok, "6 cases on 400x400 grids, worst margin " + fmt("%.3g", worst)};
}

Outcome exact_kernels() {
  const MixtureSpec spec = MixtureSpec::along_first_axis(1, 3.0);
  const PowerPosterior pp(sample_data(spec, std::nullopt, 50, kSeed), 50.0, PriorSpec::uniform(), spec);
  const double R = tail_radius(1, 3.0, 50.0, 0.001);
  const Axis ax(-R - 0.5, R + 0.5, 400);
  const double s = 0.01, eta = default_step_size(1, 3.0, 50.0, s);
  const GridKernel kr = build_rmrw_grid_kernel(pp, eta, ax, Algorithm::rmrw);
  const GridKernel km = build_rmrw_grid_kernel(pp, eta, ax, Algorithm::mrw);
  const double rows = kr.row_sum_error(), db = kr.detailed_balance_residual();
  const double phi_r = s_conductance(kr, s).value, phi_m = s_conductance(km, s).value;
  const double A = 3.0, ov_eta = 1.0 / (400.0 * std::pow(2.0 * A + 1.0, 2.0));
  const CheckReport ov = kernel_overlap_sweep(population(1, 2.0, 4.0), ov_eta, A, 100, kSeed);
  return {rows <= kRowSumTol && db <= kDetailedBalanceTol && phi_r > kConductanceRatio * phi_m && ov.passed &&
              ov.instances == 100,
          "row err " + fmt("%.1e", rows) + ", balance " + fmt("%.1e", db) + ", phi_s rmrw " + fmt("%.3g", phi_r) + " mrw " + fmt("%.3g", phi_m) +
              ", overlap margin " + fmt("%.3g", ov.worst_margin) + " on " + std::to_string(ov.instances) + " pairs"};
}

Outcome mixing_scaling(Harness& h) {
  const Timed& t = h.run("scaling");
  const json& rep = t.result.report;
  std::string detail = "slope " + (rep.at("slope").is_null() ? std::string("NA") : fmt("%.3f", rep.at("slope").get<double>())) +
                       ", desk TV " + fmt("%.4f", rep.at("desk").at("tv").get<double>()) +
                       ", failed=" + failed_names(t.result) + ", time " + fmt("%.1fs", t.seconds);
  return {t.result.passed, detail};
}

Outcome tail_bounds(Harness& h) {
  double worst = INFINITY;
  bool ok = true;
  for (int d : {1, 2}) {
    for (double a : {0.0, 2.0}) {
      for (double beta : {4.0, 50.0}) {
        const CheckReport r = check_tail_bound(population(d, a, beta), {0.1, 0.01}, 3.0, d == 1 ? 2000 : 200);
        ok = ok && r.passed;
        worst = std::min(worst, r.worst_margin);
      }
    }
  }
  const Assertion* tr = find_assertion(h.run("figure1").result, "a=5: trace tail mass");
  const bool trace_ok = tr && tr->passed;
  return {ok && trace_ok, "quadrature min(eps - mass) " + fmt("%.3g", worst) + ", trace tail " +
                              (tr ? tr->observed.at("mass").dump() : std::string("missing"))};
}

Outcome empirical_process() {
  EmpiricalProcessConfig cfg;
  cfg.spec = MixtureSpec::along_first_axis(1, 1.0);
  cfg.seed = kSeed;
  const EmpiricalProcessResult res = empirical_process_run(cfg);
  bool ok = res.ratios.size() == 2;
  for (double q : res.ratios) ok = ok && q >= kRatioLo && q <= kRatioHi;
  ContaminationSpec noise;
  noise.kind = NoiseKind::point_mass;
  noise.location = Vector::Constant(1, 6.0);
  noise.K = 6.0;
  const CheckReport lin = contaminated_process_check(cfg, 4000, {0.0, 0.01, 0.02, 0.04}, noise);
  return {ok && lin.passed, "ratios " + json(res.ratios).dump() + ", extra deviation c1 " + fmt("%.4g", lin.details.at("c1").get<double>()) +
              " c2 " + fmt("%.4g", lin.details.at("c2").get<double>())};
}

Outcome determinism(Harness& h) {
  int files = 0;
  std::string mismatch;
  for (const auto& cmd : command_names()) {
    const Timed& a = h.run(cmd);
    const Timed b = h.rerun(cmd);
    if (a.result.manifest.hash() != b.result.manifest.hash()) mismatch += cmd + ":hash ";
    for (const auto& name : a.result.manifest.artifacts) {
      const auto ext = fs::path(name).extension();
      if (ext != ".csv" && ext != ".json") continue;
      ++files;
      if (slurp(h.dir(cmd, "run1") / name) != slurp(h.dir(cmd, "run2") / name)) mismatch += cmd + "/" + name + " ";
    }
  }
  return {mismatch.empty() && files > 0,
          std::to_string(files) + " CSV/JSON artifacts over " + std::to_string(command_names().size()) + " commands" +
              (mismatch.empty() ? "" : ", differing: " + mismatch)};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  Harness h(out);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"C1 separated mixture histograms", [&] { return separated_mixture(h); }},
      {"C2 reflection ablation", [&] { return reflection_ablation(h); }},
      {"C3 gradient/Hessian finite differences", derivative_oracle},
      {"C4 curvature floor", curvature_floor},
      {"C5 dissipativity", dissipativity},
      {"C6 Poincare machinery", poincare_machinery},
      {"C7 quasi-concave isoperimetry", isoperimetry},
      {"C8 population structure", structure},
      {"C9 exact kernels", exact_kernels},
      {"C10 mixing and scaling", [&] { return mixing_scaling(h); }},
      {"C11 tail bounds", [&] { return tail_bounds(h); }},
      {"C12 empirical process", empirical_process},
      {"C13 determinism", [&] { return determinism(h); }},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
