// Command line front end. Exit codes: 0 all assertions pass, 1 an assertion
// failed (or the run aborted), 2 usage error.
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmrw/experiments.hpp"

namespace {

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw rmrw::UsageError("bad list entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw rmrw::UsageError("empty list");
  return out;
}

struct Common {
  std::uint64_t seed = rmrw::kDefaultSeed;
  std::string out;
  int jobs = 0;
  std::string config;
  std::optional<double> eta, beta, a;
  std::optional<int> steps, d, n;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master seed");
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--jobs", c.jobs, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  sub->add_option("--config", c.config, "JSON config file; flags take precedence")->check(CLI::ExistingFile);
  sub->add_option("--eta", c.eta, "Step size");
  sub->add_option("--steps", c.steps, "Chain length");
  sub->add_option("--beta", c.beta, "Power-posterior inverse temperature");
  sub->add_option("--a", c.a, "Separation |theta0|");
  sub->add_option("--d", c.d, "Dimension");
  sub->add_option("--n", c.n, "Sample size");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflected Metropolis random walk experiments"};
  app.set_version_flag("--version", rmrw::tool_version());
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"figure1", "Histograms of the separated and unseparated posteriors"},
      {"ablation", "Reflection on/off from a one-mode start"},
      {"contamination", "Diagnostics under Huber contamination"},
      {"scaling", "Mixing-time sweep over dimension and separation"},
      {"validate-theory", "Numerical checks of the analytic inequalities"},
      {"sample", "Raw chain runs"},
      {"generate-data", "Draw a dataset from the mixture"}};
  Common common;
  std::string suites, gammas, d_list, a_list, algorithm, data, noise;
  std::optional<double> K, gamma;
  std::optional<int> chains;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, common);
    subs[name] = sub;
  }
  subs["validate-theory"]->add_option("--suites", suites, "Comma separated suite names or 'all'");
  subs["contamination"]->add_option("--gammas", gammas, "Comma separated contamination levels");
  subs["contamination"]->add_option("--K", K, "Sub-Gaussian scale of the noise");
  subs["scaling"]->add_option("--d-list", d_list, "Comma separated dimensions");
  subs["scaling"]->add_option("--a-list", a_list, "Comma separated separations");
  subs["scaling"]->add_option("--chains", chains, "Parallel chains per estimate");
  subs["sample"]->add_option("--algorithm", algorithm, "rmrw or mrw");
  subs["sample"]->add_option("--data", data, "Dataset CSV from generate-data")->check(CLI::ExistingFile);
  subs["sample"]->add_option("--chains", chains, "Independent chains");
  subs["generate-data"]->add_option("--gamma", gamma, "Contamination level");
  subs["generate-data"]->add_option("--noise", noise, "gaussian or point_mass");
  subs["generate-data"]->add_option("--K", K, "Noise scale");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    rmrw::RunContext ctx;
    ctx.seed = common.seed;
    ctx.jobs = common.jobs;
    ctx.out_dir = common.out.empty() ? "out/" + name : common.out;
    if (!common.config.empty()) ctx.config_file = rmrw::read_json(common.config);
    nlohmann::json& f = ctx.flags;
    if (common.eta) f["eta"] = *common.eta;
    if (common.steps) f["steps"] = *common.steps;
    if (common.beta) f["beta"] = *common.beta;
    if (common.a) f["a"] = *common.a;
    if (common.d) f["d"] = *common.d;
    if (common.n) f["n"] = *common.n;
    if (!suites.empty()) {
      std::vector<std::string> list;
      std::stringstream ss(suites);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) list.push_back(item);
      }
      f["suites"] = list;
    }
    if (!gammas.empty()) f["gamma_list"] = parse_list(gammas);
    if (K) f["K"] = *K;
    if (gamma) f["gamma"] = *gamma;
    if (!noise.empty()) f["noise"] = noise;
    if (!d_list.empty()) {
      std::vector<int> ds;
      for (double v : parse_list(d_list)) ds.push_back(static_cast<int>(v));
      f["d_list"] = ds;
    }
    if (!a_list.empty()) f["a_list"] = parse_list(a_list);
    if (chains) f["chains"] = *chains;
    if (!algorithm.empty()) f["algorithm"] = algorithm;
    if (!data.empty()) f["data"] = data;

    const rmrw::ExperimentResult res = rmrw::run_command(name, ctx);
    for (const auto& a : res.assertions) {
      std::cout << (a.passed ? "PASS " : "FAIL ") << a.name << "  observed=" << a.observed.dump()
                << "  expected " << a.expected << '\n';
    }
    std::cout << name << ": " << (res.passed ? "PASS" : "FAIL") << " (" << ctx.out_dir << ", manifest "
              << res.manifest.hash() << ")\n";
    return res.passed ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
