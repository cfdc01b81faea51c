#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rmrw/diagnostics.hpp"
#include "rmrw/io.hpp"
#include "rmrw/mixture.hpp"

namespace rmrw {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

std::string tool_version();

/// Bad command line or config input; the CLI maps it to exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Deterministic description of one command run. The hash covers the
/// experiment id, resolved config, seed and tool version; wall-clock time is
/// kept out of every CSV/JSON artifact and written to wall_clock.txt.
struct ExperimentManifest {
  std::string experiment;
  nlohmann::json config;
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir;
  std::vector<std::string> artifacts;
  double wall_clock_seconds = 0.0;

  std::string hash() const;
  nlohmann::json to_json() const;
};

struct RunContext {
  std::string out_dir = "out";
  std::uint64_t seed = kDefaultSeed;
  int jobs = 0;
  /// Merged over the command's defaults with JSON merge-patch semantics.
  nlohmann::json config_file = nlohmann::json::object();
  nlohmann::json flags = nlohmann::json::object();
};

struct Assertion {
  std::string name;
  bool passed = false;
  nlohmann::json observed;
  std::string expected;
};

nlohmann::json to_json(const Assertion& a);

struct ExperimentResult {
  bool passed = false;
  std::vector<Assertion> assertions;
  nlohmann::json report;
  ExperimentManifest manifest;
};

/// Defaults for figure1, ablation, contamination, scaling, validate-theory,
/// sample and generate-data.
nlohmann::json default_config(const std::string& experiment);

/// defaults ← config file ← flags. Flag keys a/d also replace a_list/d_list
/// where the command sweeps over lists. Unknown keys are rejected.
nlohmann::json resolve_config(const std::string& experiment, const nlohmann::json& config_file,
                              const nlohmann::json& flags);

/// Writes artifacts stamped with one manifest hash and records their names.
class ArtifactSink {
 public:
  ArtifactSink(std::string out_dir, std::string hash);

  const std::string& hash() const { return hash_; }
  std::string path(const std::string& name);
  CsvWriter csv(const std::string& name);
  void json(const std::string& name, nlohmann::json j);
  void svg_bars(const std::string& name, const BarSeries& s, const std::string& title,
                const std::string& xlabel);
  void svg_lines(const std::string& name, const std::vector<double>& x,
                 const std::vector<std::vector<double>>& ys, const std::vector<std::string>& labels,
                 const std::string& title);
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::string dir_;
  std::string hash_;
  std::vector<std::string> files_;
};

// ---- Shared single-chain case ----------------------------------------------

struct ProjectionCheck {
  BarSeries histogram;
  ModeSummary modes;
};

struct MixtureRunConfig {
  int d = 10;
  int n = 100;
  double beta = 8.0;
  double a = 5.0;
  double eta = 0.01;
  int steps = 100000;
  int burn_in = 10000;
  double bin_width = 0.25;
  int smoothing = 3;
  double rel_floor = 0.01;
  double tail_C = 3.0;
  double tail_eps = 0.01;
};

MixtureRunConfig mixture_run_config(const nlohmann::json& cfg, double a);

struct MixtureRun {
  ChainTrace trace;
  ProjectionCheck e1, e2;
  DiagnosticsReport diagnostics;
};

/// Data from `seed`, one RMRW chain from a standard Gaussian start with the
/// same seed, e₁/e₂ projection histograms and diagnostics.
MixtureRun run_mixture_case(const MixtureRunConfig& cfg, const std::optional<ContaminationSpec>& noise,
                            std::uint64_t seed);

/// Bimodal e₁ with opposite-sign peaks of |centre| ∈ [3, 7], balance in
/// [0.4, 0.6] and unimodal e₂.
std::vector<Assertion> separated_case_assertions(const MixtureRun& run, const std::string& prefix);

// ---- Commands ----------------------------------------------------------------

ExperimentResult cmd_figure1(const RunContext& ctx);
ExperimentResult cmd_ablation(const RunContext& ctx);
ExperimentResult cmd_contamination(const RunContext& ctx);
ExperimentResult cmd_scaling(const RunContext& ctx);
ExperimentResult cmd_validate_theory(const RunContext& ctx);
ExperimentResult cmd_sample(const RunContext& ctx);
ExperimentResult cmd_generate_data(const RunContext& ctx);

ExperimentResult run_command(const std::string& name, const RunContext& ctx);
std::vector<std::string> command_names();

/// Suite names accepted by validate-theory.
std::vector<std::string> theory_suite_names();

}  // namespace rmrw
