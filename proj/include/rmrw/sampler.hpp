#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmrw/potential.hpp"
#include "rmrw/random.hpp"

namespace rmrw {

enum class Algorithm { rmrw, mrw };
enum class InitKind { standard_gaussian, fixed };

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct SamplerConfig {
  double eta = 1e-2;
  int steps = 1000;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::rmrw;
  InitKind init = InitKind::standard_gaussian;
  Vector init_point;  // used when init == fixed

  void validate(int d) const;
};

nlohmann::json to_json(const SamplerConfig& c);

/// States are rows 0..T of `states`; flags are indexed by step 1..T at
/// positions 0..T−1.
struct ChainTrace {
  Dataset states;
  std::vector<std::uint8_t> accepted;
  std::vector<std::uint8_t> reflected;
  double acceptance_rate = 0.0;
  std::uint64_t seed = 0;

  int steps() const { return static_cast<int>(accepted.size()); }
  int dim() const { return static_cast<int>(states.cols()); }
};

struct StepResult {
  Vector next;
  double potential = 0.0;  // U(next)
  bool accepted = false;
  bool reflected = false;
};

/// η_s = 1/(400(A + M + √d)²), A = M = C(1 + ‖θ₀‖ + √(d + log(1/s))/β).
double default_step_size(int d, double theta0_norm, double beta, double s, double C = 1.0);

/// q(y | x) for the proposal of `alg`; symmetric in (x, y) for both.
double proposal_density(const Vector& x, const Vector& y, double eta, Algorithm alg);

/// One step from θ whose potential u_theta is already known.
/// Draw order: d normals, then the reflection coin (rmrw only), then the
/// acceptance uniform.
StepResult mh_step(const PowerPosterior& pp, const Vector& theta, double u_theta, double eta,
                   Algorithm alg, Rng& rng);

/// Perturb by √η·ξ, flip the sign with probability ½, accept with
/// probability min(1, exp(U(θ) − U(Z))).
StepResult rmrw_step(const PowerPosterior& pp, const Vector& theta, double eta, Rng& rng);
StepResult mrw_step(const PowerPosterior& pp, const Vector& theta, double eta, Rng& rng);

/// Starting state per config, drawn from the chain stream when random.
Vector initial_state(const SamplerConfig& config, int d, Rng& rng);

ChainTrace run_chain(const PowerPosterior& pp, const SamplerConfig& config);

/// States at the requested (sorted, nonnegative) times only; one row per time.
Dataset run_chain_snapshots(const PowerPosterior& pp, const SamplerConfig& config,
                            const std::vector<int>& times);

struct MultiChainResult {
  std::vector<ChainTrace> chains;
  double mean_acceptance = 0.0;
  double min_acceptance = 0.0;
  double max_acceptance = 0.0;
};

/// Chain k runs run_chain with seed config.seed + k.
MultiChainResult run_multichain(const PowerPosterior& pp, const SamplerConfig& config, int chains,
                                int jobs = 0);

/// CSV with columns step, theta1..thetad, accepted, reflected (row 0 has empty flags).
void save_trace(const std::string& path, const ChainTrace& trace,
                const std::string& manifest_hash = {});

}  // namespace rmrw
