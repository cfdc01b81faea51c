#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmrw/grid.hpp"
#include "rmrw/io.hpp"
#include "rmrw/sampler.hpp"

namespace rmrw {

/// Normalized cell masses of π (or π₀) on a 1-D or 2-D grid.
using ReferenceDensity = GridDensity;

/// R_ε = C(1 + ‖θ₀‖ + √(d + log(1/ε))/β).
double tail_radius(int d, double theta0_norm, double beta, double eps, double C = 1.0);

/// Cell masses ∝ exp(−U(centre)), or exp(−U₀(centre)) when `population`.
/// Each axis must contain [−R, R] with R = tail_radius(d, ‖θ₀‖, β, 0.001).
ReferenceDensity build_reference(const PowerPosterior& pp, std::vector<Axis> axes, bool population,
                                 int nodes = kDefaultQuadratureNodes);

/// Total variation between two densities on the same grid.
double tv_distance(const GridDensity& p, const GridDensity& q);

/// Counts of rows of `states` (from `burn_in` on) per reference cell; the
/// last entry counts points outside the grid.
std::vector<double> grid_counts(const Dataset& states, const GridDensity& ref, int burn_in = 0);

/// TV between the empirical law of post-burn-in states and ref. Points
/// outside the grid count as mass the reference does not have.
double tv_to_reference(const Dataset& states, const ReferenceDensity& ref, int burn_in);
double tv_to_reference(const std::vector<ChainTrace>& traces, const ReferenceDensity& ref, int burn_in);

/// Fraction of post-burn-in states with positive projection; zero projections count ½.
double mode_balance(const Dataset& states, const Vector& direction, int burn_in);

/// Fraction of post-burn-in states with ‖θ‖ > R.
double tail_mass(const Dataset& states, double R, int burn_in = 0);
/// Reference mass of cells whose centre has ‖θ‖ > R.
double tail_mass(const ReferenceDensity& ref, double R);

struct EssResult {
  Vector ess;
  std::vector<bool> degenerate;
  bool any_degenerate = false;
};

/// Per-coordinate ESS with Geyer's initial positive (monotone) sequence.
EssResult ess(const Dataset& states, int burn_in);

/// 0, 1, 2, 3, 5, 7, 11, ... (ratio ≈ 1.5, strictly increasing) up to max_steps.
std::vector<int> checkpoint_schedule(int max_steps, double ratio = 1.5);

struct MixingCurve {
  std::vector<int> checkpoints;
  std::vector<double> tv;
  int chains = 0;
  int coarsen = 1;
  bool stopped_early = false;
};

struct MixingOptions {
  int chains = 500;
  int max_steps = 100000;
  /// Adjacent reference cells merged per axis before comparing.
  int coarsen = 1;
  int jobs = 0;
  /// Stop once TV drops below this level; 0 runs the whole schedule.
  double stop_below = 0.0;
};

/// TV between the across-chain law at each checkpoint and ref. Chain k uses
/// seed config.seed + k and config.init.
MixingCurve mixing_curve(const PowerPosterior& pp, const SamplerConfig& config,
                         const ReferenceDensity& ref, const MixingOptions& opt);

/// First checkpoint whose TV is below eps.
std::optional<int> first_below(const MixingCurve& curve, double eps);

/// Requires ≥ 50 chains.
std::optional<int> mixing_time_estimate(const PowerPosterior& pp, const SamplerConfig& config,
                                        const ReferenceDensity& ref, double eps,
                                        const MixingOptions& opt);

/// Merges `factor` adjacent cells per axis; factor must divide each cell count.
GridDensity coarsen(const GridDensity& gd, int factor);

/// Histogram of projections with bins [k·width, (k+1)·width), padded by
/// one empty bin on each side.
BarSeries projection_histogram(const Dataset& states, const Vector& direction, int burn_in,
                               double width = 0.25);

struct ModeSummary {
  std::vector<double> centers;
  std::vector<double> heights;
  int count() const { return static_cast<int>(centers.size()); }
};

/// Centred moving average; bins past either end count as zero.
std::vector<double> moving_average(const std::vector<double>& counts, int window);

/// Local maxima of the `window`-bin moving average; plateaus count once and
/// peaks below rel_floor × the global maximum are ignored.
ModeSummary detect_modes(const BarSeries& hist, int window = 3, double rel_floor = 0.01);

struct DiagnosticsReport {
  std::optional<double> tv_to_reference;
  double mode_balance = 0.5;
  Vector ess_per_coordinate;
  bool ess_degenerate = false;
  double tail_radius = 0.0;
  double tail_mass = 0.0;
  std::optional<int> mixing_time;
  double mixing_eps = 0.0;
  double acceptance_rate = 0.0;
};

nlohmann::json to_json(const DiagnosticsReport& r);

}  // namespace rmrw
