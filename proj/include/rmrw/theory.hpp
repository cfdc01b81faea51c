#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmrw/diagnostics.hpp"
#include "rmrw/grid.hpp"
#include "rmrw/spectral.hpp"

namespace rmrw {

/// Absolute tolerance on check margins.
inline constexpr double kCheckTol = 1e-8;

/// Signed worst margin over the tested instances; margin ≥ −tol means the
/// inequality held everywhere.
struct CheckReport {
  std::string check;
  std::uint64_t seed = 0;
  int instances = 0;
  int skipped = 0;
  double worst_margin = 0.0;
  double tol = kCheckTol;
  bool passed = false;
  nlohmann::json witness;
  nlohmann::json details;

  void finish() { passed = instances > 0 && worst_margin >= -tol; }
};

nlohmann::json to_json(const CheckReport& r);

// ---- Poincaré combination ------------------------------------------------

struct PoincareCombinationInput {
  double C1 = 0.0;  // marginal constant along axis 0
  double C2 = 0.0;  // conditional constant along axis 1, uniform over axis-0 cells
  double L = 0.0;   // sup |∂_{x₀} log π(x₁ | x₀)|

  void validate() const;
  /// 2(C₁ + C₂ + C₁C₂L²).
  double bound() const;
};

struct PoincareCombinationTerms {
  PoincareCombinationInput input;
  double C_joint = 0.0;
  int worst_column = -1;
};

/// Requires every axis-0 column to carry positive mass.
PoincareCombinationTerms poincare_combination_terms(const GridDensity& joint);
CheckReport check_poincare_combination(const GridDensity& joint);

// ---- One-dimensional isoperimetry -----------------------------------------

/// Masses rise then fall: the worst violation of that pattern, as a margin.
double unimodality_margin(const std::vector<double>& mass);

/// Random partitions of the grid into consecutive pieces labelled S₁, S₂, S₃;
/// margin π(S₃) − dist(S₁,S₂)/A · min(π(S₁), π(S₂)). With `require_unimodal`
/// a density failing the unimodality pre-check is rejected.
CheckReport check_quasiconcave_isoperimetry(const GridDensity& gd, int partitions, std::uint64_t seed,
                                            bool require_unimodal = true);

/// Poincaré constant against 4/ζ² and the Buser-direction quantity
/// 10√d(ζ√K + ζ²) − 1/C on 1-D densities; K is the curvature floor of −log π.
CheckReport check_cheeger_inequality(const std::vector<GridDensity>& densities);
CheckReport observe_buser_direction(const std::vector<GridDensity>& densities);

/// Random 1-D densities: mixtures of 1–3 Gaussians on [−8, 8].
std::vector<GridDensity> random_densities_1d(int count, int cells, std::uint64_t seed);
/// Random smooth non-product 2-D log-densities on [−4, 4]².
std::vector<GridDensity> random_densities_2d(int count, int cells, std::uint64_t seed);
/// Random unimodal 1-D densities on [0, A].
std::vector<GridDensity> random_unimodal_densities(int count, int cells, double A, std::uint64_t seed);

// ---- Population structure --------------------------------------------------

/// d = 2, θ₀ = a₀e₁. Builds π₀ ∝ e^{−U₀} on axis0 × axis1 (axis0 ⊂ [0, ∞)) and
/// checks the x₁-marginal is unimodal (tol 1e−9) and each column is log-concave
/// (second differences of log mass ≤ 1e−8). Needs ≥ 200 cells per axis.
CheckReport check_structure(const PowerPosterior& pp, const Axis& axis0, const Axis& axis1,
                            int nodes = kDefaultQuadratureNodes);

/// For θ = ae₁ + z: margin of "∂U₀/∂a ≤ 0 on [0, a₀] and ≥ 0 beyond" when
/// `minimum_at_a0`, otherwise of "∂U₀/∂a changes sign at most once, from − to +".
/// Also checks convexity of z ↦ U₀(ae₁ + z) along random lines.
CheckReport check_convex_quasiconcave(const PowerPosterior& pp, const std::vector<Vector>& offsets,
                                      bool minimum_at_a0, double a_max = 8.0, int a_points = 400);

// ---- Exact kernels ---------------------------------------------------------

/// Grid RMRW (or MRW) kernel for a 1-D posterior; π uses U, or U₀ when the
/// posterior has no data. The grid must cover [−R_{0.001}, R_{0.001}].
GridKernel build_rmrw_grid_kernel(const PowerPosterior& pp, double eta, const Axis& axis,
                                  Algorithm alg = Algorithm::rmrw);

struct KernelOverlap {
  double rejection_x = 0.0;
  double rejection_y = 0.0;
  double tv_proposal = 0.0;  // TV(T_x, P_x)
  double tv_pair = 0.0;      // TV(T_x, T_y)
  double kl_gaussian = 0.0;  // KL(N(x, η), N(y, η))
  double pinsker = 0.0;      // √(KL/2)
};

/// Exact 1-D kernels of U₀ integrated numerically.
KernelOverlap kernel_overlap(const PowerPosterior& pp, double eta, double x, double y,
                             int nodes = kDefaultQuadratureNodes);

enum class OverlapCondition {
  both,    // max(|x − y|, |x + y|) ≤ √η/10
  either,  // min(|x − y|, |x + y|) ≤ √η/10
};

/// Bounds TV(T_x, P_x) ≤ 1/10 and TV(T_x, T_y) ≤ 1/2; pairs violating the
/// preconditions are counted as skipped.
CheckReport check_kernel_overlap(const PowerPosterior& pp, double eta, double x, double y,
                                 double A, OverlapCondition cond = OverlapCondition::both);
CheckReport kernel_overlap_sweep(const PowerPosterior& pp, double eta, double A, int pairs,
                                 std::uint64_t seed, OverlapCondition cond = OverlapCondition::both);

// ---- Empirical process -----------------------------------------------------

/// θ-grid on [−A, A] × B(0, M) for d ≤ 3 with `points` per axis.
std::vector<Vector> theta_grid(int d, double A, double M, int points);

/// sup over the grid of |P_n g_θ − P₀ g_θ|, g_θ = log f_θ.
double sup_deviation(const Dataset& data, const MixtureSpec& spec, const std::vector<Vector>& grid,
                     int nodes = kDefaultQuadratureNodes);

struct EmpiricalProcessConfig {
  MixtureSpec spec;
  double A = 3.0;
  double M = 3.0;
  std::vector<int> n_list{250, 1000, 4000};
  int reps = 50;
  std::uint64_t seed = 0;
  int grid_points = 121;
  int jobs = 0;
};

struct EmpiricalProcessResult {
  std::vector<int> n;
  std::vector<double> mean_deviation;
  Matrix deviations;  // reps × |n_list|
  double slope = 0.0;
  std::vector<double> ratios;  // mean_deviation[k+1] / mean_deviation[k]
};

EmpiricalProcessResult empirical_process_run(const EmpiricalProcessConfig& cfg);
/// PASS iff the fitted log-log slope lies in [−0.65, −0.35].
CheckReport empirical_process_sweep(const EmpiricalProcessConfig& cfg);

struct ContaminatedProcessResult {
  std::vector<double> gammas;
  std::vector<double> extra;  // mean sup-deviation minus its γ = 0 value
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
};

/// Same samples for every γ; only which points are noise changes.
ContaminatedProcessResult contaminated_process_run(const EmpiricalProcessConfig& cfg, int n,
                                                   const std::vector<double>& gammas,
                                                   const ContaminationSpec& noise);
/// PASS iff c₁ > 0 and |c₂|·γ_max ≤ ¼c₁.
CheckReport contaminated_process_check(const EmpiricalProcessConfig& cfg, int n,
                                       const std::vector<double>& gammas,
                                       const ContaminationSpec& noise);

// ---- Dissipativity ---------------------------------------------------------

/// Uniform draw from B(0, radius).
Vector uniform_in_ball(int d, double radius, Rng& rng);

/// min over `samples` uniform θ ∈ B(0, radius) of dissipativity_margin + slack.
CheckReport check_dissipativity_field(const PowerPosterior& pp, bool empirical, double radius,
                                      int samples, std::uint64_t seed, double slack = 0.0);

/// (d + ‖θ₀‖²) log((d + ‖θ₀‖²)/δ), rounded up.
int tail_sample_size(int d, double theta0_norm, double delta);

struct DissipativityReplicationConfig {
  MixtureSpec spec;
  double beta = 1.0;
  std::optional<ContaminationSpec> contamination;
  int n = 0;  // 0: tail_sample_size(d, ‖θ₀‖, delta)
  int reps = 100;
  int samples = 10000;
  double radius = 20.0;
  double delta = 0.05;
  double required_fraction = 0.95;
  std::uint64_t seed = 0;
  int jobs = 0;
};

/// Empirical margins per replication; contaminated runs add the slack
/// 2βγdK² log(n/δ). PASS iff the passing fraction ≥ required_fraction.
CheckReport dissipativity_replications(const DissipativityReplicationConfig& cfg);

// ---- Curvature and tails ---------------------------------------------------

/// min eigenvalue of ∇²U₀(θ) + β‖θ₀‖² over `samples` uniform θ ∈ B(0, radius).
CheckReport check_curvature_floor(const PowerPosterior& pp, double radius, int samples,
                                  std::uint64_t seed);

/// ε − π₀(‖θ‖ > R_ε) per ε, with R_ε = tail_radius(d, ‖θ₀‖, β, ε, C); d ≤ 2.
CheckReport check_tail_bound(const PowerPosterior& pp, const std::vector<double>& eps_list,
                             double C, int cells);

// ---- Cheeger scaling observation ---------------------------------------------

/// ζ (2-D cut-family upper bound) of π₀ on [0, A] × [−M, M], times √d·A⁵M².
CheckReport observe_cheeger_scaling(const std::vector<double>& a0_list,
                                    const std::vector<double>& AM_list, double beta, int cells);

}  // namespace rmrw
