#pragma once

#include <string>
#include <vector>

#include "rmrw/mixture.hpp"
#include "rmrw/quadrature.hpp"

namespace rmrw {

inline constexpr int kDefaultQuadratureNodes = 64;
inline constexpr int kOracleQuadratureNodes = 256;
inline constexpr int kMaxHessianDim = 20;

enum class PriorKind { uniform_improper, gaussian };

/// λ(θ) = 1, or the N(0, σ²I) density.
struct PriorSpec {
  PriorKind kind = PriorKind::uniform_improper;
  double sigma = 1.0;

  static PriorSpec uniform() { return {}; }
  static PriorSpec gaussian(double sigma) { return {PriorKind::gaussian, sigma}; }

  void validate() const;
  /// −log λ(θ) without its constant.
  double penalty(const Vector& theta) const;
  /// 1/σ² for the gaussian prior, 0 otherwise.
  double precision() const;
};

nlohmann::json to_json(const PriorSpec& prior);

/// Target π(θ) ∝ exp(−U(θ)) with
///   U(θ) = β(‖θ‖²/2 − (1/n) Σᵢ logcosh(θᵀXᵢ)) − log λ(θ).
/// Immutable after construction. An empty dataset is allowed; only the
/// population operations are usable then.
class PowerPosterior {
 public:
  PowerPosterior(Dataset data, double beta, PriorSpec prior, MixtureSpec spec);

  static PowerPosterior population(MixtureSpec spec, double beta,
                                   PriorSpec prior = PriorSpec::uniform());

  int dim() const { return spec_.dim(); }
  int n() const { return static_cast<int>(data_.rows()); }
  double beta() const { return beta_; }
  const PriorSpec& prior() const { return prior_; }
  const MixtureSpec& spec() const { return spec_; }
  const Dataset& data() const { return data_; }

  /// Non-fatal conditions found at construction, e.g. β > n.
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  Dataset data_;
  double beta_;
  PriorSpec prior_;
  MixtureSpec spec_;
  std::vector<std::string> warnings_;
};

double empirical_potential(const PowerPosterior& pp, const Vector& theta);
Vector empirical_gradient(const PowerPosterior& pp, const Vector& theta);

/// U₀(θ) = β(‖θ‖²/2 − E logcosh(θᵀX)) − log λ(θ), using
/// E logcosh(θᵀX) = E logcosh(θᵀθ₀ + ‖θ‖Z).
double population_potential(const PowerPosterior& pp, const Vector& theta,
                            int nodes = kDefaultQuadratureNodes);
Vector population_gradient(const PowerPosterior& pp, const Vector& theta,
                           int nodes = kDefaultQuadratureNodes);
/// Requires d ≤ kMaxHessianDim.
Matrix population_hessian(const PowerPosterior& pp, const Vector& theta,
                          int nodes = kDefaultQuadratureNodes);

/// ⟨∇U(θ), θ⟩ − [(β/2)‖θ‖² − 2β(‖θ₀‖² + 1)] when `empirical`,
/// ⟨∇U₀(θ), θ⟩ − [(β/2)‖θ‖² − β(‖θ₀‖² + 1)] otherwise.
double dissipativity_margin(const PowerPosterior& pp, const Vector& theta, bool empirical,
                            int nodes = kDefaultQuadratureNodes);

}  // namespace rmrw
