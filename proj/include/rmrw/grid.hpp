#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "rmrw/sampler.hpp"

namespace rmrw {

/// m equal cells covering [lo, hi].
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int m = 1;

  Axis() = default;
  Axis(double lo_, double hi_, int m_);

  double width() const { return (hi - lo) / m; }
  double center(int i) const { return lo + (i + 0.5) * width(); }
  double edge(int i) const { return lo + i * width(); }
  /// Cell containing x, or −1 when x is outside [lo, hi].
  int cell_of(double x) const;
};

nlohmann::json to_json(const Axis& a);

/// Probability masses on a 1-D or 2-D lattice. Cells are stored row-major:
/// flat index = i·m₂ + j with i along axis 0.
class GridDensity {
 public:
  /// logmass is unnormalized; −∞ entries mean zero mass.
  static GridDensity from_logmass(std::vector<Axis> axes, std::vector<double> logmass);
  /// f(center) returns an unnormalized log mass for each cell.
  static GridDensity from_log_function(std::vector<Axis> axes,
                                       const std::function<double(const Vector&)>& f);

  int dim() const { return static_cast<int>(axes_.size()); }
  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(int k) const { return axes_.at(k); }
  std::size_t cells() const { return mass_.size(); }
  std::size_t index(int i, int j = 0) const;
  Vector center(std::size_t flat) const;

  const std::vector<double>& mass() const { return mass_; }
  /// Normalized log mass.
  const std::vector<double>& logmass() const { return logmass_; }
  double mass_at(int i, int j = 0) const { return mass_[index(i, j)]; }

  /// 1-D marginal along axis k of a 2-D density.
  GridDensity marginal(int k) const;
  /// 1-D conditional along axis 1 at axis-0 cell i of a 2-D density.
  GridDensity conditional(int i) const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> logmass_;
  std::vector<double> mass_;
};

/// Transition matrix over the cells of a 1-D grid with its stationary masses.
struct GridKernel {
  Axis axis;
  Matrix T;
  Vector pi;
  Algorithm algorithm = Algorithm::rmrw;
  double eta = 0.0;

  /// max_i |Σ_j T_ij − 1|.
  double row_sum_error() const;
  /// max_ij |π_i T_ij − π_j T_ji|.
  double detailed_balance_residual() const;
  /// ‖πT − π‖₁.
  double stationarity_residual() const;
  /// Largest |λ| over all eigenvalues except the leading 1.
  double second_eigenvalue_modulus() const;
};

/// P(N(mu, sigma²) ∈ [a, b]) evaluated through erfc on the far side of mu.
double gaussian_interval_mass(double mu, double sigma, double a, double b);

/// Cell-to-cell MH kernel for the 1-D proposal of `alg` with acceptance
/// min(1, π_j/π_i) at cell centres. Proposals leaving the grid are rejected.
GridKernel build_grid_kernel(const GridDensity& gd, double eta, Algorithm alg);

struct ConductanceResult {
  double value = 0.0;
  double set_mass = 0.0;
  double flow = 0.0;
  std::vector<std::pair<int, int>> witness;  // cell intervals [first, last]
  bool found = false;
};

/// min flow(S→Sᶜ)/(π(S) − s) over intervals and symmetric interval pairs
/// I ∪ −I with s < π(S) ≤ ½.
ConductanceResult s_conductance(const GridKernel& gk, double s);

}  // namespace rmrw
