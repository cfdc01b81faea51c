#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace rmrw {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Observations, one sample per row.
using Dataset = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Symmetric two-component location mixture ½N(θ₀, I) + ½N(−θ₀, I).
struct MixtureSpec {
  Vector theta0;

  MixtureSpec() = default;
  explicit MixtureSpec(Vector mean);

  /// θ₀ = a·e₁ in dimension d.
  static MixtureSpec along_first_axis(int d, double a);

  int dim() const { return static_cast<int>(theta0.size()); }
  void validate() const;
};

enum class NoiseKind { gaussian, point_mass };

/// Contaminated data model Q = (1 − γ)P₀ + γF.
/// For `gaussian`, F = N(location, K²I); for `point_mass`, F = δ_location.
struct ContaminationSpec {
  double gamma = 0.0;
  NoiseKind kind = NoiseKind::gaussian;
  Vector location;
  double K = 1.0;

  void validate(int d) const;
};

/// log cosh(t), accurate for |t| far beyond the overflow point of cosh.
double logcosh(double t);

double density(const MixtureSpec& spec, const Vector& x);
double log_density(const MixtureSpec& spec, const Vector& x);

/// Draws n i.i.d. points. Every point consumes the same number of engine
/// draws whatever γ is, so changing γ only changes which points are noise.
Dataset sample_data(const MixtureSpec& spec,
                    const std::optional<ContaminationSpec>& contamination,
                    int n, std::uint64_t seed);

nlohmann::json to_json(const MixtureSpec& spec);
nlohmann::json to_json(const ContaminationSpec& c);
std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& s);

/// Writes `path` (CSV, d columns, 17 significant digits) and `path + ".json"`.
void save_dataset(const std::string& path, const Dataset& data, const MixtureSpec& spec,
                  const std::optional<ContaminationSpec>& contamination, std::uint64_t seed,
                  const std::string& manifest_hash = {});
Dataset load_dataset(const std::string& path);

}  // namespace rmrw
