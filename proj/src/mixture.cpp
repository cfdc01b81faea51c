#include "rmrw/mixture.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rmrw/io.hpp"
#include "rmrw/random.hpp"

namespace rmrw {

namespace {

void check_dim(const MixtureSpec& spec, const Vector& x) {
  if (x.size() != spec.theta0.size()) {
    throw std::invalid_argument("dimension mismatch: point has " + std::to_string(x.size()) +
                                " entries, model has d=" + std::to_string(spec.dim()));
  }
}

}  // namespace

MixtureSpec::MixtureSpec(Vector mean) : theta0(std::move(mean)) { validate(); }

MixtureSpec MixtureSpec::along_first_axis(int d, double a) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  Vector t = Vector::Zero(d);
  t(0) = a;
  return MixtureSpec(t);
}

void MixtureSpec::validate() const {
  if (theta0.size() < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!theta0.allFinite()) throw std::invalid_argument("theta0 must be finite");
}

void ContaminationSpec::validate(int d) const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (!(K > 0.0) || !std::isfinite(K)) throw std::invalid_argument("K must be positive");
  if (location.size() != d) throw std::invalid_argument("noise location has wrong dimension");
  if (!location.allFinite()) throw std::invalid_argument("noise location must be finite");
}

double logcosh(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double density(const MixtureSpec& spec, const Vector& x) {
  check_dim(spec, x);
  const double d = spec.dim();
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * d);
  const double plus = std::exp(-0.5 * (x - spec.theta0).squaredNorm());
  const double minus = std::exp(-0.5 * (x + spec.theta0).squaredNorm());
  return norm * 0.5 * (plus + minus);
}

double log_density(const MixtureSpec& spec, const Vector& x) {
  check_dim(spec, x);
  const double d = spec.dim();
  return -0.5 * d * std::log(2.0 * std::numbers::pi) -
         0.5 * (x.squaredNorm() + spec.theta0.squaredNorm()) + logcosh(spec.theta0.dot(x));
}

Dataset sample_data(const MixtureSpec& spec,
                    const std::optional<ContaminationSpec>& contamination, int n,
                    std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const int d = spec.dim();
  if (contamination) contamination->validate(d);

  Rng rng = make_rng(seed, Stream::data);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset data(n, d);
  Vector clean(d), noise(d);
  for (int i = 0; i < n; ++i) {
    const double u = unif(rng);
    const double sign = unif(rng) < 0.5 ? -1.0 : 1.0;
    for (int k = 0; k < d; ++k) clean(k) = sign * spec.theta0(k) + normal(rng);
    for (int k = 0; k < d; ++k) noise(k) = normal(rng);

    if (contamination && u < contamination->gamma) {
      if (contamination->kind == NoiseKind::point_mass) {
        data.row(i) = contamination->location.transpose();
      } else {
        data.row(i) = (contamination->location + contamination->K * noise).transpose();
      }
    } else {
      data.row(i) = clean.transpose();
    }
  }
  return data;
}

std::string to_string(NoiseKind kind) {
  return kind == NoiseKind::gaussian ? "gaussian" : "point_mass";
}

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "gaussian") return NoiseKind::gaussian;
  if (s == "point_mass") return NoiseKind::point_mass;
  throw std::invalid_argument("unknown noise kind '" + s + "'");
}

nlohmann::json to_json(const MixtureSpec& spec) {
  return {{"d", spec.dim()}, {"theta0", std::vector<double>(spec.theta0.begin(), spec.theta0.end())}};
}

nlohmann::json to_json(const ContaminationSpec& c) {
  return {{"gamma", c.gamma},
          {"noise", to_string(c.kind)},
          {"location", std::vector<double>(c.location.begin(), c.location.end())},
          {"K", c.K}};
}

void save_dataset(const std::string& path, const Dataset& data, const MixtureSpec& spec,
                  const std::optional<ContaminationSpec>& contamination, std::uint64_t seed,
                  const std::string& manifest_hash) {
  CsvWriter csv(path, manifest_hash);
  std::vector<std::string> header;
  for (int k = 0; k < data.cols(); ++k) header.push_back("x" + std::to_string(k + 1));
  csv.header(header);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    csv.row(std::vector<double>(data.row(i).begin(), data.row(i).end()));
  }

  nlohmann::json side = {{"n", data.rows()},
                         {"spec", to_json(spec)},
                         {"seed", seed},
                         {"contamination", contamination ? to_json(*contamination) : nlohmann::json(nullptr)}};
  if (!manifest_hash.empty()) side["manifest_hash"] = manifest_hash;
  write_json(path + ".json", side);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged row in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("no samples in " + path);
  Dataset data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < rows[i].size(); ++k) data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return data;
}

}  // namespace rmrw
