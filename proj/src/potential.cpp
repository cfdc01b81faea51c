#include "rmrw/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace rmrw {

namespace {

void check_dim(const PowerPosterior& pp, const Vector& theta) {
  if (theta.size() != pp.dim()) {
    throw std::invalid_argument("theta has dimension " + std::to_string(theta.size()) +
                                ", posterior has " + std::to_string(pp.dim()));
  }
  if (!theta.allFinite()) throw std::invalid_argument("theta must be finite");
}

void check_nonempty(const PowerPosterior& pp) {
  if (pp.n() == 0) throw std::invalid_argument("empirical potential needs a nonempty dataset");
}

LogcoshMoments moments_at(const PowerPosterior& pp, const Vector& theta, int nodes) {
  return gaussian_logcosh_moments(theta.dot(pp.spec().theta0), theta.norm(), nodes);
}

}  // namespace

void PriorSpec::validate() const {
  if (kind == PriorKind::gaussian && !(sigma > 0.0 && std::isfinite(sigma))) {
    throw std::invalid_argument("gaussian prior needs a finite sigma > 0");
  }
}

double PriorSpec::penalty(const Vector& theta) const {
  return kind == PriorKind::gaussian ? 0.5 * theta.squaredNorm() / (sigma * sigma) : 0.0;
}

double PriorSpec::precision() const {
  return kind == PriorKind::gaussian ? 1.0 / (sigma * sigma) : 0.0;
}

nlohmann::json to_json(const PriorSpec& prior) {
  if (prior.kind == PriorKind::gaussian) return {{"kind", "gaussian"}, {"sigma", prior.sigma}};
  return {{"kind", "uniform_improper"}};
}

PowerPosterior::PowerPosterior(Dataset data, double beta, PriorSpec prior, MixtureSpec spec)
    : data_(std::move(data)), beta_(beta), prior_(prior), spec_(std::move(spec)) {
  spec_.validate();
  prior_.validate();
  if (!(beta_ > 0.0) || !std::isfinite(beta_)) {
    throw std::invalid_argument("beta must be finite and > 0");
  }
  if (data_.rows() > 0 && data_.cols() != spec_.dim()) {
    throw std::invalid_argument("data has " + std::to_string(data_.cols()) +
                                " columns, spec dimension is " + std::to_string(spec_.dim()));
  }
  if (!data_.allFinite()) throw std::invalid_argument("data must be finite");
  if (data_.rows() > 0 && beta_ > static_cast<double>(data_.rows())) {
    warnings_.push_back("beta = " + std::to_string(beta_) + " exceeds n = " +
                        std::to_string(data_.rows()));
  }
}

PowerPosterior PowerPosterior::population(MixtureSpec spec, double beta, PriorSpec prior) {
  Dataset empty(0, spec.dim());
  return PowerPosterior(std::move(empty), beta, prior, std::move(spec));
}

double empirical_potential(const PowerPosterior& pp, const Vector& theta) {
  check_dim(pp, theta);
  check_nonempty(pp);
  const Dataset& X = pp.data();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) acc += logcosh(X.row(i).dot(theta.transpose()));
  return pp.beta() * (0.5 * theta.squaredNorm() - acc / pp.n()) + pp.prior().penalty(theta);
}

Vector empirical_gradient(const PowerPosterior& pp, const Vector& theta) {
  check_dim(pp, theta);
  check_nonempty(pp);
  const Vector weights = (pp.data() * theta).array().tanh().matrix();
  const Vector mean_term = pp.data().transpose() * weights / static_cast<double>(pp.n());
  return pp.beta() * (theta - mean_term) + pp.prior().precision() * theta;
}

double population_potential(const PowerPosterior& pp, const Vector& theta, int nodes) {
  check_dim(pp, theta);
  const LogcoshMoments mo = moments_at(pp, theta, nodes);
  return pp.beta() * (0.5 * theta.squaredNorm() - mo.logcosh) + pp.prior().penalty(theta);
}

Vector population_gradient(const PowerPosterior& pp, const Vector& theta, int nodes) {
  check_dim(pp, theta);
  const LogcoshMoments mo = moments_at(pp, theta, nodes);
  // ∇ E logcosh(θᵀX) = E[tanh]·θ₀ + E[sech²]·θ by Gaussian integration by parts.
  const Vector grad_f = mo.tanh * pp.spec().theta0 + mo.sech2 * theta;
  return pp.beta() * (theta - grad_f) + pp.prior().precision() * theta;
}

Matrix population_hessian(const PowerPosterior& pp, const Vector& theta, int nodes) {
  check_dim(pp, theta);
  if (pp.dim() > kMaxHessianDim) {
    throw std::invalid_argument("population_hessian supports d <= " +
                                std::to_string(kMaxHessianDim));
  }
  const LogcoshMoments mo = moments_at(pp, theta, nodes);
  const Vector& t0 = pp.spec().theta0;
  Matrix hf = mo.sech2 * (t0 * t0.transpose()) +
              mo.d_sech2 * (t0 * theta.transpose() + theta * t0.transpose()) +
              mo.dd_sech2 * (theta * theta.transpose());
  hf.diagonal().array() += mo.sech2;
  Matrix h = -pp.beta() * hf;
  h.diagonal().array() += pp.beta() + pp.prior().precision();
  return 0.5 * (h + h.transpose());
}

double dissipativity_margin(const PowerPosterior& pp, const Vector& theta, bool empirical,
                            int nodes) {
  const double beta = pp.beta();
  const double a2 = pp.spec().theta0.squaredNorm();
  const double s2 = theta.squaredNorm();
  if (empirical) {
    const double lhs = empirical_gradient(pp, theta).dot(theta);
    return lhs - (0.5 * beta * s2 - 2.0 * beta * (a2 + 1.0));
  }
  const double lhs = population_gradient(pp, theta, nodes).dot(theta);
  return lhs - (0.5 * beta * s2 - beta * (a2 + 1.0));
}

}  // namespace rmrw
