#include "rmrw/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "rmrw/io.hpp"
#include "rmrw/parallel.hpp"

namespace rmrw {

std::string to_string(Algorithm a) { return a == Algorithm::rmrw ? "rmrw" : "mrw"; }

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "rmrw") return Algorithm::rmrw;
  if (s == "mrw") return Algorithm::mrw;
  throw std::invalid_argument("unknown algorithm '" + s + "' (expected rmrw or mrw)");
}

void SamplerConfig::validate(int d) const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be finite and > 0");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (init == InitKind::fixed) {
    if (init_point.size() != d) throw std::invalid_argument("init point has the wrong dimension");
    if (!init_point.allFinite()) throw std::invalid_argument("init point must be finite");
  }
}

nlohmann::json to_json(const SamplerConfig& c) {
  nlohmann::json j{{"eta", c.eta},
                   {"steps", c.steps},
                   {"seed", c.seed},
                   {"algorithm", to_string(c.algorithm)},
                   {"init", c.init == InitKind::fixed ? "fixed" : "standard_gaussian"}};
  if (c.init == InitKind::fixed) {
    j["init_point"] = std::vector<double>(c.init_point.data(), c.init_point.data() + c.init_point.size());
  }
  return j;
}

double default_step_size(int d, double theta0_norm, double beta, double s, double C) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("s must lie in (0, 1)");
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be > 0");
  if (!(theta0_norm >= 0.0) || !std::isfinite(theta0_norm)) {
    throw std::invalid_argument("theta0_norm must be finite and >= 0");
  }
  if (!(C > 0.0)) throw std::invalid_argument("C must be > 0");
  const double A = C * (1.0 + theta0_norm + std::sqrt(d + std::log(1.0 / s)) / beta);
  const double denom = 2.0 * A + std::sqrt(static_cast<double>(d));
  return 1.0 / (400.0 * denom * denom);
}

double proposal_density(const Vector& x, const Vector& y, double eta, Algorithm alg) {
  if (x.size() != y.size()) throw std::invalid_argument("dimension mismatch");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  const double d = static_cast<double>(x.size());
  const double log_norm = -0.5 * d * std::log(2.0 * std::numbers::pi * eta);
  const double direct = std::exp(log_norm - 0.5 * (y - x).squaredNorm() / eta);
  if (alg == Algorithm::mrw) return direct;
  const double reflected = std::exp(log_norm - 0.5 * (y + x).squaredNorm() / eta);
  return 0.5 * direct + 0.5 * reflected;
}

StepResult mh_step(const PowerPosterior& pp, const Vector& theta, double u_theta, double eta,
                   Algorithm alg, Rng& rng) {
  if (!std::isfinite(u_theta)) throw std::runtime_error("potential at the current state is not finite");
  const Eigen::Index d = theta.size();
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double scale = std::sqrt(eta);

  StepResult r;
  r.next.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) r.next[i] = theta[i] + scale * normal(rng);
  if (alg == Algorithm::rmrw) {
    r.reflected = uniform(rng) < 0.5;
    if (r.reflected) r.next = -r.next;
  }
  const double u_prop = empirical_potential(pp, r.next);
  const double u = uniform(rng);
  // q(z|θ) = q(θ|z), so the Metropolis ratio is exp(U(θ) − U(Z)).
  const double log_ratio = u_theta - u_prop;
  r.accepted = std::isfinite(u_prop) && (log_ratio >= 0.0 || u < std::exp(log_ratio));
  if (r.accepted) {
    r.potential = u_prop;
  } else {
    r.next = theta;
    r.potential = u_theta;
  }
  return r;
}

StepResult rmrw_step(const PowerPosterior& pp, const Vector& theta, double eta, Rng& rng) {
  return mh_step(pp, theta, empirical_potential(pp, theta), eta, Algorithm::rmrw, rng);
}

StepResult mrw_step(const PowerPosterior& pp, const Vector& theta, double eta, Rng& rng) {
  return mh_step(pp, theta, empirical_potential(pp, theta), eta, Algorithm::mrw, rng);
}

Vector initial_state(const SamplerConfig& config, int d, Rng& rng) {
  if (config.init == InitKind::fixed) return config.init_point;
  std::normal_distribution<double> normal;
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = normal(rng);
  return v;
}

ChainTrace run_chain(const PowerPosterior& pp, const SamplerConfig& config) {
  const int d = pp.dim();
  config.validate(d);
  Rng rng = make_rng(config.seed, Stream::chain);
  ChainTrace trace;
  trace.seed = config.seed;
  trace.states.resize(config.steps + 1, d);
  trace.accepted.resize(config.steps);
  trace.reflected.resize(config.steps);

  Vector theta = initial_state(config, d, rng);
  double u = empirical_potential(pp, theta);
  trace.states.row(0) = theta.transpose();
  long accepted = 0;
  for (int t = 1; t <= config.steps; ++t) {
    StepResult r = mh_step(pp, theta, u, config.eta, config.algorithm, rng);
    trace.accepted[t - 1] = r.accepted;
    trace.reflected[t - 1] = r.reflected;
    accepted += r.accepted;
    theta = std::move(r.next);
    u = r.potential;
    trace.states.row(t) = theta.transpose();
  }
  trace.acceptance_rate = static_cast<double>(accepted) / config.steps;
  return trace;
}

Dataset run_chain_snapshots(const PowerPosterior& pp, const SamplerConfig& config,
                            const std::vector<int>& times) {
  const int d = pp.dim();
  if (!std::is_sorted(times.begin(), times.end())) {
    throw std::invalid_argument("snapshot times must be sorted");
  }
  if (!times.empty() && times.front() < 0) throw std::invalid_argument("snapshot times must be >= 0");
  SamplerConfig cfg = config;
  cfg.steps = std::max(1, times.empty() ? 1 : times.back());
  cfg.validate(d);
  Rng rng = make_rng(cfg.seed, Stream::chain);
  Dataset out(static_cast<Eigen::Index>(times.size()), d);
  Vector theta = initial_state(cfg, d, rng);
  double u = empirical_potential(pp, theta);
  std::size_t next = 0;
  auto record = [&](int t) {
    while (next < times.size() && times[next] == t) out.row(static_cast<Eigen::Index>(next++)) = theta.transpose();
  };
  record(0);
  for (int t = 1; next < times.size(); ++t) {
    StepResult r = mh_step(pp, theta, u, cfg.eta, cfg.algorithm, rng);
    theta = std::move(r.next);
    u = r.potential;
    record(t);
  }
  return out;
}

MultiChainResult run_multichain(const PowerPosterior& pp, const SamplerConfig& config, int chains,
                                int jobs) {
  if (chains < 1) throw std::invalid_argument("chains must be >= 1");
  config.validate(pp.dim());
  MultiChainResult res;
  res.chains.resize(chains);
  parallel_for(static_cast<std::size_t>(chains), jobs, [&](std::size_t k) {
    SamplerConfig c = config;
    c.seed = config.seed + k;
    res.chains[k] = run_chain(pp, c);
  });
  double sum = 0.0;
  res.min_acceptance = 1.0;
  res.max_acceptance = 0.0;
  for (const auto& c : res.chains) {
    sum += c.acceptance_rate;
    res.min_acceptance = std::min(res.min_acceptance, c.acceptance_rate);
    res.max_acceptance = std::max(res.max_acceptance, c.acceptance_rate);
  }
  res.mean_acceptance = sum / chains;
  return res;
}

void save_trace(const std::string& path, const ChainTrace& trace, const std::string& manifest_hash) {
  CsvWriter w(path, manifest_hash);
  std::vector<std::string> names{"step"};
  for (int i = 0; i < trace.dim(); ++i) names.push_back("theta" + std::to_string(i + 1));
  names.push_back("accepted");
  names.push_back("reflected");
  w.header(names);
  for (Eigen::Index t = 0; t < trace.states.rows(); ++t) {
    std::vector<std::string> cells{std::to_string(t)};
    for (int i = 0; i < trace.dim(); ++i) cells.push_back(format_double(trace.states(t, i)));
    if (t == 0) {
      cells.emplace_back("");
      cells.emplace_back("");
    } else {
      cells.push_back(trace.accepted[t - 1] ? "1" : "0");
      cells.push_back(trace.reflected[t - 1] ? "1" : "0");
    }
    w.row(cells);
  }
}

}  // namespace rmrw
