#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rmrw/diagnostics.hpp"
#include "rmrw/experiments.hpp"
#include "rmrw/potential.hpp"
#include "rmrw/sampler.hpp"
#include "rmrw/spectral.hpp"

namespace py = pybind11;
using namespace rmrw;

namespace {

MixtureSpec spec_from(const Vector& theta0) {
  MixtureSpec s;
  s.theta0 = theta0;
  s.validate();
  return s;
}

PriorSpec prior_from(const std::string& kind, double sigma) {
  if (kind == "uniform") return PriorSpec::uniform();
  if (kind == "gaussian") return PriorSpec::gaussian(sigma);
  throw std::invalid_argument("prior must be 'uniform' or 'gaussian'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of the rmrw package";
  m.def("version", &tool_version);

  m.def(
      "sample_data",
      [](const Vector& theta0, int n, std::uint64_t seed) {
        return sample_data(spec_from(theta0), std::nullopt, n, seed);
      },
      py::arg("theta0"), py::arg("n"), py::arg("seed"), "n draws from the symmetric mixture, one row each");

  py::class_<PowerPosterior>(m, "Posterior")
      .def(py::init([](const Dataset& data, double beta, const Vector& theta0, const std::string& prior,
                       double sigma) {
             return PowerPosterior(data, beta, prior_from(prior, sigma), spec_from(theta0));
           }),
           py::arg("data"), py::arg("beta"), py::arg("theta0"), py::arg("prior") = "uniform",
           py::arg("sigma") = 1.0)
      .def_property_readonly("dim", &PowerPosterior::dim)
      .def_property_readonly("n", &PowerPosterior::n)
      .def_property_readonly("beta", &PowerPosterior::beta)
      .def_property_readonly("warnings", &PowerPosterior::warnings)
      .def("potential", [](const PowerPosterior& pp, const Vector& th) { return empirical_potential(pp, th); })
      .def("gradient", [](const PowerPosterior& pp, const Vector& th) { return empirical_gradient(pp, th); });

  m.def(
      "population_potential",
      [](const Vector& theta0, double beta, const Vector& theta, int nodes) {
        return population_potential(PowerPosterior::population(spec_from(theta0), beta), theta, nodes);
      },
      py::arg("theta0"), py::arg("beta"), py::arg("theta"), py::arg("nodes") = kDefaultQuadratureNodes);
  m.def(
      "population_gradient",
      [](const Vector& theta0, double beta, const Vector& theta, int nodes) {
        return population_gradient(PowerPosterior::population(spec_from(theta0), beta), theta, nodes);
      },
      py::arg("theta0"), py::arg("beta"), py::arg("theta"), py::arg("nodes") = kDefaultQuadratureNodes);
  m.def(
      "population_hessian",
      [](const Vector& theta0, double beta, const Vector& theta, int nodes) {
        return population_hessian(PowerPosterior::population(spec_from(theta0), beta), theta, nodes);
      },
      py::arg("theta0"), py::arg("beta"), py::arg("theta"), py::arg("nodes") = kDefaultQuadratureNodes);

  m.def("default_step_size", &default_step_size, py::arg("d"), py::arg("theta0_norm"), py::arg("beta"),
        py::arg("s"), py::arg("C") = 1.0);
  m.def("tail_radius", &tail_radius, py::arg("d"), py::arg("theta0_norm"), py::arg("beta"), py::arg("eps"),
        py::arg("C") = 1.0);

  m.def(
      "run_chain",
      [](const PowerPosterior& pp, double eta, int steps, std::uint64_t seed, const std::string& algorithm,
         std::optional<Vector> init) {
        SamplerConfig c;
        c.eta = eta;
        c.steps = steps;
        c.seed = seed;
        c.algorithm = algorithm_from_string(algorithm);
        if (init) {
          c.init = InitKind::fixed;
          c.init_point = *init;
        }
        ChainTrace tr;
        {
          py::gil_scoped_release release;
          tr = run_chain(pp, c);
        }
        py::dict out;
        out["states"] = tr.states;
        out["accepted"] = std::vector<bool>(tr.accepted.begin(), tr.accepted.end());
        out["reflected"] = std::vector<bool>(tr.reflected.begin(), tr.reflected.end());
        out["acceptance_rate"] = tr.acceptance_rate;
        return out;
      },
      py::arg("posterior"), py::arg("eta"), py::arg("steps"), py::arg("seed"), py::arg("algorithm") = "rmrw",
      py::arg("init") = py::none(),
      "Runs one chain; returns states ((steps+1) x d), accepted, reflected, acceptance_rate");

  m.def(
      "poincare_constant_1d",
      [](double lo, double hi, const std::vector<double>& log_mass) {
        const GridDensity gd =
            GridDensity::from_logmass({Axis(lo, hi, static_cast<int>(log_mass.size()))}, log_mass);
        return poincare_constant(gd);
      },
      py::arg("lo"), py::arg("hi"), py::arg("log_mass"), "Poincare constant of cell masses on [lo, hi]");

  m.def(
      "run_command",
      [](const std::string& name, const std::string& out_dir, std::uint64_t seed, const std::string& flags_json,
         int jobs) {
        RunContext ctx;
        ctx.out_dir = out_dir;
        ctx.seed = seed;
        ctx.jobs = jobs;
        ctx.flags = nlohmann::json::parse(flags_json.empty() ? "{}" : flags_json);
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_command(name, ctx);
        }
        return py::make_tuple(r.passed, r.manifest.hash());
      },
      py::arg("name"), py::arg("out_dir"), py::arg("seed") = kDefaultSeed, py::arg("flags_json") = "{}",
      py::arg("jobs") = 1, "Runs a CLI command in-process; returns (passed, manifest_hash)");
}
