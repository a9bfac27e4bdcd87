#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "emperor/bench.hpp"
#include "emperor/descriptor.hpp"
#include "emperor/errors.hpp"
#include "emperor/gmm1d.hpp"
#include "emperor/io.hpp"
#include "emperor/model.hpp"
#include "emperor/moments.hpp"
#include "emperor/reconstruct.hpp"
#include "emperor/slicing.hpp"

namespace py = pybind11;
using namespace emperor;

namespace {

MultivariateGMM gmm_from_parts(const Eigen::VectorXd& weights,
                               const std::vector<Eigen::VectorXd>& means,
                               const std::vector<Eigen::MatrixXd>& covs) {
  return MultivariateGMM(weights, means, covs);
}

Eigen::MatrixXi basis_exponents(const MonomialBasis& basis) {
  Eigen::MatrixXi out(static_cast<Eigen::Index>(basis.size()),
                      basis.dimension);
  for (std::size_t a = 0; a < basis.indices.size(); ++a) {
    for (int i = 0; i < basis.dimension; ++i) {
      out(static_cast<Eigen::Index>(a), i) =
          basis.indices[a].exponents[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

Pooling pooling_from_name(const std::string& name) {
  if (name == "gap") return Pooling::Gap;
  if (name == "max") return Pooling::Max;
  if (name == "gem") return Pooling::GeM;
  if (name == "cov") return Pooling::Cov;
  fail(ErrorCode::InvalidArgument, "unknown pooling '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_emperor, m) {
  m.doc() =
      "Sliced mixture-moment descriptors: random projections, per-slice "
      "Gaussian-mixture fits, and multivariate moment recovery";

  py::register_exception<Error>(m, "EmperorError", PyExc_ValueError);

  py::class_<Descriptor>(m, "Descriptor")
      .def_property_readonly("dimension", &Descriptor::dimension)
      .def_property_readonly("slice_count", &Descriptor::slice_count)
      .def_property_readonly("components", &Descriptor::components)
      .def_property_readonly(
          "directions",
          [](const Descriptor& d) { return d.slices.directions; })
      .def_property_readonly("warnings",
                             [](const Descriptor& d) { return d.warnings; })
      .def_property_readonly(
          "weights",
          [](const Descriptor& d) {
            Eigen::MatrixXd out(d.slice_count(), d.components());
            for (int l = 0; l < d.slice_count(); ++l) {
              out.row(l) = d.per_slice[static_cast<std::size_t>(l)]
                               .gmm.weights()
                               .transpose();
            }
            return out;
          })
      .def_property_readonly(
          "means",
          [](const Descriptor& d) {
            Eigen::MatrixXd out(d.slice_count(), d.components());
            for (int l = 0; l < d.slice_count(); ++l) {
              out.row(l) = d.per_slice[static_cast<std::size_t>(l)]
                               .gmm.means()
                               .transpose();
            }
            return out;
          })
      .def_property_readonly(
          "stddevs",
          [](const Descriptor& d) {
            Eigen::MatrixXd out(d.slice_count(), d.components());
            for (int l = 0; l < d.slice_count(); ++l) {
              out.row(l) = d.per_slice[static_cast<std::size_t>(l)]
                               .gmm.stddevs()
                               .transpose();
            }
            return out;
          })
      .def("flatten", [](const Descriptor& d) { return flatten(d); })
      .def("to_json",
           [](const Descriptor& d) { return descriptor_to_json(d).dump(2); })
      .def_static("from_json", [](const std::string& text) {
        return descriptor_from_json(nlohmann::json::parse(text));
      });

  m.def(
      "describe",
      [](const Eigen::MatrixXd& points, int slices, int components,
         std::uint64_t seed, bool standardize, const std::string& scheme,
         int threads) {
        DescriptorConfig config;
        config.slices = slices;
        config.components = components;
        config.seed = seed;
        config.standardize_slices = standardize;
        config.scheme = scheme_from_name(scheme);
        return emperor_descriptor(PointSet(points), config, threads);
      },
      py::arg("points"), py::arg("slices") = 64, py::arg("components") = 3,
      py::arg("seed") = 0, py::arg("standardize") = false,
      py::arg("scheme") = "iid_gaussian_normalized", py::arg("threads") = 1,
      "Fit the descriptor of an (n, d) point array");

  m.def(
      "recover_moments",
      [](const Descriptor& d, int degree, std::optional<double> ridge) {
        SolveResult solved = recover_moments(d, degree, ridge);
        return py::make_tuple(basis_exponents(solved.moments.basis),
                              solved.moments.values, solved.residual_norm);
      },
      py::arg("descriptor"), py::arg("degree"),
      py::arg("ridge") = std::nullopt,
      "Degree-k moment recovery; returns (exponents, values, residual)");

  m.def(
      "gmm_moments",
      [](const Eigen::VectorXd& weights,
         const std::vector<Eigen::VectorXd>& means,
         const std::vector<Eigen::MatrixXd>& covs, int degree,
         int degree_cap) {
        MomentVector mv = multivariate_moment_vector(
            gmm_from_parts(weights, means, covs), degree, degree_cap);
        return py::make_tuple(basis_exponents(mv.basis), mv.values);
      },
      py::arg("weights"), py::arg("means"), py::arg("covariances"),
      py::arg("degree"), py::arg("degree_cap") = 6,
      "Exact degree-k raw moments of a Gaussian mixture");

  m.def(
      "sliced_moment",
      [](const Eigen::VectorXd& weights,
         const std::vector<Eigen::VectorXd>& means,
         const std::vector<Eigen::MatrixXd>& covs,
         const Eigen::VectorXd& theta, int degree) {
        return sliced_gmm_moment(gmm_from_parts(weights, means, covs), theta,
                                 degree);
      },
      py::arg("weights"), py::arg("means"), py::arg("covariances"),
      py::arg("theta"), py::arg("degree"),
      "Raw moment of the mixture projected onto the unit direction theta");

  m.def(
      "hankel_psd",
      [](const std::vector<double>& moments, int order) {
        HankelReport report =
            hankel_psd_check(MomentSequence{moments}, order);
        return py::make_tuple(report.is_psd, report.min_eigenvalue);
      },
      py::arg("moments"), py::arg("order"),
      "Moment-matrix feasibility check; returns (is_psd, min_eigenvalue)");

  m.def(
      "carleman_partial_sum",
      [](const std::vector<double>& even_moments, int terms) {
        return carleman_partial_sum(even_moments, terms);
      },
      py::arg("even_moments"), py::arg("terms"),
      "Divergence partial sum from the even raw moments m2, m4, ...");

  m.def(
      "fit_gmm1d",
      [](const Eigen::VectorXd& samples, int components, int max_iters,
         double rel_tol, int restarts, double variance_floor_scale,
         std::uint64_t seed) {
        EMConfig config;
        config.components = components;
        config.max_iters = max_iters;
        config.rel_tol = rel_tol;
        config.restarts = restarts;
        config.variance_floor_scale = variance_floor_scale;
        config.seed = seed;
        FitReport report = fit_gmm1d(samples, config);
        py::dict out;
        out["weights"] = report.gmm.weights();
        out["means"] = report.gmm.means();
        out["stddevs"] = report.gmm.stddevs();
        out["final_loglik"] = report.final_loglik;
        out["iterations"] = report.iterations;
        out["converged"] = report.converged;
        out["floor_hit"] = report.floor_hit;
        out["loglik_trace"] = report.loglik_trace;
        return out;
      },
      py::arg("samples"), py::arg("components") = 1,
      py::arg("max_iters") = 200, py::arg("rel_tol") = 1e-8,
      py::arg("restarts") = 5, py::arg("variance_floor_scale") = 1e-6,
      py::arg("seed") = 0,
      "EM fit of a univariate Gaussian mixture with restarts");

  m.def(
      "directions",
      [](int dim, int count, std::uint64_t seed, const std::string& scheme) {
        return generate_directions(dim, count, seed,
                                   scheme_from_name(scheme))
            .directions;
      },
      py::arg("dim"), py::arg("count"), py::arg("seed") = 0,
      py::arg("scheme") = "iid_gaussian_normalized",
      "Reproducible unit directions, one per row");

  m.def(
      "pool",
      [](const Eigen::MatrixXd& points, const std::string& method,
         double gem_power) {
        PoolingOptions options;
        options.gem_power = gem_power;
        return baseline_pool(PointSet(points), pooling_from_name(method),
                             options);
      },
      py::arg("points"), py::arg("method"), py::arg("gem_power") = 3.0,
      "Reference poolings: gap | max | gem | cov");

  m.def(
      "sample_gmm",
      [](const Eigen::VectorXd& weights,
         const std::vector<Eigen::VectorXd>& means,
         const std::vector<Eigen::MatrixXd>& covs, int n,
         std::uint64_t seed) {
        return sample_gmm(gmm_from_parts(weights, means, covs), n, seed)
            .points();
      },
      py::arg("weights"), py::arg("means"), py::arg("covariances"),
      py::arg("n"), py::arg("seed") = 0,
      "Draw n points from a Gaussian mixture, reproducibly");
}
