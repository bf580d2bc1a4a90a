#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mggd/errors.hpp"
#include "mggd/estimator.hpp"
#include "mggd/model.hpp"
#include "mggd/sampler.hpp"
#include "mggd/spd_matrix.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

mggd::Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw mggd::DimensionMismatch("expected a 2-D array");
    mggd::Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i)
        for (py::ssize_t j = 0; j < a.shape(1); ++j) m(i, j) = r(i, j);
    return m;
}

Array to_array(const mggd::Matrix& m) {
    Array out({m.rows(), m.cols()});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) w(i, j) = m(i, j);
    return out;
}

mggd::SampleSet to_samples(const Array& a) { return mggd::SampleSet(to_matrix(a)); }
mggd::SpdMatrix to_spd(const Array& a) { return mggd::SpdMatrix(to_matrix(a)); }

Array samples_to_array(const mggd::SampleSet& s) {
    Array out({s.size(), s.dim()});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.dim(); ++j) w(i, j) = s.row(i)[j];
    return out;
}

mggd::FitOptions make_options(double tol, int max_iter, std::optional<double> beta, double beta_init,
                              const std::string& init, std::optional<Array> init_matrix) {
    mggd::FitOptions o;
    o.tol_c = tol;
    o.max_iter = max_iter;
    o.beta_fixed = beta;
    o.beta_init = beta_init;
    if (init_matrix)
        o.init = mggd::Initializer::user(to_spd(*init_matrix));
    else if (init == "identity")
        o.init = mggd::Initializer::identity();
    else if (init == "scm")
        o.init = mggd::Initializer::scaled_scm();
    else
        throw mggd::InvalidArgument("init must be 'identity' or 'scm' (or pass init_matrix)");
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Maximum-likelihood estimation for multivariate generalized Gaussian distributions";

    // translators run most-recent first, so the base class goes first
    py::register_exception<mggd::Error>(m, "MggdError", PyExc_ValueError);
    py::register_exception<mggd::DegenerateData>(m, "DegenerateData", PyExc_ValueError);
    py::register_exception<mggd::NotPositiveDefinite>(m, "NotPositiveDefinite", PyExc_ValueError);

    py::class_<mggd::FitReport>(m, "FitReport")
        .def_property_readonly("scatter", [](const mggd::FitReport& r) { return to_array(r.scatter.entries()); })
        .def_readonly("scale", &mggd::FitReport::scale)
        .def_readonly("beta", &mggd::FitReport::beta)
        .def_readonly("iterations", &mggd::FitReport::iterations)
        .def_readonly("c_trace", &mggd::FitReport::c_trace)
        .def_readonly("alpha_residual", &mggd::FitReport::alpha_residual)
        .def_readonly("converged", &mggd::FitReport::converged)
        .def_readonly("objective", &mggd::FitReport::objective)
        .def("__repr__", [](const mggd::FitReport& r) {
            return "<FitReport beta=" + std::to_string(r.beta) + " scale=" + std::to_string(r.scale) +
                   " iterations=" + std::to_string(r.iterations) + (r.converged ? " converged>" : " not converged>");
        });

    m.def("toeplitz_rho", [](std::size_t p, double rho) { return to_array(mggd::toeplitz_rho(p, rho).entries()); },
          py::arg("p"), py::arg("rho"));

    m.def(
        "sample",
        [](const Array& scatter, double scale, double beta, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
            const mggd::MggdParams params(mggd::normalize_trace(to_spd(scatter)), scale, beta);
            mggd::Rng rng(seed, stream);
            return samples_to_array(mggd::sample_mggd(params, n, rng));
        },
        py::arg("scatter"), py::arg("scale"), py::arg("beta"), py::arg("n"), py::arg("seed"), py::arg("stream") = 0,
        "Draw n rows; the scatter is renormalized to trace p.");

    m.def(
        "fit",
        [](const Array& data, std::optional<double> beta, double tol, int max_iter, double beta_init,
           const std::string& init, std::optional<Array> init_matrix) {
            return mggd::fit_joint(to_samples(data), make_options(tol, max_iter, beta, beta_init, init, init_matrix));
        },
        py::arg("data"), py::arg("beta") = py::none(), py::arg("tol") = 1e-6, py::arg("max_iter") = 100,
        py::arg("beta_init") = 0.5, py::arg("init") = "scm", py::arg("init_matrix") = py::none(),
        "Joint fit of (M, m, beta); pass beta to hold the shape fixed.");

    m.def(
        "fp_map",
        [](const Array& scatter, const Array& data, double beta) {
            return to_array(mggd::fp_map(to_spd(scatter), to_samples(data), beta).entries());
        },
        py::arg("scatter"), py::arg("data"), py::arg("beta"));

    m.def(
        "log_profile_objective",
        [](const Array& scatter, const Array& data, double beta) {
            return mggd::log_profile_objective(to_spd(scatter), to_samples(data), beta);
        },
        py::arg("scatter"), py::arg("data"), py::arg("beta"));

    m.def(
        "estimate_scale",
        [](const Array& scatter, const Array& data, double beta) {
            return mggd::estimate_scale(to_spd(scatter), to_samples(data), beta);
        },
        py::arg("scatter"), py::arg("data"), py::arg("beta"));

    m.def(
        "alpha_equation",
        [](double beta, const std::vector<double>& y, std::size_t p) { return mggd::alpha_equation(beta, y, p); },
        py::arg("beta"), py::arg("y"), py::arg("p"));

    m.def(
        "log_pdf",
        [](const std::vector<double>& x, const Array& scatter, double scale, double beta) {
            const mggd::MggdParams params(to_spd(scatter), scale, beta);
            return mggd::log_pdf(x, params);
        },
        py::arg("x"), py::arg("scatter"), py::arg("scale"), py::arg("beta"));
}
