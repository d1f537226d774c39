#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sphgrf/errors.hpp"
#include "sphgrf/harness.hpp"
#include "sphgrf/heat.hpp"
#include "sphgrf/sampler.hpp"
#include "sphgrf/specfun.hpp"
#include "sphgrf/spectrum.hpp"

namespace py = pybind11;
using namespace sphgrf;

namespace {

SphereGrid make_grid(int n_theta, int n_phi, const std::string& kind) {
    if (kind == "equiangular") return SphereGrid::equiangular(n_theta, n_phi);
    if (kind == "gauss") return SphereGrid::gauss_latitudes(n_theta, n_phi);
    throw ConfigError("grid_kind must be 'equiangular' or 'gauss'");
}

py::array_t<double> to_array(const FieldSample& f) {
    py::array_t<double> out({f.grid.n_theta(), f.grid.n_phi()});
    std::copy(f.values.begin(), f.values.end(), out.mutable_data());
    return out;
}

py::dict table_dict(const ErrorTable& t) {
    py::list rows;
    for (const auto& r : t.rows) {
        py::dict d;
        d["kappa"] = r.kappa;
        d["err_sup"] = r.err_sup;
        d["err_l2"] = r.err_l2;
        d["stderr_l2"] = r.stderr_l2;
        d["mean_sq_l2"] = r.mean_sq_l2;
        d["stderr_mean_sq_l2"] = r.stderr_mean_sq_l2;
        rows.append(d);
    }
    py::dict d;
    d["kind"] = to_string(t.kind);
    d["rows"] = rows;
    d["fitted_slope_l2"] = t.fitted_slope_l2;
    d["fitted_slope_sup"] = t.fitted_slope_sup;
    d["fitted_slope_l2_vs_kappa"] = t.fitted_slope_l2_vs_kappa;
    d["fitted_slope_sup_vs_kappa"] = t.fitted_slope_sup_vs_kappa;
    d["theoretical_slope"] = t.theoretical_slope;
    d["csv"] = t.to_csv();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Isotropic random fields and the stochastic heat equation on the sphere";

    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);

    m.def("legendre_p", &legendre_p, py::arg("ell"), py::arg("mu"));
    m.def("assoc_legendre_normalized", &assoc_legendre_normalized, py::arg("ell"), py::arg("m"),
          py::arg("theta"));
    m.def("jacobi_p", &jacobi_p, py::arg("n"), py::arg("a"), py::arg("b"), py::arg("mu"));
    m.def("sph_harm", &sph_harm, py::arg("ell"), py::arg("m"), py::arg("theta"), py::arg("phi"));
    m.def(
        "gauss_legendre",
        [](int n) {
            const QuadratureRule r = gauss_legendre(n);
            return py::make_tuple(r.nodes, r.weights);
        },
        py::arg("n"));

    py::class_<AngularPowerSpectrum>(m, "Spectrum")
        .def_static("power_law", &AngularPowerSpectrum::power_law, py::arg("c"), py::arg("alpha"))
        .def_static("tabulated", &AngularPowerSpectrum::tabulated, py::arg("values"))
        .def("__call__", &AngularPowerSpectrum::value, py::arg("ell"))
        .def_property_readonly("alpha", &AngularPowerSpectrum::alpha)
        .def_property_readonly("band_limited", &AngularPowerSpectrum::band_limited)
        .def("tail_sum", [](const AngularPowerSpectrum& s, int kappa) { return tail_sum(s, kappa); })
        .def("regularity_json",
             [](const AngularPowerSpectrum& s) { return to_json(regularity_report(s), s); });

    m.def(
        "kernel",
        [](const AngularPowerSpectrum& s, double r, int kappa) {
            const KernelValue k = kernel_k(s, r, BandLimit(kappa));
            return py::make_tuple(k.value, k.tail_bound);
        },
        py::arg("spectrum"), py::arg("r"), py::arg("kappa"));

    m.def(
        "sample",
        [](const AngularPowerSpectrum& s, int kappa, int n_theta, int n_phi, std::uint64_t seed,
           std::uint64_t sample_index, const std::string& grid_kind, bool lognormal, int threads) {
            const SphereGrid grid = make_grid(n_theta, n_phi, grid_kind);
            const FieldSample f = [&] {
                py::gil_scoped_release release;
                const CoefficientDraw d = draw_coefficients(kappa, RngStream(seed), sample_index);
                FieldSample g = synthesize(d, s, grid, threads);
                return lognormal ? lognormal_transform(g) : g;
            }();
            return py::make_tuple(grid.thetas(), grid.phis(), to_array(f));
        },
        py::arg("spectrum"), py::arg("kappa"), py::arg("n_theta") = 64, py::arg("n_phi") = 128,
        py::arg("seed") = 0, py::arg("sample_index") = 0, py::arg("grid_kind") = "equiangular",
        py::arg("lognormal") = false, py::arg("threads") = 1);

    m.def("sigma2", &sigma2, py::arg("ell"), py::arg("h"));

    m.def(
        "run_experiment",
        [](const std::string& kind, double alpha, std::vector<int> kappas, int kappa_ref, int samples,
           int n_theta, int n_phi, double t_end, int steps, std::uint64_t seed, int threads) {
            ExperimentConfig c;
            c.kind = parse_experiment_kind(kind);
            c.alpha = alpha;
            c.kappas = std::move(kappas);
            c.kappa_ref = kappa_ref;
            c.n_samples = samples;
            c.grid_theta = n_theta;
            c.grid_phi = n_phi;
            c.t_end = t_end;
            c.steps = steps;
            c.seed = seed;
            c.threads = threads;
            ErrorTable t;
            {
                py::gil_scoped_release release;
                t = run_experiment(c);
            }
            return table_dict(t);
        },
        py::arg("kind"), py::arg("alpha") = 3.0, py::arg("kappas") = std::vector<int>{2, 4, 8, 16, 32, 64},
        py::arg("kappa_ref") = 128, py::arg("samples") = 1000, py::arg("n_theta") = 64, py::arg("n_phi") = 128,
        py::arg("t_end") = 1.0, py::arg("steps") = 1, py::arg("seed") = 0, py::arg("threads") = 1);
}
