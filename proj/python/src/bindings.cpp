#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "fracdiff/config.hpp"
#include "fracdiff/diagnostics.hpp"
#include "fracdiff/errors.hpp"
#include "fracdiff/fractime.hpp"
#include "fracdiff/march.hpp"
#include "fracdiff/special.hpp"

namespace py = pybind11;
using namespace fracdiff;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) throw DomainError("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

fractime::HistoryExtension extension_from(const std::string& name) {
    if (name == "constant") return fractime::HistoryExtension::ConstantBeforeA;
    if (name == "zero") return fractime::HistoryExtension::ZeroBeforeA;
    if (name == "even_reflect") return fractime::HistoryExtension::EvenReflectAfterT;
    throw DomainError("extension must be constant, zero or even_reflect; got '" + name + "'");
}

fractime::TimeSeries series(const Array& values, double a, double T, const std::string& ext) {
    auto v = to_vector(values);
    if (v.size() < 2) throw DomainError("a series needs at least two values");
    const fractime::TimeGrid g(a, T, static_cast<long>(v.size()) - 1);
    return fractime::TimeSeries(g, std::move(v), extension_from(ext));
}

py::dict trajectory_dict(const march::Trajectory& tr) {
    const auto& p = tr.problem();
    Array data({static_cast<py::ssize_t>(tr.k() + 1), static_cast<py::ssize_t>(tr.Nx())}, tr.data().data());
    std::vector<double> t, x;
    for (long j = 0; j <= tr.k(); ++j) t.push_back(p.tgrid.node(j));
    for (long m = 0; m < tr.Nx(); ++m) x.push_back(p.sgrid.node(m));
    py::dict d;
    d["w"] = data;
    d["t"] = to_array(t);
    d["x"] = to_array(x);
    d["residuals"] = to_array(tr.meta().residuals);
    d["alpha"] = p.alpha.value();
    return d;
}

march::Trajectory run_config(const std::string& text) {
    const auto cfg = config::parse_config(text);
    py::gil_scoped_release release;
    return march::run(config::make_problem(cfg), cfg.tol.residual);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Discrete Caputo calculus, nonlocal diffusion solver and diagnostics";

    static py::exception<DomainError> domain_error(m, "DomainError", PyExc_ValueError);
    static py::exception<FormatError> format_error(m, "FormatError", PyExc_ValueError);
    static py::exception<SolverError> solver_error(m, "SolverError", PyExc_RuntimeError);
    static py::exception<RegimeError> regime_error(m, "RegimeError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DomainError& e) {
            domain_error(e.what());
        } catch (const FormatError& e) {
            format_error(e.what());
        } catch (const SolverError& e) {
            solver_error(e.what());
        } catch (const RegimeError& e) {
            regime_error(e.what());
        }
    });

    m.def(
        "mittag_leffler",
        [](double alpha, double z) {
            const auto r = special::mittag_leffler(FracOrder(alpha), z);
            return py::make_tuple(r.value, r.terms_used, r.error_bound);
        },
        py::arg("alpha"), py::arg("z"), "E_alpha(z) for real z <= 0, |z| <= 30: (value, terms, error_bound).");

    m.def(
        "eigenmode_reference",
        [](double alpha, double mu, double a, const Array& times) {
            const auto t = to_vector(times);
            return to_array(special::eigenmode_reference(FracOrder(alpha), mu, a, t));
        },
        py::arg("alpha"), py::arg("mu"), py::arg("a"), py::arg("times"));

    m.def(
        "discrete_caputo",
        [](const Array& values, double a, double T, double alpha, long j, const std::string& extension) {
            const auto u = series(values, a, T, extension);
            if (j < 1 || j > u.grid().k()) throw DomainError("j must lie in 1..k");
            return fractime::discrete_caputo(u, FracOrder(alpha), j);
        },
        py::arg("values"), py::arg("a"), py::arg("T"), py::arg("alpha"), py::arg("j"),
        py::arg("extension") = "constant", "Discrete rescaled Caputo derivative at node j of u_0..u_k on [a, T].");

    m.def(
        "caputo_quadrature",
        [](const std::function<double(double)>& u, double alpha, double a, double t, long M) {
            return fractime::caputo_quadrature(u, FracOrder(alpha), a, t, M);
        },
        py::arg("u"), py::arg("alpha"), py::arg("a"), py::arg("t"), py::arg("M"));

    m.def(
        "interpolation_exponent",
        [](int n, double alpha, double sigma) {
            const auto e = diagnostics::interpolation_exponent(n, FracOrder(alpha), sigma);
            return py::make_tuple(e.p, e.beta);
        },
        py::arg("n"), py::arg("alpha"), py::arg("sigma"));

    m.def(
        "energy_gap",
        [](const Array& values, double a, double T, double alpha) {
            const auto g = diagnostics::energy_decompose_gap(series(values, a, T, "constant"), FracOrder(alpha));
            py::dict d;
            d["lhs"] = g.lhs;
            d["squares"] = g.squares;
            d["right_tail"] = g.right_tail;
            d["left_tail"] = g.left_tail;
            d["coupling"] = g.coupling;
            d["slack"] = g.slack;
            d["scale"] = g.scale;
            return d;
        },
        py::arg("values"), py::arg("a"), py::arg("T"), py::arg("alpha"));

    m.def(
        "solve", [](const std::string& config_json) { return trajectory_dict(run_config(config_json)); },
        py::arg("config_json"),
        "Solves the problem described by a configuration document; returns w (k+1, Nx), t, x, residuals.");

    m.def(
        "eigenmode_comparison",
        [](const std::string& config_json, int mode, long skip) {
            const auto tr = run_config(config_json);
            const auto c = diagnostics::eigenmode_comparison(tr, mode, skip);
            py::dict d;
            d["mu"] = c.mu;
            d["max_rel_error"] = c.max_rel_error;
            d["times"] = to_array(c.times);
            d["amplitude"] = to_array(c.amplitude);
            d["reference"] = to_array(c.reference);
            return d;
        },
        py::arg("config_json"), py::arg("mode") = 1, py::arg("skip") = 10);
}
