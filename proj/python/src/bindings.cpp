#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "dbarlab/config.hpp"
#include "dbarlab/diagnostics.hpp"
#include "dbarlab/errors.hpp"
#include "dbarlab/oracle.hpp"
#include "dbarlab/presets.hpp"
#include "dbarlab/reports.hpp"
#include "dbarlab/runner.hpp"
#include "dbarlab/solver.hpp"

namespace py = pybind11;
using namespace dbarlab;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

// (components, points) copy of the field.
CArray to_numpy(const FormField& f) {
    CArray out({static_cast<py::ssize_t>(f.components()), static_cast<py::ssize_t>(f.grid().points())});
    std::copy(f.data().begin(), f.data().end(), out.mutable_data());
    return out;
}

FormField from_numpy(const Grid& g, int degree, const CArray& a) {
    FormField f(g, degree);
    if (static_cast<std::size_t>(a.size()) != f.size())
        throw ShapeError("from_numpy: expected " + std::to_string(f.size()) + " samples, got " + std::to_string(a.size()));
    std::copy(a.data(), a.data() + a.size(), f.data().begin());
    return f;
}

CPoint to_point(const std::vector<cplx>& z) {
    if (z.empty() || z.size() > 2) throw ShapeError("point must have 1 or 2 complex coordinates");
    CPoint p{};
    for (std::size_t j = 0; j < z.size(); ++j) p[j] = z[j];
    return p;
}

// JSON crosses the boundary as text; the Python package decodes it.
std::string dump(const nlohmann::json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Weighted L2 dbar solver core";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<PreconditionError>(m, "PreconditionError", base.ptr());
    py::register_exception<SolverError>(m, "SolverError", base.ptr());
    py::register_exception<NumericalConsistencyError>(m, "NumericalConsistencyError", base.ptr());

    py::class_<Grid>(m, "Grid")
        .def(py::init<int, double, int>(), py::arg("n"), py::arg("R"), py::arg("N"))
        .def_property_readonly("n", &Grid::n)
        .def_property_readonly("R", &Grid::R)
        .def_property_readonly("N", &Grid::N)
        .def_property_readonly("h", &Grid::h)
        .def_property_readonly("points", &Grid::points)
        .def("z", [](const Grid& g) {
            CArray out({static_cast<py::ssize_t>(g.n()), static_cast<py::ssize_t>(g.points())});
            auto v = out.mutable_unchecked<2>();
            for (std::size_t p = 0; p < g.points(); ++p) {
                const CPoint z = g.z(p);
                for (int j = 0; j < g.n(); ++j) v(j, p) = z[j];
            }
            return out;
        }, "Coordinates, shape (n, points), x1 fastest.")
        .def("__repr__", [](const Grid& g) {
            std::ostringstream s;
            s << "Grid(n=" << g.n() << ", R=" << g.R() << ", N=" << g.N() << ")";
            return s.str();
        });

    py::class_<WeightSpec>(m, "Weight")
        .def_static("gaussian", &WeightSpec::gaussian, py::arg("n"), py::arg("a"))
        .def_static("anisotropic_gaussian", &WeightSpec::anisotropic_gaussian, py::arg("a"))
        .def_static("radial_quartic", &WeightSpec::radial_quartic, py::arg("n"), py::arg("c0"), py::arg("c1"),
                    py::arg("c2"))
        .def_static("from_name", &WeightSpec::from_name, py::arg("kind"), py::arg("n"), py::arg("params"))
        .def_property_readonly("name", &WeightSpec::name)
        .def_property_readonly("n", &WeightSpec::n)
        .def("eval", [](const WeightSpec& w, const std::vector<cplx>& z) {
            const WeightEval e = eval_weight(w, to_point(z));
            const int n = w.n();
            std::vector<cplx> grad(e.gradient.begin(), e.gradient.begin() + n);
            Eigen::MatrixXcd hess = e.hessian.topLeftCorner(n, n);
            return py::make_tuple(e.value, grad, hess);
        }, py::arg("z"), "(value, holomorphic gradient, complex Hessian) at z.")
        .def("smallest_eigenvalue", [](const WeightSpec& w, const std::vector<cplx>& z) {
            return smallest_eigenvalue(eval_weight(w, to_point(z)).hessian, w.n());
        }, py::arg("z"));

    m.def("dbar", [](const Grid& g, int degree, const CArray& f) {
        return to_numpy(DbarOperator(g, degree + 1).apply(from_numpy(g, degree, f)));
    }, py::arg("grid"), py::arg("degree"), py::arg("field"), "Discrete dbar of a (0,degree)-form.");

    m.def("solve", [](const Grid& g, int degree, const CArray& omega, const WeightSpec& phi, double tolerance,
                      long max_iterations) {
        SolveConfig cfg;
        cfg.tolerance = tolerance;
        cfg.max_iterations = max_iterations;
        const FormField w = from_numpy(g, degree, omega);
        const SolveResult r = solve_min_norm(w, DbarOperator(g, degree), c_exp_weight(g, phi), exp_weight(g, phi), cfg);
        return py::make_tuple(to_numpy(r.u), dump(to_json(r.report)));
    }, py::arg("grid"), py::arg("degree"), py::arg("omega"), py::arg("weight"), py::arg("tolerance") = 1e-10,
       py::arg("max_iterations") = 0,
       "Minimal-norm solution of dbar u = omega with w_u = c_phi e^phi, w_d = e^phi. Returns (u, report JSON).");

    m.def("moment_defect", [](const Grid& g, const CArray& omega, int max_degree) {
        return max_moment_defect(moment_orthogonality(from_numpy(g, g.n(), omega), max_degree));
    }, py::arg("grid"), py::arg("omega"), py::arg("max_degree") = 6);

    m.def("cauchy_transform", [](const Grid& g, const CArray& omega, int margin) {
        return to_numpy(cauchy_transform(from_numpy(g, 1, omega), margin));
    }, py::arg("grid"), py::arg("omega"), py::arg("margin") = 10);

    m.def("preset_names", [] {
        std::vector<std::string> names;
        for (const Preset& p : presets()) names.push_back(p.name);
        names.push_back(validate_preset().name);
        return names;
    });
    m.def("preset_text", [](const std::string& name) { return find_preset(name).text; }, py::arg("name"));
    m.def("parse_toml", [](const std::string& text) { return dump(parse_toml(text)); }, py::arg("text"));

    m.def("execute", [](const std::string& config_json, std::optional<int> threads) {
        ExperimentConfig cfg = parse_config(nlohmann::json::parse(config_json));
        if (threads) cfg.threads = *threads;
        RunResult r;
        {
            py::gil_scoped_release release;
            r = execute(cfg);
        }
        return py::make_tuple(r.exit_code, dump(r.report), r.summary);
    }, py::arg("config_json"), py::arg("threads") = py::none(),
       "Runs an experiment in memory. Returns (exit code, report JSON, summary).");

    m.def("run", [](const std::string& config_json, std::optional<std::string> out_dir, std::optional<int> threads,
                    std::optional<std::uint64_t> seed) {
        std::ostringstream out, err;
        int code;
        {
            py::gil_scoped_release release;
            code = run_config(nlohmann::json::parse(config_json), Overrides{out_dir, threads, seed}, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("config_json"), py::arg("out_dir") = py::none(), py::arg("threads") = py::none(),
       py::arg("seed") = py::none(), "Same as `dbarlab run`. Returns (exit code, stdout, stderr).");
}
