#include "spread/cli.hpp"
#include "spread/error.hpp"
#include "spread/fixtures.hpp"
#include "spread/model_io.hpp"
#include "spread/random.hpp"
#include "spread/reproduce.hpp"
#include "spread/topo.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace spread;

namespace {

NonnegMatrix matrix_from(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::string> labels;
    std::vector<std::vector<Rational>> r;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        labels.push_back(std::to_string(i));
        std::vector<Rational> row;
        for (const auto& x : rows[i])
            row.push_back(parse_rational(x));
        r.push_back(std::move(row));
    }
    return NonnegMatrix::from_rows(labels, r);
}

std::vector<std::vector<std::string>> matrix_rows(const NonnegMatrix& m) {
    std::vector<std::vector<std::string>> out(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            out[i].push_back(format_rational(m.at(i, j)));
    return out;
}

py::dict labelled(const std::vector<std::string>& labels, const std::vector<double>& v) {
    py::dict d;
    for (std::size_t i = 0; i < v.size(); ++i)
        d[py::str(labels[i])] = v[i];
    return d;
}

py::dict rates(const ModelSpec& spec) {
    if (auto v = validate_spec(spec); !v.empty())
        throw ValidationError("invalid model: " + v.front(), v);
    py::dict d;
    if (spec.kind == ModelKind::topological) {
        const auto cf = closed_form_rates(spec.topo, spec.code);
        d["rho"] = cf.perron.rho;
        d["w"] = labelled(cf.reduced.alphabet.names(), cf.perron.w);
        d["rates"] = labelled(spec.explicit_types.names(), cf.rates);
        return d;
    }
    const auto th = theoretical_rates(spec.dist, spec.code);
    d["rho"] = th.perron.rho;
    d["w"] = labelled(th.mean.labels(), th.perron.w);
    d["rates"] = labelled(spec.explicit_types.names(), th.rates);
    return d;
}

const ModelSpec& random_only(const ModelSpec& s) {
    if (s.kind != ModelKind::random)
        throw Error("operation needs a random model");
    return s;
}

const ModelSpec& topological_only(const ModelSpec& s) {
    if (s.kind != ModelKind::topological)
        throw Error("operation needs a topological model");
    return s;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Projected spread models: closed-form and Monte Carlo spread rates";
    m.attr("rng_algorithm") = rng_algorithm;

    auto base = py::register_exception<Error>(m, "SpreadError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<CoverageError>(m, "CoverageError", base.ptr());
    py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
    py::register_exception<RegimeError>(m, "RegimeError", base.ptr());
    py::register_exception<StructureError>(m, "StructureError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<EstimationError>(m, "EstimationError", base.ptr());
    py::register_exception<OutOfRangeError>(m, "OutOfRangeError", base.ptr());

    py::class_<ModelSpec>(m, "Model")
        .def_static("from_json", &parse_model, py::arg("text"))
        .def_static("from_file", &load_model, py::arg("path"))
        .def_static("fixture", &fixture, py::arg("id"))
        .def_property_readonly("kind",
                               [](const ModelSpec& s) { return s.kind == ModelKind::random ? "random" : "topological"; })
        .def_property_readonly("name", [](const ModelSpec& s) { return s.name; })
        .def_property_readonly("types", [](const ModelSpec& s) { return s.types.names(); })
        .def_property_readonly("explicit_types", [](const ModelSpec& s) { return s.explicit_types.names(); })
        .def_property_readonly("k", [](const ModelSpec& s) { return s.code.k(); })
        .def("validate", &validate_spec)
        .def("to_json", &serialize_model)
        .def("__eq__", &semantically_equal)
        .def("__repr__", [](const ModelSpec& s) {
            return "<Model " + (s.name.empty() ? std::string("?") : s.name) + " " +
                   (s.kind == ModelKind::random ? "random" : "topological") + " k=" + std::to_string(s.code.k()) + ">";
        });

    m.def("fixture_ids", &fixture_ids);
    m.def("example_ids", &example_ids);

    m.def(
        "perron",
        [](const std::vector<std::vector<std::string>>& rows, double tol, std::size_t max_iter) {
            const auto p = perron(matrix_from(rows), PerronOptions{tol, max_iter});
            return py::make_tuple(p.rho, p.w, p.residual);
        },
        py::arg("rows"), py::arg("tol") = 1e-12, py::arg("max_iter") = 100000,
        "Maximal eigenvalue, normalised left eigenvector and residual of a nonnegative matrix given as rational strings.");

    m.def("rates", &rates, py::arg("model"),
          "rho, w and per-explicit-type rates (closed form for topological models, from the derived mean matrix for "
          "random ones).");

    m.def(
        "mean_matrix", [](const ModelSpec& s) { return matrix_rows(mean_matrix(random_only(s).dist)); },
        py::arg("model"));

    m.def(
        "potential_patterns",
        [](const ModelSpec& s, int k) {
            const auto set = enumerate_potential_patterns(random_only(s).dist, k);
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& it : set.items)
                out.emplace_back(k == 0 ? s.types.name(it.pattern.label()) : to_string(it.pattern, s.types),
                                 format_rational(it.prob));
            return out;
        },
        py::arg("model"), py::arg("k"));

    m.def(
        "induced_mean_matrix", [](const ModelSpec& s, int k) { return matrix_rows(induce(random_only(s).dist, k).mean); },
        py::arg("model"), py::arg("k"));

    m.def(
        "empirical_rate",
        [](const ModelSpec& s, int depth, const std::string& window) {
            const auto& t = topological_only(s);
            py::list out;
            for (const auto& pt : empirical_rate(t.topo, t.code, t.start, WindowSequence::parse(window), depth)) {
                py::dict d;
                d["n"] = pt.n;
                d["window"] = py::make_tuple(pt.window.lo, pt.window.hi);
                d["ratios"] = labelled(t.explicit_types.names(), pt.ratios);
                out.append(d);
            }
            return out;
        },
        py::arg("model"), py::arg("depth"), py::arg("window") = "const:1");

    m.def(
        "mc_rate",
        [](const ModelSpec& s, int generations, std::size_t trials, std::uint64_t seed, const std::string& window,
           unsigned threads) {
            McConfig cfg;
            cfg.start = static_cast<Symbol>(random_only(s).start);
            cfg.generations = generations;
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.ws = WindowSequence::parse(window);
            cfg.threads = threads;
            McResult res;
            {
                py::gil_scoped_release nogil;
                res = mc_rate(s.dist, s.code, cfg);
            }
            py::dict d;
            py::list wins;
            for (const auto& w : res.windows)
                wins.append(py::make_tuple(w.lo, w.hi));
            d["windows"] = wins;
            d["explicit_types"] = s.explicit_types.names();
            d["mean_ratio"] = res.mean_ratio;
            d["std_error"] = res.std_error;
            d["alive"] = res.alive;
            d["extinct"] = res.extinct;
            std::ostringstream os;
            ratios_table(res, s.explicit_types).write(os);
            d["csv"] = os.str();
            return d;
        },
        py::arg("model"), py::arg("generations") = 8, py::arg("trials") = 300, py::arg("seed") = 42,
        py::arg("window") = "const:1", py::arg("threads") = 0);

    m.def(
        "reproduce",
        [](const std::string& id, std::uint64_t seed, std::size_t trials) {
            ReproduceReport rep;
            {
                py::gil_scoped_release nogil;
                rep = reproduce(id, ReproduceOptions{seed, trials, 0});
            }
            py::list checks;
            for (const auto& c : rep.checks) {
                py::dict d;
                d["label"] = c.label;
                d["expected"] = c.expected;
                d["actual"] = c.actual;
                d["tol"] = c.tol;
                d["reference"] = c.reference;
                d["pass"] = c.pass();
                checks.append(d);
            }
            py::dict d;
            d["id"] = rep.id;
            d["pass"] = rep.pass();
            d["checks"] = checks;
            d["notes"] = rep.notes;
            return d;
        },
        py::arg("id"), py::arg("seed") = 42, py::arg("trials") = 300);

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "spread");
            std::vector<const char*> argv;
            for (const auto& a : args)
                argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the spread command line in-process; returns (exit code, stdout, stderr).");
}
