#include "spread/cli.hpp"

#include "spread/error.hpp"
#include "spread/fixtures.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <functional>

namespace spread {

namespace {

std::string fmt(double x) { return format_number(x); }

// Maps library exceptions onto the exit-code contract.
int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return exit_code::parse;
    } catch (const ValidationError& e) {
        err << e.what() << '\n';
        for (const auto& v : e.violations())
            err << "  " << v << '\n';
        return exit_code::invalid;
    } catch (const CoverageError& e) {
        err << "invalid block code: " << e.what() << '\n';
        return exit_code::invalid;
    } catch (const StructureError& e) {
        err << "structure error: " << e.what() << '\n';
        return exit_code::math;
    } catch (const ConvergenceError& e) {
        err << "convergence error: " << e.what() << " (residual " << e.residual() << ")\n";
        return exit_code::math;
    } catch (const RegimeError& e) {
        err << "regime error: " << e.what() << '\n';
        return exit_code::math;
    } catch (const EstimationError& e) {
        err << "estimation error: " << e.what() << '\n';
        return exit_code::math;
    } catch (const ResourceError& e) {
        err << "resource error: " << e.what() << '\n';
        return exit_code::resource;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::failure;
    }
}

std::string kind_summary(const ModelSpec& spec) {
    std::string s = spec.kind == ModelKind::topological ? "topological, m=" + std::to_string(spec.topo.m) : "random";
    return s + ", k=" + std::to_string(spec.code.k());
}

void write_file(const std::string& path, const CsvTable& t) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot write " + path);
    t.write(f);
}

struct RateResult {
    double rho = 0;
    std::vector<std::string> w_labels;
    std::vector<double> w;
    std::vector<double> rates;
};

} // namespace

SimulationTables simulate_tables(const ModelSpec& spec, const RunConfig& cfg) {
    if (auto v = validate_spec(spec); !v.empty())
        throw ValidationError("invalid model: " + v.front(), v);
    const auto ws = WindowSequence::parse(cfg.window);
    SimulationTables out;
    if (spec.kind == ModelKind::topological) {
        const auto pts = empirical_rate(spec.topo, spec.code, spec.start, ws, cfg.generations);
        out.ratios = empirical_table(pts, spec.explicit_types);
        out.theory = closed_form_rates(spec.topo, spec.code).rates;
        return out;
    }
    McConfig mc;
    mc.start = static_cast<Symbol>(spec.start);
    mc.generations = cfg.generations;
    mc.trials = cfg.trials;
    mc.ws = ws;
    mc.seed = cfg.seed;
    mc.threads = cfg.threads;
    const auto res = mc_rate(spec.dist, spec.code, mc);
    out.ratios = ratios_table(res, spec.explicit_types);
    out.counts = counts_table(res, spec.explicit_types);
    try {
        const auto th = theoretical_rates(spec.dist, spec.code);
        out.theory = th.rates;
        out.wdiag = wdiag_table(res, th.perron.rho);
    } catch (const RegimeError&) {
    } catch (const StructureError&) {
    }
    if (cfg.full)
        out.trials = trials_table(res, spec.explicit_types);
    return out;
}

int cmd_validate(const std::string& file, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto spec = load_model(file);
        const auto v = validate_spec(spec);
        if (v.empty()) {
            out << file << ": ok (" << kind_summary(spec) << ")\n";
            return exit_code::ok;
        }
        out << file << ": " << v.size() << " violation(s)\n";
        for (const auto& s : v)
            out << "  " << s << '\n';
        return exit_code::invalid;
    });
}

int cmd_rate(const std::string& file, const std::optional<std::string>& target, bool as_json, std::ostream& out,
             std::ostream& err) {
    return guarded(err, [&] {
        const auto spec = load_model(file);
        if (auto v = validate_spec(spec); !v.empty())
            throw ValidationError("invalid model: " + v.front(), v);
        std::optional<Symbol> only;
        if (target)
            only = spec.explicit_types.at(*target);

        RateResult main;
        std::optional<RateResult> derived;
        std::string matrix = "xi";
        if (spec.kind == ModelKind::topological) {
            const auto cf = closed_form_rates(spec.topo, spec.code);
            main = {cf.perron.rho, cf.reduced.alphabet.names(), cf.perron.w, cf.rates};
        } else {
            const auto th = theoretical_rates(spec.dist, spec.code);
            RateResult d{th.perron.rho, th.mean.labels(), th.perron.w, th.rates};
            matrix = "derived mean";
            if (spec.mean_matrix_override) {
                const auto tp = theoretical_rates_from_matrix(*spec.mean_matrix_override, th.code,
                                                              spec.explicit_types.size());
                main = {tp.perron.rho, spec.mean_matrix_override->labels(), tp.perron.w, tp.rates};
                matrix = "override mean";
                derived = std::move(d);
            } else {
                main = std::move(d);
            }
        }

        if (as_json) {
            nlohmann::ordered_json j;
            j["model"] = spec.name;
            j["matrix"] = matrix;
            auto fill = [&](nlohmann::ordered_json& node, const RateResult& r) {
                node["rho"] = r.rho;
                node["w"] = nlohmann::ordered_json::object();
                for (std::size_t i = 0; i < r.w.size(); ++i)
                    node["w"][r.w_labels[i]] = r.w[i];
                node["rates"] = nlohmann::ordered_json::object();
                for (Symbol a = 0; a < r.rates.size(); ++a)
                    if (!only || *only == a)
                        node["rates"][spec.explicit_types.name(a)] = r.rates[a];
            };
            fill(j, main);
            if (derived) {
                j["derived"] = nlohmann::ordered_json::object();
                fill(j["derived"], *derived);
            }
            out << j.dump(2) << '\n';
            return exit_code::ok;
        }
        auto print = [&](const RateResult& r, const std::string& prefix) {
            out << prefix << "rho " << fmt(r.rho) << '\n';
            out << prefix << "w";
            for (std::size_t i = 0; i < r.w.size(); ++i)
                out << ' ' << r.w_labels[i] << '=' << fmt(r.w[i]);
            out << '\n';
            for (Symbol a = 0; a < r.rates.size(); ++a)
                if (!only || *only == a)
                    out << prefix << "rate " << spec.explicit_types.name(a) << ' ' << fmt(r.rates[a]) << '\n';
        };
        out << "model " << (spec.name.empty() ? file : spec.name) << " (" << kind_summary(spec) << ", " << matrix
            << " matrix)\n";
        print(main, "");
        if (derived) {
            out << "from the distribution:\n";
            print(*derived, "  ");
        }
        return exit_code::ok;
    });
}

int cmd_simulate(const std::string& file, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (cfg.trials < 1 || cfg.generations < 0)
            throw ParseError("--trials must be >= 1 and --gens >= 0");
        const auto spec = load_model(file);
        const auto t = simulate_tables(spec, cfg);
        if (cfg.out.empty()) {
            t.ratios.write(out);
            return exit_code::ok;
        }
        write_file(cfg.out + "_ratios.csv", t.ratios);
        out << "wrote " << cfg.out << "_ratios.csv\n";
        if (t.counts) {
            write_file(cfg.out + "_counts.csv", *t.counts);
            out << "wrote " << cfg.out << "_counts.csv\n";
        }
        if (t.wdiag) {
            write_file(cfg.out + "_wdiag.csv", *t.wdiag);
            out << "wrote " << cfg.out << "_wdiag.csv\n";
        }
        if (t.trials) {
            write_file(cfg.out + "_trials.csv", *t.trials);
            out << "wrote " << cfg.out << "_trials.csv\n";
        }
        return exit_code::ok;
    });
}

int cmd_reproduce(const std::string& id, const ReproduceOptions& opts, bool as_json, std::ostream& out,
                  std::ostream& err) {
    std::vector<std::string> ids;
    if (id == "all") {
        ids = example_ids();
    } else {
        const auto& known = example_ids();
        if (std::find(known.begin(), known.end(), id) == known.end()) {
            err << "unknown example id '" << id << "'; expected one of:";
            for (const auto& k : known)
                err << ' ' << k;
            err << " or all\n";
            return exit_code::usage;
        }
        ids.push_back(id);
    }
    return guarded(err, [&] {
        bool all_pass = true;
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& x : ids) {
            const auto rep = reproduce(x, opts);
            all_pass = all_pass && rep.pass();
            if (as_json) {
                nlohmann::ordered_json node;
                node["id"] = rep.id;
                node["pass"] = rep.pass();
                node["checks"] = nlohmann::ordered_json::array();
                for (const auto& c : rep.checks)
                    node["checks"].push_back({{"label", c.label},
                                              {"expected", c.expected},
                                              {"actual", c.actual},
                                              {"delta", c.delta()},
                                              {"tol", c.tol},
                                              {"status", c.reference ? "ref" : c.pass() ? "pass" : "FAIL"}});
                node["notes"] = rep.notes;
                j.push_back(node);
                continue;
            }
            out << "example " << rep.id << ": " << (rep.pass() ? "PASS" : "FAIL") << '\n';
            char line[256];
            std::snprintf(line, sizeof line, "  %-52s %16s %16s %10s %9s  %s\n", "check", "expected", "actual",
                          "delta", "tol", "status");
            out << line;
            for (const auto& c : rep.checks) {
                std::snprintf(line, sizeof line, "  %-52s %16.10g %16.10g %10.3g %9.2g  %s\n", c.label.c_str(),
                              c.expected, c.actual, c.delta(), c.tol,
                              c.reference ? "ref" : c.pass() ? "pass" : "FAIL");
                out << line;
            }
            for (const auto& n : rep.notes)
                out << "  note: " << n << '\n';
        }
        if (as_json)
            out << j.dump(2) << '\n';
        return all_pass ? exit_code::ok : exit_code::failure;
    });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Projected spread models: validation, spread rates, simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("spread 1.0 (rng ") + rng_algorithm + ")");

    std::string model;
    std::optional<std::string> target;
    bool all = false, as_json = false;
    RunConfig cfg;
    std::string example;

    auto* validate = app.add_subcommand("validate", "check a model file");
    validate->add_option("--model,model", model, "model JSON file")->required();

    auto* rate = app.add_subcommand("rate", "closed-form / theoretical spread rates");
    rate->add_option("--model,model", model, "model JSON file")->required();
    auto* target_opt = rate->add_option("--target", target, "explicit type to report");
    rate->add_flag("--all", all, "report every explicit type (default)")->excludes(target_opt);
    rate->add_flag("--json", as_json, "machine-readable output");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo or expansion ratios as CSV");
    simulate->add_option("--model,model", model, "model JSON file")->required();
    simulate->add_option("--seed", cfg.seed, "master seed");
    simulate->add_option("--trials", cfg.trials, "number of trials");
    simulate->add_option("--gens", cfg.generations, "generations / expansion depth N");
    simulate->add_option("--window", cfg.window, "window spec: const:k or k1,k2,...");
    simulate->add_option("--out", cfg.out, "output prefix for CSV files");
    simulate->add_flag("--full", cfg.full, "also write per-trial counts");
    simulate->add_option("--threads", cfg.threads, "worker threads (0 = all cores)");

    ReproduceOptions ro;
    auto* repro = app.add_subcommand("reproduce", "rerun a built-in example and compare with stored values");
    repro->add_option("id", example, "example id, or 'all'");
    repro->add_flag("--all", all, "run every example");
    repro->add_flag("--json", as_json, "machine-readable output");
    repro->add_option("--seed", ro.seed, "master seed for Monte Carlo checks");
    repro->add_option("--trials", ro.trials, "trials for Monte Carlo checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_code::ok : exit_code::usage;
    }

    if (validate->parsed())
        return cmd_validate(model, out, err);
    if (rate->parsed())
        return cmd_rate(model, target, as_json, out, err);
    if (simulate->parsed())
        return cmd_simulate(model, cfg, out, err);
    if (all)
        example = "all";
    if (example.empty()) {
        err << "reproduce needs an example id or --all\n";
        return exit_code::usage;
    }
    return cmd_reproduce(example, ro, as_json, out, err);
}

} // namespace spread
