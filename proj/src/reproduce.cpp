#include "spread/reproduce.hpp"

#include "spread/error.hpp"
#include "spread/fixtures.hpp"
#include "spread/random.hpp"
#include "spread/topo.hpp"

#include <algorithm>
#include <cmath>

namespace spread {

double Check::delta() const { return std::abs(actual - expected); }

bool Check::pass() const { return reference || (std::isfinite(actual) && delta() <= tol); }

bool ReproduceReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass(); });
}

const std::vector<std::string>& example_ids() {
    static const std::vector<std::string> ids{"4.1.1", "4.1.2", "4.1.3", "4.2.1", "4.2.2", "4.2.3"};
    return ids;
}

namespace {

const double sqrt3 = std::sqrt(3.0);

void exact(ReproduceReport& r, const std::string& label, bool ok) {
    r.checks.push_back({label + " (exact)", 1.0, ok ? 1.0 : 0.0, 0.0, false});
}

void near(ReproduceReport& r, const std::string& label, double expected, double actual, double tol,
          bool reference = false) {
    r.checks.push_back({label, expected, actual, tol, reference});
}

void vector_near(ReproduceReport& r, const std::string& label, const std::vector<double>& expected,
                 const std::vector<double>& actual, const std::vector<std::string>& names, double tol) {
    for (std::size_t i = 0; i < expected.size(); ++i)
        near(r, label + "[" + names.at(i) + "]", expected[i], i < actual.size() ? actual[i] : NAN, tol);
}

NonnegMatrix integer_matrix(const std::vector<std::string>& labels, const std::vector<std::vector<int>>& rows) {
    std::vector<std::vector<Rational>> r;
    for (const auto& row : rows) {
        r.emplace_back();
        for (int x : row)
            r.back().emplace_back(x);
    }
    return NonnegMatrix::from_rows(labels, r);
}

NonnegMatrix rational_matrix(const std::vector<std::string>& labels,
                             const std::vector<std::vector<const char*>>& rows) {
    std::vector<std::vector<Rational>> r;
    for (const auto& row : rows) {
        r.emplace_back();
        for (const char* x : row)
            r.back().push_back(parse_rational(x));
    }
    return NonnegMatrix::from_rows(labels, r);
}

void empirical_checks(ReproduceReport& r, const ModelSpec& spec, const std::vector<double>& rates) {
    for (int k : {1, 2}) {
        const auto pts = empirical_rate(spec.topo, spec.code, spec.start, WindowSequence::constant(k), 14);
        if (pts.empty()) {
            r.notes.push_back("no window fits below depth 14");
            continue;
        }
        const auto& last = pts.back();
        for (Symbol a = 0; a < spec.explicit_types.size(); ++a)
            near(r, "empirical N=14 const:" + std::to_string(k) + " ratio " + spec.explicit_types.name(a), rates[a],
                 last.ratios[a], 5e-3);
    }
}

void topological_common(ReproduceReport& r, const ModelSpec& spec, const ClosedFormRates& cf, double rho,
                        const std::vector<double>& w, double rate_a) {
    near(r, "rho", rho, cf.perron.rho, 1e-9);
    vector_near(r, "w", w, cf.perron.w, cf.reduced.alphabet.names(), 1e-9);
    near(r, "rate a", rate_a, cf.rates[spec.explicit_types.at("a")], 1e-9);
    empirical_checks(r, spec, cf.rates);
}

McResult run_mc(const ModelSpec& spec, int gens, const ReproduceOptions& o) {
    McConfig cfg;
    cfg.start = static_cast<Symbol>(spec.start);
    cfg.generations = gens;
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    cfg.threads = o.threads;
    cfg.ws = WindowSequence::constant(1);
    return mc_rate(spec.dist, spec.code, cfg);
}

void mc_checks(ReproduceReport& r, const ModelSpec& spec, const McResult& mc, const std::vector<double>& theory, int gens) {
    if (mc.mean_ratio.empty()) {
        r.notes.push_back("no complete window");
        return;
    }
    for (Symbol a = 0; a < spec.explicit_types.size(); ++a)
        near(r,
             "MC " + std::to_string(mc.trials.size()) + " trials N=" + std::to_string(gens) + " ratio " +
                 spec.explicit_types.name(a),
             theory[a], mc.mean_ratio.back()[a], 0.02);
}

ReproduceReport ex_4_1_1() {
    ReproduceReport r{"4.1.1", {}, {}};
    const auto spec = fixture("4.1.1");
    const auto xi = xi_matrix(spec.topo);
    exact(r, "xi-matrix", xi.same_entries(integer_matrix(xi.labels(), {{1, 1, 1}, {1, 1, 1}, {1, 1, 0}})));
    const auto cf = closed_form_rates(spec.topo, spec.code);
    topological_common(r, spec, cf, sqrt3 + 1, {(sqrt3 - 1) / 2, (sqrt3 - 1) / 2, 2 - sqrt3}, sqrt3 - 1);
    return r;
}

ReproduceReport ex_4_1_2() {
    ReproduceReport r{"4.1.2", {}, {}};
    const auto spec = fixture("4.1.2");
    const auto cf = closed_form_rates(spec.topo, spec.code);
    exact(r, "induced alphabet size 3", cf.reduced.alphabet.size() == 3);
    const auto base = xi_matrix(spec.topo);
    exact(r, "induced xi-matrix equals base", cf.xi.same_entries(base));
    exact(r, "xi-matrix", base.same_entries(integer_matrix(base.labels(), {{0, 1, 1}, {1, 1, 0}, {1, 0, 1}})));
    topological_common(r, spec, cf, 2.0, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2.0 / 3);
    return r;
}

ReproduceReport ex_4_1_3() {
    ReproduceReport r{"4.1.3", {}, {}};
    const auto spec = fixture("4.1.3");
    const auto cf = closed_form_rates(spec.topo, spec.code);
    const std::vector<std::string> listed{"(a1;(a1),(a2))", "(a1;(a2),(b))", "(a2;(a1),(a2))", "(b;(a1),(a2))"};
    exact(r, "alphabet is the 4 listed 1-patterns", cf.reduced.alphabet.names() == listed);
    exact(r, "induced xi-matrix",
          cf.xi.same_entries(integer_matrix(cf.xi.labels(), {{0, 1, 1, 0}, {0, 0, 1, 1}, {1, 0, 1, 0}, {1, 0, 1, 0}})));
    topological_common(r, spec, cf, 2.0, {2.0 / 7, 1.0 / 7, 0.5, 1.0 / 14}, 13.0 / 14);
    return r;
}

ReproduceReport ex_4_2_1(const ReproduceOptions& o) {
    ReproduceReport r{"4.2.1", {}, {}};
    const auto spec = fixture("4.2.1");
    const auto& printed = *spec.mean_matrix_override;
    const auto code = associated_code(enumerate_potential_patterns(spec.dist, 0), spec.code);
    const auto tp = theoretical_rates_from_matrix(printed, code, spec.explicit_types.size());
    near(r, "rho (printed matrix)", 4.38368, tp.perron.rho, 1e-4);
    vector_near(r, "w (printed matrix)", {0.151791, 0.114156, 0.372625, 0.127317, 0.234111}, tp.perron.w,
                spec.types.names(), 1e-5);
    vector_near(r, "rate (printed matrix)", {0.265947, 0.499942, 0.234111}, tp.rates, spec.explicit_types.names(),
                1e-5);

    const auto derived = mean_matrix(spec.dist);
    bool same_elsewhere = true;
    for (std::size_t i = 0; i < derived.size(); ++i)
        for (std::size_t j = 0; j < derived.size(); ++j)
            if (!(i == 1 && j == 1) && derived.at(i, j) != printed.at(i, j))
                same_elsewhere = false;
    exact(r, "derived mean matrix equals printed off (A2,A2)", same_elsewhere);
    exact(r, "derived mean (A2,A2) = 2/3", derived.at(1, 1) == Rational(2, 3));
    r.notes.push_back("printed mean matrix has 2/5 at (A2,A2); the distribution gives 2/3");

    const auto td = theoretical_rates(spec.dist, spec.code);
    const auto mc = run_mc(spec, 8, o);
    mc_checks(r, spec, mc, td.rates, 8);
    near(r, "trials alive", static_cast<double>(o.trials), static_cast<double>(mc.alive), 0.0);
    return r;
}

ReproduceReport ex_4_2_2(const ReproduceOptions& o) {
    ReproduceReport r{"4.2.2", {}, {}};
    const auto spec = fixture("4.2.2");
    const auto ind = induce(spec.dist, 1);
    const auto& T = spec.types;
    exact(r, "4 potential 1-patterns", ind.alphabet.items.size() == 4);
    const std::vector<std::pair<const char*, const char*>> listed{
        {"(b1;(b1),(b2))", "1/3"}, {"(b1;(b1),(b1),(b2))", "2/3"}, {"(b2;(b1))", "1/2"}, {"(b2;(b1),(b2))", "1/2"}};
    bool probs = ind.alphabet.items.size() == listed.size();
    for (std::size_t i = 0; probs && i < listed.size(); ++i)
        probs = to_string(ind.alphabet.items[i].pattern, T) == listed[i].first &&
                ind.alphabet.items[i].prob == parse_rational(listed[i].second);
    exact(r, "potential patterns and probabilities", probs);

    auto law_prob = [&](std::size_t b, std::vector<std::uint32_t> counts) {
        for (const auto& e : ind.law.law(static_cast<Symbol>(b)))
            if (e.counts == counts)
                return e.prob;
        return Rational(0);
    };
    exact(r, "p(b1)(1,0,1,0) = 1/6", law_prob(0, {1, 0, 1, 0}) == Rational(1, 6));
    exact(r, "p(b1)(0,1,0,1) = 1/3", law_prob(0, {0, 1, 0, 1}) == Rational(1, 3));
    std::vector<Rational> init(4, Rational(0));
    for (const auto& [i, p] : ind.initial[0])
        init[i] = p;
    exact(r, "initial law given b1 = (1/3,2/3,0,0)",
          init == std::vector<Rational>{Rational(1, 3), Rational(2, 3), Rational(0), Rational(0)});

    const auto td = theoretical_rates(spec.dist, spec.code);
    near(r, "rate(a) + rate(b)", 1.0, td.rates[0] + td.rates[1], 1e-9);
    near(r, "rho(M[2]) = rho(M)", perron(mean_matrix(spec.dist)).rho, td.perron.rho, 1e-9);
    near(r, "printed rho[1] (reference)", 2.22521, td.perron.rho, 0.0, true);
    near(r, "printed rate a (reference)", 0.416408, td.rates[0], 0.0, true);
    near(r, "printed rate b (reference)", 0.583592, td.rates[1], 0.0, true);
    r.notes.push_back("printed induced mean matrix row 4 and the values derived from it are typos; reference only");

    const auto mc = run_mc(spec, 12, o);
    mc_checks(r, spec, mc, td.rates, 12);
    return r;
}

ReproduceReport ex_4_2_3(const ReproduceOptions& o) {
    ReproduceReport r{"4.2.3", {}, {}};
    const auto spec = fixture("4.2.3");
    const auto ind = induce(spec.dist, 2);
    exact(r, "12 potential 2-patterns", ind.alphabet.items.size() == 12);
    const auto labels = ind.mean.labels();
    const auto printed = rational_matrix(
        labels,
        {{"1/6", "1/6", "1/3", "1/3", "0", "0", "1/3", "2/3", "0", "0", "0", "0"},
         {"1/6", "1/6", "1/3", "1/3", "0", "0", "0", "0", "1/6", "1/6", "1/3", "1/3"},
         {"0", "0", "0", "0", "1/2", "1/2", "1/3", "2/3", "0", "0", "0", "0"},
         {"0", "0", "0", "0", "1/2", "1/2", "0", "0", "1/6", "1/6", "1/3", "1/3"},
         {"0", "0", "0", "0", "0", "0", "1/3", "2/3", "0", "0", "0", "0"},
         {"0", "0", "0", "0", "0", "0", "0", "0", "1/6", "1/6", "1/3", "1/3"},
         {"1/6", "1/6", "1/3", "1/3", "0", "0", "0", "0", "0", "0", "0", "0"},
         {"0", "0", "0", "0", "1/2", "1/2", "0", "0", "0", "0", "0", "0"},
         {"1/6", "1/6", "1/3", "1/3", "0", "0", "1/3", "2/3", "0", "0", "0", "0"},
         {"1/6", "1/6", "1/3", "1/3", "0", "0", "0", "0", "1/6", "1/6", "1/3", "1/3"},
         {"0", "0", "0", "0", "1/2", "1/2", "1/3", "2/3", "0", "0", "0", "0"},
         {"0", "0", "0", "0", "1/2", "1/2", "0", "0", "1/6", "1/6", "1/3", "1/3"}});
    for (std::size_t row : {2, 4, 7}) {
        bool same = ind.mean.size() == 12;
        for (std::size_t j = 0; same && j < 12; ++j)
            same = ind.mean.at(row, j) == printed.at(row, j);
        exact(r, "induced mean row b" + std::to_string(row + 1), same);
    }
    exact(r, "induced mean matrix (all rows)", ind.mean.same_entries(printed));

    const auto td = theoretical_rates(spec.dist, spec.code);
    near(r, "rho(M[3])", 1.4201325, td.perron.rho, 1e-5);
    near(r, "rho(M[3]) = rho(base)", perron(mean_matrix(spec.dist)).rho, td.perron.rho, 1e-9);
    const std::vector<double> w{0.02662,  0.02662,  0.05324,  0.05324,  0.159734, 0.159734,
                                0.086799, 0.173599, 0.043399, 0.043399, 0.086799, 0.086799};
    std::vector<std::string> wn;
    for (int i = 1; i <= 12; ++i)
        wn.push_back("b" + std::to_string(i));
    vector_near(r, "w", w, td.perron.w, wn, 2e-3);
    vector_near(r, "rate", {0.140038, 0.280078, 0.333333, 0.246533}, td.rates, spec.explicit_types.names(), 2e-3);
    std::vector<double> pre(spec.explicit_types.size(), 0.0);
    for (std::size_t i = 0; i < td.code.size(); ++i)
        pre[td.code[i]] += td.perron.w[i];
    vector_near(r, "rate = preimage sum of derived w", pre, td.rates, spec.explicit_types.names(), 1e-6);

    const auto mc = run_mc(spec, 12, o);
    mc_checks(r, spec, mc, td.rates, 12);
    return r;
}

} // namespace

ReproduceReport reproduce(std::string_view id, const ReproduceOptions& opts) {
    if (id == "4.1.1")
        return ex_4_1_1();
    if (id == "4.1.2")
        return ex_4_1_2();
    if (id == "4.1.3")
        return ex_4_1_3();
    if (id == "4.2.1")
        return ex_4_2_1(opts);
    if (id == "4.2.2")
        return ex_4_2_2(opts);
    if (id == "4.2.3")
        return ex_4_2_3(opts);
    throw OutOfRangeError("unknown example id '" + std::string(id) + "'");
}

} // namespace spread
