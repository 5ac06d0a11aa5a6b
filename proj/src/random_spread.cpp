#include "spread/random.hpp"

#include "spread/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <thread>

namespace spread {

std::uint64_t OffspringEntry::total() const {
    std::uint64_t t = 0;
    for (auto c : counts)
        t += c;
    return t;
}

SpreadDistribution::SpreadDistribution(TypeSet types, std::vector<std::vector<OffspringEntry>> laws)
    : types_(std::move(types)), laws_(std::move(laws)) {
    if (laws_.size() != types_.size())
        throw Error("distribution has " + std::to_string(laws_.size()) + " laws for " +
                    std::to_string(types_.size()) + " types");
    for (Symbol b = 0; b < laws_.size(); ++b)
        for (const auto& e : laws_[b]) {
            if (e.counts.size() != types_.size())
                throw Error("offspring vector of type " + types_.name(b) + " has wrong length");
            if (e.prob <= 0 || e.prob > 1)
                throw Error("probability " + format_rational(e.prob) + " of type " + types_.name(b) +
                            " outside (0, 1]");
        }
}

std::uint64_t SpreadDistribution::arity() const {
    std::uint64_t d = 0;
    for (const auto& law : laws_)
        for (const auto& e : law)
            d = std::max(d, e.total());
    return d;
}

std::vector<std::string> validate(const SpreadDistribution& dist) {
    std::vector<std::string> out;
    if (dist.size() == 0)
        out.push_back("distribution has no types");
    bool singular = dist.size() > 0;
    for (Symbol b = 0; b < dist.size(); ++b) {
        const auto& law = dist.law(b);
        if (law.empty()) {
            out.push_back("type " + dist.types().name(b) + " has no offspring entries");
            singular = false;
            continue;
        }
        Rational sum = 0;
        for (const auto& e : law) {
            sum += e.prob;
            if (e.total() != 1)
                singular = false;
        }
        if (sum != 1)
            out.push_back("probabilities of type " + dist.types().name(b) + " sum to " + format_rational(sum));
    }
    if (singular)
        out.push_back("singular process: every individual has exactly one child");
    return out;
}

void require_valid(const SpreadDistribution& dist) {
    auto v = validate(dist);
    if (!v.empty()) {
        auto head = v.front();
        throw ValidationError("invalid spread distribution: " + head, std::move(v));
    }
}

NonnegMatrix mean_matrix(const SpreadDistribution& dist) {
    require_valid(dist);
    auto M = NonnegMatrix::zeros(dist.types().names());
    for (Symbol i = 0; i < dist.size(); ++i)
        for (const auto& e : dist.law(i))
            for (Symbol j = 0; j < dist.size(); ++j)
                if (e.counts[j])
                    M.add(i, j, e.prob * e.counts[j]);
    return M;
}

// ---------------------------------------------------------------------------
// Simulation

SimulationLimits SimulationLimits::from_env() {
    SimulationLimits l;
    if (const char* env = std::getenv("SPREAD_NODE_CAP")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            l.population_cap = v;
    }
    return l;
}

std::uint64_t Trajectory::total(std::size_t n) const {
    std::uint64_t t = 0;
    for (auto c : counts.at(n))
        t += c;
    return t;
}

bool Trajectory::extinct() const { return !counts.empty() && total(counts.size() - 1) == 0; }

OffspringSampler::OffspringSampler(const SpreadDistribution& dist) {
    for (Symbol b = 0; b < dist.size(); ++b) {
        std::vector<double> cum;
        Rational acc = 0;
        for (const auto& e : dist.law(b)) {
            acc += e.prob;
            cum.push_back(to_double(acc));
        }
        if (!cum.empty())
            cum.back() = 1.0;
        cumulative_.push_back(std::move(cum));
    }
}

std::size_t OffspringSampler::draw(Symbol b, Rng& rng) const {
    const auto& cum = cumulative_[b];
    const double u = rng.uniform();
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    return it == cum.end() ? cum.size() - 1 : static_cast<std::size_t>(it - cum.begin());
}

std::vector<std::vector<std::uint64_t>> simulate_counts_from(const SpreadDistribution& dist, const OffspringSampler& sampler,
                                                             std::vector<std::uint64_t> initial, int generations, Rng& rng,
                                                             const SimulationLimits& limits) {
    if (generations < 0)
        throw OutOfRangeError("negative generation count");
    const std::size_t K = dist.size();
    std::vector<std::vector<std::uint64_t>> out;
    std::uint64_t seen = 0;
    for (auto c : initial)
        seen += c;
    out.push_back(std::move(initial));
    for (int n = 1; n <= generations; ++n) {
        const auto& cur = out.back();
        std::vector<std::uint64_t> next(K, 0);
        std::uint64_t born = 0;
        for (Symbol i = 0; i < K; ++i) {
            const auto& law = dist.law(i);
            for (std::uint64_t r = 0; r < cur[i]; ++r) {
                const auto& e = law[sampler.draw(i, rng)];
                for (std::size_t j = 0; j < K; ++j)
                    next[j] += e.counts[j];
                born += e.total();
            }
            if (seen + born > limits.population_cap)
                throw ResourceError("population cap of " + std::to_string(limits.population_cap) +
                                        " individuals exceeded at generation " + std::to_string(n),
                                    limits.population_cap, static_cast<std::size_t>(n));
        }
        seen += born;
        out.push_back(std::move(next));
    }
    return out;
}

Trajectory simulate_counts(const SpreadDistribution& dist, Symbol start, int generations, std::uint64_t seed,
                           const SimulationLimits& limits) {
    require_valid(dist);
    if (start >= dist.size())
        throw OutOfRangeError("start type out of range");
    std::vector<std::uint64_t> init(dist.size(), 0);
    init[start] = 1;
    Rng rng(seed);
    OffspringSampler sampler(dist);
    Trajectory t;
    t.seed = seed;
    t.counts = simulate_counts_from(dist, sampler, std::move(init), generations, rng, limits);
    return t;
}

Pattern simulate_tree(const SpreadDistribution& dist, Symbol start, int generations, std::uint64_t seed,
                      std::uint64_t node_cap) {
    require_valid(dist);
    if (start >= dist.size())
        throw OutOfRangeError("start type out of range");
    if (generations < 0)
        throw OutOfRangeError("negative generation count");
    struct Node {
        Symbol type;
        std::vector<std::size_t> kids;
    };
    OffspringSampler sampler(dist);
    Rng rng(seed);
    std::vector<std::vector<Node>> levels{{Node{start, {}}}};
    std::uint64_t total = 1;
    for (int n = 0; n < generations; ++n) {
        auto& cur = levels.back();
        std::vector<Node> next;
        // same draw order as simulate_counts: type by type, then in order
        std::vector<std::size_t> order(cur.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return cur[a].type < cur[b].type; });
        for (auto idx : order) {
            const Symbol b = cur[idx].type;
            const auto& e = dist.law(b)[sampler.draw(b, rng)];
            total += e.total();
            if (total > node_cap)
                throw ResourceError("realization exceeds the node cap of " + std::to_string(node_cap) +
                                        " at generation " + std::to_string(n + 1),
                                    node_cap, static_cast<std::size_t>(n + 1));
            for (Symbol c = 0; c < dist.size(); ++c)
                for (std::uint32_t r = 0; r < e.counts[c]; ++r) {
                    cur[idx].kids.push_back(next.size());
                    next.push_back(Node{c, {}});
                }
        }
        levels.push_back(std::move(next));
    }
    std::vector<Pattern> below;
    for (auto lvl = levels.size(); lvl-- > 0;) {
        std::vector<Pattern> here;
        here.reserve(levels[lvl].size());
        for (const auto& node : levels[lvl]) {
            std::vector<Pattern> kids;
            kids.reserve(node.kids.size());
            for (auto c : node.kids)
                kids.push_back(below[c]);
            here.emplace_back(node.type, std::move(kids));
        }
        below = std::move(here);
    }
    return below.front();
}

// ---------------------------------------------------------------------------
// Potential patterns

std::vector<std::size_t> PotentialPatternSet::rooted_at(Symbol b) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < items.size(); ++i)
        if (items[i].pattern.label() == b)
            out.push_back(i);
    return out;
}

std::optional<std::size_t> PotentialPatternSet::index_of(const Pattern& p) const {
    if (auto it = index.find(p); it != index.end())
        return it->second;
    return std::nullopt;
}

TypeSet PotentialPatternSet::names() const {
    std::vector<std::string> n;
    for (const auto& it : items)
        n.push_back(k == 0 ? base.name(it.pattern.label()) : to_string(it.pattern, base));
    return TypeSet(std::move(n));
}

namespace {

using Weighted = std::vector<PotentialPattern>;

// Adds (p, w) to `acc`, summing probabilities of equal patterns, first
// occurrence fixing the order.
void merge_into(Weighted& acc, std::unordered_map<Pattern, std::size_t, PatternHash>& where, Pattern p, Rational w) {
    auto [it, fresh] = where.emplace(p, acc.size());
    if (fresh)
        acc.push_back({std::move(p), std::move(w)});
    else
        acc[it->second].prob += w;
}

std::uint64_t combos(const std::vector<const Weighted*>& options, std::uint64_t cap) {
    std::uint64_t n = 1;
    for (auto* o : options) {
        if (o->empty())
            return 0;
        if (n > cap / o->size())
            return cap + 1;
        n *= o->size();
    }
    return n;
}

// Odometer over one choice per slot, last slot fastest.
template <class F>
void for_each_choice(const std::vector<const Weighted*>& options, F&& f) {
    std::vector<std::size_t> pick(options.size(), 0);
    for (;;) {
        f(pick);
        std::size_t s = options.size();
        while (s > 0) {
            --s;
            if (++pick[s] < options[s]->size())
                break;
            pick[s] = 0;
            if (s == 0)
                return;
        }
        if (options.empty())
            return;
    }
}

class Enumerator {
public:
    Enumerator(const SpreadDistribution& dist, const EnumerationLimits& limits) : dist_(dist), limits_(limits) {}

    const Weighted& patterns(Symbol b, int k) {
        const auto key = std::make_pair(b, k);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        Weighted out;
        std::unordered_map<Pattern, std::size_t, PatternHash> where;
        if (k == 0) {
            out.push_back({Pattern(b), Rational(1)});
        } else {
            for (const auto& e : dist_.law(b)) {
                std::vector<Symbol> kids;
                for (Symbol c = 0; c < dist_.size(); ++c)
                    for (std::uint32_t r = 0; r < e.counts[c]; ++r)
                        kids.push_back(c);
                std::vector<const Weighted*> options;
                for (auto c : kids)
                    options.push_back(&patterns(c, k - 1));
                if (combos(options, limits_.pattern_cap) > limits_.pattern_cap)
                    throw ResourceError("potential " + std::to_string(k) + "-patterns rooted at " +
                                            dist_.types().name(b) + " exceed the cap of " +
                                            std::to_string(limits_.pattern_cap),
                                        limits_.pattern_cap, out.size());
                for_each_choice(options, [&](const std::vector<std::size_t>& pick) {
                    Rational w = e.prob;
                    std::vector<Pattern> sub;
                    for (std::size_t s = 0; s < options.size(); ++s) {
                        const auto& o = (*options[s])[pick[s]];
                        w *= o.prob;
                        sub.push_back(o.pattern);
                    }
                    merge_into(out, where, Pattern(b, std::move(sub)), std::move(w));
                });
                if (out.size() > limits_.pattern_cap)
                    throw ResourceError("potential pattern cap exceeded", limits_.pattern_cap, out.size());
            }
        }
        return memo_.emplace(key, std::move(out)).first->second;
    }

private:
    const SpreadDistribution& dist_;
    EnumerationLimits limits_;
    std::map<std::pair<Symbol, int>, Weighted> memo_;
};

// Law of the completed k-pattern of a node whose (k-1)-pattern `node` is
// known: each node at relative depth `remaining` = 0 draws its offspring.
Weighted extensions(const SpreadDistribution& dist, const Pattern& node, int remaining) {
    Weighted out;
    std::unordered_map<Pattern, std::size_t, PatternHash> where;
    if (remaining == 0) {
        for (const auto& e : dist.law(node.label())) {
            std::vector<Pattern> kids;
            for (Symbol c = 0; c < dist.size(); ++c)
                for (std::uint32_t r = 0; r < e.counts[c]; ++r)
                    kids.emplace_back(c);
            merge_into(out, where, Pattern(node.label(), std::move(kids)), e.prob);
        }
        return out;
    }
    if (node.is_leaf()) {
        // line died out above the frontier
        out.push_back({node, Rational(1)});
        return out;
    }
    std::vector<Weighted> per_child;
    for (const auto& c : node.children())
        per_child.push_back(extensions(dist, c, remaining - 1));
    std::vector<const Weighted*> options;
    for (const auto& w : per_child)
        options.push_back(&w);
    for_each_choice(options, [&](const std::vector<std::size_t>& pick) {
        Rational w = 1;
        std::vector<Pattern> sub;
        for (std::size_t s = 0; s < options.size(); ++s) {
            w *= (*options[s])[pick[s]].prob;
            sub.push_back((*options[s])[pick[s]].pattern);
        }
        merge_into(out, where, Pattern(node.label(), std::move(sub)), std::move(w));
    });
    return out;
}

} // namespace

PotentialPatternSet enumerate_potential_patterns(const SpreadDistribution& dist, int k, const EnumerationLimits& limits) {
    require_valid(dist);
    if (k < 0)
        throw OutOfRangeError("negative block depth");
    PotentialPatternSet set;
    set.k = k;
    set.base = dist.types();
    Enumerator en(dist, limits);
    for (Symbol b = 0; b < dist.size(); ++b)
        for (const auto& item : en.patterns(b, k)) {
            set.index.emplace(item.pattern, set.items.size());
            set.items.push_back(item);
            if (set.items.size() > limits.pattern_cap)
                throw ResourceError("potential pattern cap exceeded", limits.pattern_cap, set.items.size());
        }
    return set;
}

InducedModel induce(const SpreadDistribution& dist, int k, const EnumerationLimits& limits) {
    require_valid(dist);
    InducedModel out;
    out.k = k;
    out.alphabet = enumerate_potential_patterns(dist, k, limits);
    out.initial.resize(dist.size());
    for (std::size_t i = 0; i < out.alphabet.items.size(); ++i) {
        const auto& it = out.alphabet.items[i];
        out.initial[it.pattern.label()].emplace_back(i, it.prob);
    }
    if (k == 0) {
        out.law = dist;
        out.mean = mean_matrix(dist);
        return out;
    }

    const std::size_t KK = out.alphabet.items.size();
    const auto names = out.alphabet.names();
    std::vector<std::vector<OffspringEntry>> laws;
    std::vector<Rational> marginal_mean(KK * KK);
    std::uint64_t cells = 0;
    for (std::size_t bi = 0; bi < KK; ++bi) {
        const Pattern& P = out.alphabet.items[bi].pattern;
        // conditional law of each child's k-pattern, as alphabet indices
        std::vector<Weighted> child_laws;
        for (const auto& c : P.children()) {
            Weighted w = extensions(dist, c, k - 1);
            for (const auto& x : w) {
                const auto idx = out.alphabet.index_of(x.pattern);
                if (!idx)
                    throw Error("induced law reaches a pattern missing from the enumeration: " +
                                to_string(x.pattern, dist.types()));
                marginal_mean[bi * KK + *idx] += x.prob;
            }
            child_laws.push_back(std::move(w));
        }
        std::vector<const Weighted*> options;
        for (const auto& w : child_laws)
            options.push_back(&w);
        const auto n_out = combos(options, limits.outcome_cap);
        if (n_out > limits.outcome_cap)
            throw ResourceError("induced offspring law of " + names.name(static_cast<Symbol>(bi)) +
                                    " exceeds the outcome cap of " + std::to_string(limits.outcome_cap),
                                limits.outcome_cap, 0);
        cells += n_out * KK;
        if (cells > limits.law_cell_cap)
            throw ResourceError("induced law over " + std::to_string(KK) + " potential " + std::to_string(k) +
                                    "-patterns needs more than " + std::to_string(limits.law_cell_cap) + " count cells",
                                limits.law_cell_cap, cells);
        std::vector<OffspringEntry> law;
        std::map<std::vector<std::uint32_t>, std::size_t> where;
        for_each_choice(options, [&](const std::vector<std::size_t>& pick) {
            std::vector<std::uint32_t> counts(KK, 0);
            Rational w = 1;
            for (std::size_t s = 0; s < options.size(); ++s) {
                const auto& x = (*options[s])[pick[s]];
                w *= x.prob;
                ++counts[*out.alphabet.index_of(x.pattern)];
            }
            auto [it, fresh] = where.emplace(counts, law.size());
            if (fresh)
                law.push_back({std::move(counts), std::move(w)});
            else
                law[it->second].prob += w;
        });
        laws.push_back(std::move(law));
    }
    out.law = SpreadDistribution(names, std::move(laws));
    out.mean = mean_matrix(out.law);

    // expectation identity: joint law and child marginals must agree
    for (std::size_t i = 0; i < KK; ++i)
        for (std::size_t j = 0; j < KK; ++j)
            if (out.mean.at(i, j) != marginal_mean[i * KK + j])
                throw Error("induced mean matrix inconsistent with child marginals at (" + names.name(i) + ", " +
                            names.name(j) + ")");
    return out;
}

std::vector<Symbol> associated_code(const PotentialPatternSet& alphabet, const BlockCode& code) {
    if (code.k() != alphabet.k)
        throw Error("block code depth " + std::to_string(code.k()) + " does not match pattern depth " +
                    std::to_string(alphabet.k));
    std::vector<Symbol> out;
    for (const auto& it : alphabet.items)
        out.push_back(code.apply(it.pattern, alphabet.base));
    return out;
}

std::vector<std::uint64_t> project_counts(std::span<const std::uint64_t> counts, std::span<const Symbol> code,
                                          std::size_t n_explicit) {
    if (counts.size() > code.size())
        throw CoverageError("code covers " + std::to_string(code.size()) + " symbols, counts have " +
                            std::to_string(counts.size()));
    std::vector<std::uint64_t> out(n_explicit, 0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (code[i] >= n_explicit)
            throw CoverageError("code image of symbol " + std::to_string(i) + " outside the explicit types");
        out[code[i]] += counts[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rates

TheoreticalRates theoretical_rates_from_matrix(const NonnegMatrix& mean, std::vector<Symbol> code, std::size_t n_explicit,
                                               const PerronOptions& opts) {
    TheoreticalRates out;
    out.mean = mean;
    out.perron = perron(mean, opts);
    if (!(out.perron.rho > 1.0))
        throw RegimeError("process is not supercritical (rho = " + std::to_string(out.perron.rho) +
                          "); rates are only defined on non-extinction of a supercritical process");
    out.rates = preimage_sums(out.perron.w, code, n_explicit);
    out.code = std::move(code);
    return out;
}

TheoreticalRates theoretical_rates(const SpreadDistribution& dist, const BlockCode& code, const PerronOptions& opts,
                                   const EnumerationLimits& limits) {
    const auto induced = induce(dist, code.k(), limits);
    return theoretical_rates_from_matrix(induced.mean, associated_code(induced.alphabet, code),
                                         code.explicit_types().size(), opts);
}

double theoretical_rate(const SpreadDistribution& dist, const BlockCode& code, Symbol a, const PerronOptions& opts) {
    if (a >= code.explicit_types().size())
        throw OutOfRangeError("explicit type index out of range");
    return theoretical_rates(dist, code, opts).rates[a];
}

McResult mc_rate(const SpreadDistribution& dist, const BlockCode& code, const McConfig& cfg) {
    require_valid(dist);
    if (cfg.trials < 1)
        throw OutOfRangeError("need at least one trial");
    if (cfg.generations < 0)
        throw OutOfRangeError("negative generation count");
    if (cfg.start >= dist.size())
        throw OutOfRangeError("start type out of range");

    const auto induced = induce(dist, code.k(), cfg.enumeration);
    const auto chain_code = associated_code(induced.alphabet, code);
    const std::size_t KA = code.explicit_types().size();
    const OffspringSampler sampler(induced.law);
    std::vector<double> init_cum;
    std::vector<std::size_t> init_sym;
    {
        Rational acc = 0;
        for (const auto& [sym, p] : induced.initial[cfg.start]) {
            acc += p;
            init_cum.push_back(to_double(acc));
            init_sym.push_back(sym);
        }
        init_cum.back() = 1.0;
    }

    McResult res;
    for (std::size_t n = 1; n + 1 <= cfg.ws.available(); ++n) {
        const auto w = windows(cfg.ws, n);
        if (w.hi > cfg.generations)
            break;
        res.windows.push_back(w);
    }

    res.trials.resize(cfg.trials);
    std::vector<std::exception_ptr> errors(cfg.trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cfg.trials; i = next++) {
            try {
                auto& t = res.trials[i];
                t.seed = trial_seed(cfg.seed, i);
                Rng rng(t.seed);
                std::vector<std::uint64_t> init(induced.alphabet.items.size(), 0);
                if (init_sym.size() == 1) {
                    init[init_sym[0]] = 1;
                } else {
                    const double u = rng.uniform();
                    auto it = std::upper_bound(init_cum.begin(), init_cum.end(), u);
                    if (it == init_cum.end())
                        --it;
                    init[init_sym[static_cast<std::size_t>(it - init_cum.begin())]] = 1;
                }
                t.hidden = simulate_counts_from(induced.law, sampler, std::move(init), cfg.generations, rng, cfg.limits);
                for (const auto& z : t.hidden)
                    t.projected.push_back(project_counts(z, chain_code, KA));
                std::uint64_t last = 0;
                for (auto c : t.projected.back())
                    last += c;
                t.alive = last > 0;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned nthreads =
        std::max(1u, std::min<unsigned>(cfg.threads ? cfg.threads : std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(cfg.trials)));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    // aggregate in trial order so the sums do not depend on scheduling
    const std::size_t W = res.windows.size();
    std::vector<std::vector<double>> sum(W, std::vector<double>(KA, 0.0)), sq = sum;
    for (const auto& t : res.trials) {
        if (!t.alive) {
            ++res.extinct;
            continue;
        }
        ++res.alive;
        for (std::size_t wi = 0; wi < W; ++wi) {
            std::vector<double> num(KA, 0.0);
            double den = 0.0;
            for (int r = res.windows[wi].lo + 1; r <= res.windows[wi].hi; ++r)
                for (std::size_t a = 0; a < KA; ++a) {
                    num[a] += static_cast<double>(t.projected[r][a]);
                    den += static_cast<double>(t.projected[r][a]);
                }
            for (std::size_t a = 0; a < KA; ++a) {
                const double x = num[a] / den;
                sum[wi][a] += x;
                sq[wi][a] += x * x;
            }
        }
    }
    if (res.alive == 0)
        throw EstimationError("all " + std::to_string(cfg.trials) + " trials went extinct before generation " +
                              std::to_string(cfg.generations));
    const double n = static_cast<double>(res.alive);
    res.mean_ratio.assign(W, std::vector<double>(KA, 0.0));
    res.std_error = res.mean_ratio;
    for (std::size_t wi = 0; wi < W; ++wi)
        for (std::size_t a = 0; a < KA; ++a) {
            const double mean = sum[wi][a] / n;
            res.mean_ratio[wi][a] = mean;
            if (res.alive > 1) {
                const double var = std::max(0.0, (sq[wi][a] - n * mean * mean) / (n - 1.0));
                res.std_error[wi][a] = std::sqrt(var / n);
            }
        }
    return res;
}

std::vector<double> w_diagnostic(const std::vector<std::vector<std::uint64_t>>& counts, double rho) {
    if (!(rho > 0.0))
        throw OutOfRangeError("rho must be positive");
    std::vector<double> out;
    double scale = 1.0;
    for (const auto& z : counts) {
        double t = 0.0;
        for (auto c : z)
            t += static_cast<double>(c);
        out.push_back(t / scale);
        scale *= rho;
    }
    return out;
}

std::vector<double> w_diagnostic(const Trajectory& traj, double rho) { return w_diagnostic(traj.counts, rho); }

} // namespace spread
