#include "spread/topo.hpp"

#include "spread/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <limits>
#include <map>

namespace spread {

std::uint64_t default_node_cap() {
    if (const char* env = std::getenv("SPREAD_NODE_CAP")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return v;
    }
    return 5'000'000;
}

std::size_t MSpreadModel::arity() const {
    std::size_t d = 0;
    for (const auto& p : patterns) {
        std::deque<Pattern> todo{p};
        while (!todo.empty()) {
            const Pattern cur = todo.front();
            todo.pop_front();
            d = std::max(d, cur.arity());
            for (const auto& c : cur.children())
                todo.push_back(c);
        }
    }
    return d;
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
    case ViolationKind::empty_model: return "empty model";
    case ViolationKind::wrong_depth: return "wrong depth";
    case ViolationKind::unknown_symbol: return "unknown symbol";
    case ViolationKind::ambiguous_root: return "ambiguous root";
    case ViolationKind::missing_extension: return "missing extension";
    case ViolationKind::ambiguous_extension: return "ambiguous extension";
    }
    return "?";
}

namespace {

Symbol max_label(const Pattern& p) {
    Symbol m = p.label();
    for (const auto& c : p.children())
        m = std::max(m, max_label(c));
    return m;
}

std::string type_name(const TypeSet& types, Symbol s) {
    return s < types.size() ? types.name(s) : "#" + std::to_string(s);
}

// root (m-1)-restriction -> indices of patterns having it
std::unordered_map<Pattern, std::vector<std::size_t>, PatternHash> root_index(const MSpreadModel& model) {
    std::unordered_map<Pattern, std::vector<std::size_t>, PatternHash> idx;
    for (std::size_t i = 0; i < model.patterns.size(); ++i)
        idx[model.patterns[i].truncate(model.m - 1)].push_back(i);
    return idx;
}

} // namespace

std::vector<Violation> validate(const MSpreadModel& model) {
    std::vector<Violation> out;
    if (model.m < 1) {
        out.push_back({ViolationKind::wrong_depth, 0, {}, "pattern depth m must be >= 1"});
        return out;
    }
    if (model.patterns.empty()) {
        out.push_back({ViolationKind::empty_model, 0, {}, "model has no patterns"});
        return out;
    }
    bool symbols_ok = true;
    for (std::size_t i = 0; i < model.patterns.size(); ++i) {
        const auto& p = model.patterns[i];
        if (p.height() != model.m)
            out.push_back({ViolationKind::wrong_depth, i, {},
                           "pattern " + std::to_string(i) + " has depth " + std::to_string(p.height()) +
                               ", expected " + std::to_string(model.m)});
        if (max_label(p) >= model.types.size()) {
            symbols_ok = false;
            out.push_back({ViolationKind::unknown_symbol, i, {},
                           "pattern " + std::to_string(i) + " uses a symbol outside the type set"});
        }
    }
    if (!symbols_ok)
        return out;

    const auto roots = root_index(model);
    // report each duplicated root once, at its second occurrence
    for (std::size_t i = 0; i < model.patterns.size(); ++i) {
        const auto& key = model.patterns[i].truncate(model.m - 1);
        const auto& hits = roots.at(key);
        if (hits.size() > 1 && hits[1] == i)
            out.push_back({ViolationKind::ambiguous_root, i, {},
                           "ambiguous root " + (model.m == 1 ? model.types.name(key.label()) : to_string(key, model.types)) +
                               ": shared by " + std::to_string(hits.size()) + " patterns"});
    }
    for (std::size_t i = 0; i < model.patterns.size(); ++i) {
        const auto& p = model.patterns[i];
        const auto kids = p.children();
        for (std::uint32_t g = 0; g < kids.size(); ++g) {
            const Pattern key = kids[g].truncate(model.m - 1);
            const auto it = roots.find(key);
            const std::string what = model.m == 1 ? "type " + model.types.name(key.label())
                                                  : "pattern " + to_string(key, model.types);
            if (it == roots.end())
                out.push_back({ViolationKind::missing_extension, i, NodeAddress::root().child(g),
                               "missing extension for " + what + " (pattern " + std::to_string(i) + ", child " +
                                   std::to_string(g) + ")"});
            else if (it->second.size() > 1)
                out.push_back({ViolationKind::ambiguous_extension, i, NodeAddress::root().child(g),
                               "ambiguous extension for " + what + " (pattern " + std::to_string(i) + ", child " +
                                   std::to_string(g) + "): " + std::to_string(it->second.size()) + " candidates"});
        }
    }
    return out;
}

void require_valid(const MSpreadModel& model) {
    const auto v = validate(model);
    if (v.empty())
        return;
    std::vector<std::string> msgs;
    for (const auto& x : v)
        msgs.push_back(x.message);
    const std::string what = "invalid spread model: " + msgs.front() +
                             (msgs.size() > 1 ? " (+" + std::to_string(msgs.size() - 1) + " more)" : "");
    throw ValidationError(what, std::move(msgs));
}

std::size_t pattern_rooted_at(const MSpreadModel& model, Symbol b) {
    std::size_t found = model.patterns.size();
    std::size_t n = 0;
    for (std::size_t i = 0; i < model.patterns.size(); ++i)
        if (model.patterns[i].label() == b) {
            found = i;
            ++n;
        }
    if (n != 1)
        throw Error("no unique pattern rooted at type " + type_name(model.types, b) + " (" + std::to_string(n) +
                    " found); select the pattern explicitly");
    return found;
}

// ---------------------------------------------------------------------------
// BlockCode

BlockCode::BlockCode(int k, TypeSet explicit_types) : k_(k), explicit_(std::move(explicit_types)) {
    if (k < 0)
        throw OutOfRangeError("block depth must be >= 0");
}

BlockCode BlockCode::from_table(TypeSet explicit_types, const std::vector<Symbol>& image) {
    BlockCode code(0, std::move(explicit_types));
    for (Symbol b = 0; b < image.size(); ++b)
        code.assign(Pattern(b), image[b]);
    return code;
}

void BlockCode::assign(const Pattern& key, Symbol image) {
    if (key.height() > k_)
        throw Error("block code key deeper than k = " + std::to_string(k_));
    if (image >= explicit_.size())
        throw Error("block code image outside the explicit type set");
    const auto [it, inserted] = map_.emplace(key, image);
    if (!inserted) {
        if (it->second != image)
            throw Error("block code maps the same pattern to two explicit types");
        return;
    }
    entries_.emplace_back(key, image);
}

std::optional<Symbol> BlockCode::find(const Pattern& key) const {
    if (auto it = map_.find(key); it != map_.end())
        return it->second;
    return std::nullopt;
}

Symbol BlockCode::apply(const Pattern& key, const TypeSet& hidden) const {
    if (auto s = find(key))
        return *s;
    std::string shown;
    try {
        shown = to_string(key, hidden);
    } catch (const std::exception&) {
        shown = "<pattern outside type set>";
    }
    throw CoverageError("block code has no image for " + shown);
}

std::vector<Symbol> ReducedModel::theta(Symbol b) const {
    std::vector<Symbol> out;
    for (Symbol i = 0; i < provenance.size(); ++i)
        if (provenance[i].root_type == b)
            out.push_back(i);
    return out;
}

// ---------------------------------------------------------------------------
// xi-matrix and expansion

NonnegMatrix xi_matrix(const MSpreadModel& model) {
    require_valid(model);
    if (model.m != 1)
        throw Error("xi_matrix needs a 1-spread model (m = " + std::to_string(model.m) + ")");
    auto M = NonnegMatrix::zeros(model.types.names());
    for (const auto& p : model.patterns)
        for (const auto& c : p.children())
            M.add(p.label(), c.label(), Rational(1));
    return M;
}

namespace {

// For each pattern, the index of the extending pattern at each level-1 child.
std::vector<std::vector<std::size_t>> extension_table(const MSpreadModel& model) {
    const auto roots = root_index(model);
    std::vector<std::vector<std::size_t>> ext(model.patterns.size());
    for (std::size_t i = 0; i < model.patterns.size(); ++i)
        for (const auto& c : model.patterns[i].children())
            ext[i].push_back(roots.at(c.truncate(model.m - 1)).front());
    return ext;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

} // namespace

Pattern expand(const MSpreadModel& model, std::size_t pattern_index, int n, std::uint64_t node_cap) {
    require_valid(model);
    if (pattern_index >= model.patterns.size())
        throw OutOfRangeError("pattern index " + std::to_string(pattern_index) + " out of range");
    if (n < 0)
        throw OutOfRangeError("negative expansion depth");
    const int m = model.m;
    const auto& pats = model.patterns;
    if (n <= m)
        return pats[pattern_index].truncate(n);

    const auto ext = extension_table(model);
    const std::size_t P = pats.size();
    // logical sizes first, so the cap trips before anything is built
    std::vector<std::vector<std::uint64_t>> size(static_cast<std::size_t>(n) + 1, std::vector<std::uint64_t>(P));
    for (int lvl = 0; lvl <= n; ++lvl)
        for (std::size_t p = 0; p < P; ++p) {
            if (lvl <= m) {
                size[lvl][p] = pats[p].truncate(lvl).size();
                continue;
            }
            std::uint64_t s = 1;
            for (auto q : ext[p])
                s = sat_add(s, size[lvl - 1][q]);
            size[lvl][p] = s;
        }
    const auto need = size[n][pattern_index];
    if (need > node_cap)
        throw ResourceError("expansion to depth " + std::to_string(n) + " needs " + std::to_string(need) +
                                " nodes, over the node cap of " + std::to_string(node_cap) +
                                " (set SPREAD_NODE_CAP to raise it)",
                            node_cap, need);

    std::vector<std::vector<std::optional<Pattern>>> memo(static_cast<std::size_t>(n) + 1,
                                                          std::vector<std::optional<Pattern>>(P));
    auto rec = [&](auto& self, std::size_t p, int lvl) -> Pattern {
        auto& slot = memo[lvl][p];
        if (slot)
            return *slot;
        if (lvl <= m) {
            slot = pats[p].truncate(lvl);
        } else {
            std::vector<Pattern> kids;
            kids.reserve(ext[p].size());
            for (auto q : ext[p])
                kids.push_back(self(self, q, lvl - 1));
            slot = Pattern(pats[p].label(), std::move(kids));
        }
        return *slot;
    };
    return rec(rec, pattern_index, n);
}

Pattern project(const Pattern& pat, const BlockCode& code, const TypeSet& hidden, int horizon) {
    const int H = horizon < 0 ? pat.height() : horizon;
    const int k = code.k();
    if (H < k)
        throw InsufficientDepthError("pattern known to depth " + std::to_string(H) + " cannot be labeled by a " +
                                     std::to_string(k) + "-block code");
    const int L = H - k;
    std::vector<std::unordered_map<const void*, Pattern>> memo(static_cast<std::size_t>(L) + 1);
    auto rec = [&](auto& self, const Pattern& node, int remaining) -> Pattern {
        auto& m = memo[static_cast<std::size_t>(remaining)];
        if (auto it = m.find(node.identity()); it != m.end())
            return it->second;
        const Symbol a = k == 0 ? code.apply(Pattern(node.label()), hidden) : code.apply(node.truncate(k), hidden);
        std::vector<Pattern> kids;
        if (remaining > 0) {
            kids.reserve(node.arity());
            for (const auto& c : node.children())
                kids.push_back(self(self, c, remaining - 1));
        }
        Pattern out(a, std::move(kids));
        m.emplace(node.identity(), out);
        return out;
    };
    return rec(rec, pat, L);
}

// ---------------------------------------------------------------------------
// Reductions

namespace {

// 1-spread model over `alphabet` (indices), with each symbol's pattern over
// the source model's types.
struct Reduction {
    std::vector<Pattern> alphabet;
    MSpreadModel one;
};

std::vector<std::string> unique_names(const std::vector<Pattern>& pats, const TypeSet& types) {
    std::vector<std::string> names;
    std::map<std::string, int> seen;
    for (const auto& p : pats) {
        auto s = to_string(p, types);
        if (int n = seen[s]++; n > 0)
            s += "#" + std::to_string(n);
        names.push_back(std::move(s));
    }
    return names;
}

// m-spread model -> 1-spread model over its root (m-1)-restrictions.
Reduction reduce_to_one(const MSpreadModel& model) {
    require_valid(model);
    std::vector<std::size_t> order(model.patterns.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    if (model.m == 1)
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
            return model.patterns[a].label() < model.patterns[b].label();
        });

    Reduction r;
    std::unordered_map<Pattern, Symbol, PatternHash> index;
    for (auto i : order) {
        auto key = model.patterns[i].truncate(model.m - 1);
        index.emplace(key, static_cast<Symbol>(r.alphabet.size()));
        r.alphabet.push_back(std::move(key));
    }
    r.one.m = 1;
    r.one.types = TypeSet(unique_names(r.alphabet, model.types));
    for (std::size_t s = 0; s < order.size(); ++s) {
        const auto& p = model.patterns[order[s]];
        std::vector<Pattern> kids;
        for (const auto& c : p.children())
            kids.emplace_back(index.at(c.truncate(model.m - 1)));
        r.one.patterns.emplace_back(static_cast<Symbol>(s), std::move(kids));
    }
    return r;
}

// S^[j+1] of a 1-spread model: alphabet tau_p^j over one.types.
Reduction higher_block_impl(const MSpreadModel& one, int j) {
    require_valid(one);
    if (one.m != 1)
        throw Error("higher-block construction needs a 1-spread model");
    Reduction r;
    std::unordered_map<Pattern, Symbol, PatternHash> index;
    for (std::size_t i = 0; i < one.patterns.size(); ++i) {
        auto t = expand(one, i, j);
        if (!index.emplace(t, static_cast<Symbol>(i)).second)
            throw Error("higher-block alphabet has a repeated pattern");
        r.alphabet.push_back(std::move(t));
    }
    r.one.m = 1;
    r.one.types = TypeSet(unique_names(r.alphabet, one.types));
    for (std::size_t i = 0; i < one.patterns.size(); ++i) {
        const auto big = expand(one, i, j + 1);
        std::vector<Pattern> kids;
        for (const auto& c : big.children())
            kids.emplace_back(index.at(c));
        r.one.patterns.emplace_back(static_cast<Symbol>(i), std::move(kids));
    }
    return r;
}

// Replace every symbol of `pat` by the pattern it stands for.
Pattern flatten(const Pattern& pat, const std::vector<Pattern>& base) {
    if (pat.is_leaf())
        return base.at(pat.label());
    std::vector<Pattern> kids;
    kids.reserve(pat.arity());
    for (const auto& c : pat.children())
        kids.push_back(flatten(c, base));
    return Pattern(base.at(pat.label()).label(), std::move(kids));
}

ReducedModel finish(MSpreadModel one, std::vector<Pattern> underlying, const MSpreadModel& model, const BlockCode& code) {
    ReducedModel out;
    out.explicit_types = code.explicit_types();
    out.alphabet = TypeSet(unique_names(underlying, model.types));
    one.types = out.alphabet;
    out.one_spread = std::move(one);
    for (auto& u : underlying) {
        out.zero_code.push_back(code.k() == 0 ? code.apply(Pattern(u.label()), model.types)
                                              : code.apply(u.truncate(code.k()), model.types));
        out.provenance.push_back({u, u.label()});
    }
    return out;
}

} // namespace

ReducedModel higher_block(const MSpreadModel& one_spread, int j) {
    if (j < 0)
        throw OutOfRangeError("negative block depth");
    auto r = higher_block_impl(one_spread, j);
    ReducedModel out;
    out.explicit_types = one_spread.types;
    out.alphabet = r.one.types;
    for (auto& u : r.alphabet) {
        out.zero_code.push_back(u.label());
        out.provenance.push_back({u, u.label()});
    }
    out.one_spread = std::move(r.one);
    return out;
}

ReducedModel induce(const MSpreadModel& model, const BlockCode& code) {
    require_valid(model);
    const int m = model.m;
    const int k = code.k();

    if (k > m - 1) {
        auto base = reduce_to_one(model);
        auto hb = higher_block_impl(base.one, k - (m - 1));
        std::vector<Pattern> underlying;
        for (const auto& a : hb.alphabet)
            underlying.push_back(flatten(a, base.alphabet));
        return finish(std::move(hb.one), std::move(underlying), model, code);
    }
    if (k == m - 1) {
        auto r = reduce_to_one(model);
        return finish(std::move(r.one), std::move(r.alphabet), model, code);
    }

    // k < m-1: relabel over B^[k], every k-pattern appearing in the model,
    // then reduce the resulting (m-k)-spread model.
    std::vector<Pattern> blocks;
    std::unordered_map<Pattern, Symbol, PatternHash> block_index;
    auto lift = [&](auto& self, const Pattern& node, int depth) -> Pattern {
        auto key = node.truncate(k);
        auto [it, fresh] = block_index.emplace(key, static_cast<Symbol>(blocks.size()));
        if (fresh)
            blocks.push_back(key);
        const Symbol label = it->second;
        std::vector<Pattern> kids;
        if (depth < m - k)
            for (const auto& c : node.children())
                kids.push_back(self(self, c, depth + 1));
        return Pattern(label, std::move(kids));
    };
    MSpreadModel lifted;
    lifted.m = m - k;
    for (const auto& p : model.patterns)
        lifted.patterns.push_back(lift(lift, p, 0));
    lifted.types = TypeSet(unique_names(blocks, model.types));
    auto r = reduce_to_one(lifted);
    std::vector<Pattern> underlying;
    for (const auto& a : r.alphabet)
        underlying.push_back(flatten(a, blocks));
    return finish(std::move(r.one), std::move(underlying), model, code);
}

ClosedFormRates closed_form_rates(const MSpreadModel& model, const BlockCode& code, const PerronOptions& opts) {
    ClosedFormRates out;
    out.reduced = induce(model, code);
    out.xi = xi_matrix(out.reduced.one_spread);
    out.perron = perron(out.xi, opts);
    out.rates = preimage_sums(out.perron.w, out.reduced.zero_code, code.explicit_types().size());
    return out;
}

double closed_form_rate(const MSpreadModel& model, const BlockCode& code, Symbol a, const PerronOptions& opts) {
    if (a >= code.explicit_types().size())
        throw OutOfRangeError("explicit type index out of range");
    return closed_form_rates(model, code, opts).rates[a];
}

std::vector<EmpiricalPoint> empirical_rate(const MSpreadModel& model, const BlockCode& code, std::size_t start_pattern,
                                           const WindowSequence& ws, int depth, std::uint64_t node_cap) {
    const int k = code.k();
    if (depth < k)
        throw InsufficientDepthError("depth " + std::to_string(depth) + " is below the block depth " + std::to_string(k));
    const Pattern tau = expand(model, start_pattern, depth, node_cap);
    const Pattern proj = project(tau, code, model.types, depth);
    const int limit = std::min(depth - k, proj.height());
    const std::size_t K = code.explicit_types().size();

    std::vector<EmpiricalPoint> out;
    for (std::size_t n = 1; n + 1 <= ws.available(); ++n) {
        const auto w = windows(ws, n);
        if (w.hi > limit)
            break;
        EmpiricalPoint pt{n, w, std::vector<std::uint64_t>(K, 0), 0, std::vector<double>(K, 0.0)};
        for (Symbol a = 0; a < K; ++a) {
            pt.counts[a] = count_occurrences(proj, w, a);
            pt.total += pt.counts[a];
        }
        if (pt.total > 0)
            for (Symbol a = 0; a < K; ++a)
                pt.ratios[a] = static_cast<double>(pt.counts[a]) / static_cast<double>(pt.total);
        out.push_back(std::move(pt));
    }
    return out;
}

} // namespace spread
