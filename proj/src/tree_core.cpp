#include "spread/pattern.hpp"

#include "spread/error.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <unordered_map>

namespace spread {

NodeAddress NodeAddress::child(std::uint32_t i) const {
    NodeAddress out{path};
    out.path.push_back(i);
    return out;
}

LevelWindow::LevelWindow(int lo_, int hi_) : lo(lo_), hi(hi_) {
    if (lo < -1 || lo >= hi)
        throw OutOfRangeError("invalid level window (" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

// ---------------------------------------------------------------------------
// WindowSequence

WindowSequence WindowSequence::constant(int k) {
    if (k < 1)
        throw OutOfRangeError("window length must be >= 1");
    WindowSequence ws;
    ws.constant_ = k;
    return ws;
}

WindowSequence WindowSequence::explicit_list(std::vector<int> lengths) {
    if (lengths.empty())
        throw OutOfRangeError("explicit window list is empty");
    for (int k : lengths)
        if (k < 1)
            throw OutOfRangeError("window length must be >= 1");
    WindowSequence ws;
    ws.lengths_ = std::move(lengths);
    return ws;
}

long WindowSequence::partial_sum(std::size_t n) const {
    if (is_constant())
        return static_cast<long>(n) * constant_;
    if (n > lengths_.size())
        throw OutOfRangeError("window index " + std::to_string(n) + " beyond explicit list of " +
                              std::to_string(lengths_.size()));
    long s = 0;
    for (std::size_t i = 0; i < n; ++i)
        s += lengths_[i];
    return s;
}

std::size_t WindowSequence::available() const noexcept {
    return is_constant() ? std::numeric_limits<std::size_t>::max() : lengths_.size();
}

bool WindowSequence::nondecreasing() const noexcept {
    return std::is_sorted(lengths_.begin(), lengths_.end());
}

WindowSequence WindowSequence::parse(std::string_view spec) {
    const std::string whole(spec);
    auto bad = [&] { return ParseError("bad window spec '" + whole + "' (expected const:k or k1,k2,...)"); };
    auto to_int = [&](std::string_view s) {
        int v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || p != s.data() + s.size() || v < 1)
            throw bad();
        return v;
    };
    if (spec.starts_with("const:"))
        return constant(to_int(spec.substr(6)));
    if (spec.empty())
        throw bad();
    std::vector<int> lengths;
    for (;;) {
        const auto comma = spec.find(',');
        lengths.push_back(to_int(spec.substr(0, comma)));
        if (comma == std::string_view::npos)
            break;
        spec.remove_prefix(comma + 1);
    }
    return explicit_list(std::move(lengths));
}

std::string WindowSequence::to_string() const {
    if (is_constant())
        return "const:" + std::to_string(constant_);
    std::string out;
    for (std::size_t i = 0; i < lengths_.size(); ++i) {
        if (i)
            out += ',';
        out += std::to_string(lengths_[i]);
    }
    return out;
}

LevelWindow windows(const WindowSequence& ws, std::size_t n) {
    if (n < 1)
        throw OutOfRangeError("window index must be >= 1");
    return LevelWindow(static_cast<int>(ws.partial_sum(n)), static_cast<int>(ws.partial_sum(n + 1)));
}

// ---------------------------------------------------------------------------
// Pattern

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
    // splitmix-style finalizer over a running combination
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= h >> 31;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    return h;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return a > std::numeric_limits<std::uint64_t>::max() - b ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

} // namespace

std::shared_ptr<const Pattern::Node> Pattern::make(Symbol label, std::vector<Pattern> children) {
    std::sort(children.begin(), children.end(), [](const Pattern& a, const Pattern& b) { return compare(a, b) < 0; });
    int height = 0;
    std::uint64_t size = 1;
    std::size_t h = mix(0x51ed2701u, label);
    for (const auto& c : children) {
        height = std::max(height, c.height() + 1);
        size = sat_add(size, c.size());
        h = mix(h, c.hash());
    }
    h = mix(h, children.size());
    return std::make_shared<const Node>(Node{label, std::move(children), height, size, h});
}

Pattern::Pattern(Symbol label) : node_(make(label, {})) {}

Pattern::Pattern(Symbol label, std::vector<Pattern> children) : node_(make(label, std::move(children))) {}

std::strong_ordering compare(const Pattern& a, const Pattern& b) {
    if (a.node_ == b.node_)
        return std::strong_ordering::equal;
    if (auto c = a.label() <=> b.label(); c != 0)
        return c;
    const auto ac = a.children();
    const auto bc = b.children();
    const std::size_t n = std::min(ac.size(), bc.size());
    for (std::size_t i = 0; i < n; ++i)
        if (auto c = compare(ac[i], bc[i]); c != 0)
            return c;
    return ac.size() <=> bc.size();
}

bool operator==(const Pattern& a, const Pattern& b) {
    if (a.node_ == b.node_)
        return true;
    if (a.hash() != b.hash() || a.label() != b.label() || a.arity() != b.arity() || a.size() != b.size())
        return false;
    const auto ac = a.children();
    const auto bc = b.children();
    for (std::size_t i = 0; i < ac.size(); ++i)
        if (!(ac[i] == bc[i]))
            return false;
    return true;
}

Pattern Pattern::at(const NodeAddress& g) const {
    Pattern cur = *this;
    for (std::size_t depth = 0; depth < g.path.size(); ++depth) {
        const auto i = g.path[depth];
        if (i >= cur.arity())
            throw MissingNodeError("node at level " + std::to_string(depth + 1) + " (child index " +
                                   std::to_string(i) + ") is not in the support");
        Pattern next = cur.children()[i];
        cur = std::move(next);
    }
    return cur;
}

Pattern Pattern::truncate(int k) const {
    if (k < 0)
        throw OutOfRangeError("negative truncation depth");
    // memo keyed on (node, remaining depth)
    std::vector<std::unordered_map<const void*, Pattern>> by_depth(static_cast<std::size_t>(k) + 1);
    auto rec = [&](auto& self, const Pattern& p, int remaining) -> Pattern {
        if (p.height() <= remaining)
            return p;
        auto& m = by_depth[static_cast<std::size_t>(remaining)];
        if (auto it = m.find(p.identity()); it != m.end())
            return it->second;
        std::vector<Pattern> kids;
        if (remaining > 0) {
            kids.reserve(p.arity());
            for (const auto& c : p.children())
                kids.push_back(self(self, c, remaining - 1));
        }
        Pattern out(p.label(), std::move(kids));
        m.emplace(p.identity(), out);
        return out;
    };
    return rec(rec, *this, k);
}

Pattern Pattern::relabel(std::span<const Symbol> map) const {
    std::unordered_map<const void*, Pattern> memo;
    auto rec = [&](auto& self, const Pattern& p) -> Pattern {
        if (auto it = memo.find(p.identity()); it != memo.end())
            return it->second;
        if (p.label() >= map.size())
            throw OutOfRangeError("relabel map does not cover symbol " + std::to_string(p.label()));
        std::vector<Pattern> kids;
        kids.reserve(p.arity());
        for (const auto& c : p.children())
            kids.push_back(self(self, c));
        Pattern out(map[p.label()], std::move(kids));
        memo.emplace(p.identity(), out);
        return out;
    };
    return rec(rec, *this);
}

std::vector<std::vector<std::uint64_t>> Pattern::level_profile(std::size_t num_symbols) const {
    using Profile = std::vector<std::vector<std::uint64_t>>;
    std::unordered_map<const void*, std::shared_ptr<const Profile>> memo;
    auto rec = [&](auto& self, const Pattern& p) -> std::shared_ptr<const Profile> {
        if (auto it = memo.find(p.identity()); it != memo.end())
            return it->second;
        if (p.label() >= num_symbols)
            throw OutOfRangeError("symbol " + std::to_string(p.label()) + " outside profile alphabet");
        auto prof = std::make_shared<Profile>(static_cast<std::size_t>(p.height()) + 1,
                                              std::vector<std::uint64_t>(num_symbols, 0));
        (*prof)[0][p.label()] = 1;
        for (const auto& c : p.children()) {
            const auto sub = self(self, c);
            for (std::size_t lvl = 0; lvl < sub->size(); ++lvl)
                for (std::size_t s = 0; s < num_symbols; ++s)
                    (*prof)[lvl + 1][s] = sat_add((*prof)[lvl + 1][s], (*sub)[lvl][s]);
        }
        memo.emplace(p.identity(), prof);
        return prof;
    };
    return *rec(rec, *this);
}

std::uint64_t count_occurrences(const Pattern& pat, const LevelWindow& window, Symbol t) {
    if (window.hi > pat.height())
        throw OutOfRangeError("window (" + std::to_string(window.lo) + ", " + std::to_string(window.hi) +
                              "] exceeds pattern depth " + std::to_string(pat.height()));
    Symbol max_label = 0;
    {
        std::unordered_map<const void*, Symbol> memo;
        auto rec = [&](auto& self, const Pattern& p) -> Symbol {
            if (auto it = memo.find(p.identity()); it != memo.end())
                return it->second;
            Symbol m = p.label();
            for (const auto& c : p.children())
                m = std::max(m, self(self, c));
            memo.emplace(p.identity(), m);
            return m;
        };
        max_label = rec(rec, pat);
    }
    const auto prof = pat.level_profile(std::max<std::size_t>(max_label, t) + 1);
    std::uint64_t total = 0;
    for (int lvl = std::max(window.lo + 1, 0); lvl <= window.hi; ++lvl)
        total = sat_add(total, prof[static_cast<std::size_t>(lvl)][t]);
    return total;
}

Pattern subpattern_at(const Pattern& pat, const NodeAddress& g, int k, int horizon) {
    if (k < 0)
        throw OutOfRangeError("negative block depth");
    const Pattern node = pat.at(g);
    const int limit = horizon < 0 ? pat.height() : horizon;
    if (static_cast<int>(g.level()) + k > limit)
        throw InsufficientDepthError("subtree at level " + std::to_string(g.level()) + " is not complete to depth " +
                                     std::to_string(k) + " (pattern known to depth " + std::to_string(limit) + ")");
    return node.truncate(k);
}

// ---------------------------------------------------------------------------
// Serialization

std::string to_string(const Pattern& pat, const TypeSet& types) {
    std::string out = "(" + types.name(pat.label());
    if (!pat.is_leaf()) {
        out += ';';
        bool first = true;
        for (const auto& c : pat.children()) {
            if (!first)
                out += ',';
            first = false;
            out += to_string(c, types);
        }
    }
    out += ')';
    return out;
}

namespace {

class PatternParser {
public:
    PatternParser(std::string_view text, const TypeSet& types) : text_(text), types_(types) {}

    Pattern parse() {
        Pattern p = node();
        if (pos_ != text_.size())
            fail("trailing characters");
        return p;
    }

private:
    Pattern node() {
        expect('(');
        const auto start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ';' && text_[pos_] != ')' && text_[pos_] != '(' &&
               text_[pos_] != ',')
            ++pos_;
        const Symbol label = types_.at(text_.substr(start, pos_ - start));
        std::vector<Pattern> kids;
        if (peek() == ';') {
            ++pos_;
            kids.push_back(node());
            while (peek() == ',') {
                ++pos_;
                kids.push_back(node());
            }
        }
        expect(')');
        return Pattern(label, std::move(kids));
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void expect(char c) {
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw ParseError("pattern '" + std::string(text_) + "': " + why + " at offset " + std::to_string(pos_), 1,
                         pos_ + 1);
    }

    std::string_view text_;
    const TypeSet& types_;
    std::size_t pos_ = 0;
};

} // namespace

Pattern parse_pattern(std::string_view text, const TypeSet& types) {
    return PatternParser(text, types).parse();
}

} // namespace spread
