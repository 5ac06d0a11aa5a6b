#pragma once

#include "spread/types.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spread {

/// Address of a node in the conventional d-tree: child indices from the root.
/// Indices refer to the canonical child order of the pattern being addressed.
struct NodeAddress {
    std::vector<std::uint32_t> path;

    std::size_t level() const noexcept { return path.size(); }
    static NodeAddress root() { return {}; }
    NodeAddress child(std::uint32_t i) const;
    bool operator==(const NodeAddress&) const = default;
};

/// Half-open level shell (lo, hi]: levels lo+1 .. hi. lo may be -1 so the
/// root level can be addressed.
struct LevelWindow {
    int lo;
    int hi;

    LevelWindow(int lo_, int hi_);
    bool contains(int level) const noexcept { return level > lo && level <= hi; }
    bool operator==(const LevelWindow&) const = default;
};

/// Window lengths k_1, k_2, ... with partial sums s_n = k_1 + ... + k_n.
class WindowSequence {
public:
    static WindowSequence constant(int k);
    static WindowSequence explicit_list(std::vector<int> lengths);

    bool is_constant() const noexcept { return lengths_.empty(); }
    int constant_length() const noexcept { return constant_; }
    const std::vector<int>& lengths() const noexcept { return lengths_; }

    /// s_n; s_0 = 0. Throws OutOfRangeError past the end of an explicit list.
    long partial_sum(std::size_t n) const;
    /// Number of k_n available (SIZE_MAX for constant sequences).
    std::size_t available() const noexcept;
    /// True when an explicit list is nondecreasing (the k_n -> infinity regime
    /// can only be approximated by such lists).
    bool nondecreasing() const noexcept;

    /// "const:k" or "k1,k2,...".
    static WindowSequence parse(std::string_view spec);
    std::string to_string() const;

private:
    int constant_ = 0;
    std::vector<int> lengths_;
};

/// Window n (n >= 1) of the sequence: (s_n, s_{n+1}].
LevelWindow windows(const WindowSequence& ws, std::size_t n);

/// Finite rooted labeled tree, immutable, canonical (children sorted), with
/// structurally shared subtrees. Copies are cheap.
class Pattern {
public:
    explicit Pattern(Symbol label);
    Pattern(Symbol label, std::vector<Pattern> children);

    Symbol label() const noexcept { return node_->label; }
    std::span<const Pattern> children() const noexcept { return node_->children; }
    std::size_t arity() const noexcept { return node_->children.size(); }
    bool is_leaf() const noexcept { return node_->children.empty(); }
    /// Number of levels below the root (0 for a single node).
    int height() const noexcept { return node_->height; }
    /// Number of nodes in the support (saturates at UINT64_MAX).
    std::uint64_t size() const noexcept { return node_->size; }
    std::size_t hash() const noexcept { return node_->hash; }

    /// Subtree at g; throws MissingNodeError.
    Pattern at(const NodeAddress& g) const;
    /// Restriction to levels 0..k.
    Pattern truncate(int k) const;
    /// Same shape with labels replaced via map[label].
    Pattern relabel(std::span<const Symbol> map) const;

    /// counts[level][symbol] for levels 0..height(); num_symbols must exceed
    /// every label. Shared subtrees are counted once per occurrence but
    /// computed once.
    std::vector<std::vector<std::uint64_t>> level_profile(std::size_t num_symbols) const;

    /// Total order: root label, then children lexicographically.
    friend std::strong_ordering compare(const Pattern& a, const Pattern& b);
    friend bool operator==(const Pattern& a, const Pattern& b);
    friend std::strong_ordering operator<=>(const Pattern& a, const Pattern& b) { return compare(a, b); }

    const void* identity() const noexcept { return node_.get(); }

private:
    struct Node {
        Symbol label;
        std::vector<Pattern> children;
        int height;
        std::uint64_t size;
        std::size_t hash;
    };
    explicit Pattern(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static std::shared_ptr<const Node> make(Symbol label, std::vector<Pattern> children);

    std::shared_ptr<const Node> node_;
};

struct PatternHash {
    std::size_t operator()(const Pattern& p) const noexcept { return p.hash(); }
};

/// |{g in F_p : window.lo < |g| <= window.hi, p(g) = t}|.
/// Throws OutOfRangeError when window.hi exceeds the pattern height.
std::uint64_t count_occurrences(const Pattern& pat, const LevelWindow& window, Symbol t);

/// Depth-k pattern rooted at g. `horizon` is the depth to which the enclosing
/// pattern is known to be complete (defaults to its height); |g| + k must not
/// exceed it.
Pattern subpattern_at(const Pattern& pat, const NodeAddress& g, int k, int horizon = -1);

/// Canonical bracket form: "(b)" for a leaf, "(b;(c),(d;(e)))" otherwise.
std::string to_string(const Pattern& pat, const TypeSet& types);
/// Inverse of to_string; children may appear in any order. Throws ParseError.
Pattern parse_pattern(std::string_view text, const TypeSet& types);

} // namespace spread
