#pragma once

#include "spread/pattern.hpp"
#include "spread/spectral.hpp"
#include "spread/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace spread {

/// Node cap for a single expansion: SPREAD_NODE_CAP if set, else 5,000,000.
std::uint64_t default_node_cap();

/// Deterministic m-spread model: a finite set of depth-m patterns over `types`
/// closed under unique one-level extension.
struct MSpreadModel {
    int m = 1;
    TypeSet types;
    std::vector<Pattern> patterns;

    /// Largest number of children at any node of any pattern.
    std::size_t arity() const;
};

enum class ViolationKind {
    empty_model,
    wrong_depth,
    unknown_symbol,
    ambiguous_root,
    missing_extension,
    ambiguous_extension,
};

struct Violation {
    ViolationKind kind;
    std::size_t pattern = 0;
    NodeAddress node;
    std::string message;
};

std::string to_string(ViolationKind kind);

/// Every invariant breach of the model; empty means valid.
std::vector<Violation> validate(const MSpreadModel& model);
/// Throws ValidationError carrying the messages of validate().
void require_valid(const MSpreadModel& model);

/// Index of the unique pattern whose root restriction is the single type b
/// (m = 1) or whose root label is b and which is the only such pattern.
/// Throws Error if none or several exist.
std::size_t pattern_rooted_at(const MSpreadModel& model, Symbol b);

/// Map from canonical k-patterns over the hidden types to explicit types.
/// For k = 0 the keys are single-node patterns.
class BlockCode {
public:
    BlockCode() = default;
    BlockCode(int k, TypeSet explicit_types);
    /// k = 0 code from a per-hidden-type table.
    static BlockCode from_table(TypeSet explicit_types, const std::vector<Symbol>& image);

    int k() const noexcept { return k_; }
    const TypeSet& explicit_types() const noexcept { return explicit_; }

    /// Throws Error when the key is deeper than k or already mapped elsewhere.
    void assign(const Pattern& key, Symbol image);
    std::optional<Symbol> find(const Pattern& key) const;
    /// Throws CoverageError naming the pattern (rendered with `hidden`).
    Symbol apply(const Pattern& key, const TypeSet& hidden) const;

    /// Entries in insertion order.
    const std::vector<std::pair<Pattern, Symbol>>& entries() const noexcept { return entries_; }

private:
    int k_ = 0;
    TypeSet explicit_;
    std::vector<std::pair<Pattern, Symbol>> entries_;
    std::unordered_map<Pattern, Symbol, PatternHash> map_;
};

/// Derived symbol of a reduced model: the pattern over the hidden types it
/// stands for, and that pattern's root type.
struct DerivedSymbol {
    Pattern underlying;
    Symbol root_type;
};

/// 1-spread model plus 0-block code equivalent to an (m-spread, k-block code)
/// pair.
struct ReducedModel {
    TypeSet alphabet;
    /// m = 1 model over `alphabet`; patterns[i] is rooted at symbol i.
    MSpreadModel one_spread;
    /// alphabet symbol -> explicit type
    std::vector<Symbol> zero_code;
    TypeSet explicit_types;
    std::vector<DerivedSymbol> provenance;

    /// Derived symbols whose underlying pattern is rooted at hidden type b.
    std::vector<Symbol> theta(Symbol b) const;
};

/// xi-matrix of a valid 1-spread model, indexed by its types:
/// M(b, c) = number of c-children of the pattern rooted at b.
NonnegMatrix xi_matrix(const MSpreadModel& model);

/// tau_p^n for the pattern at `pattern_index`. Subtrees are shared, so the
/// logical size may far exceed memory use; the cap applies to logical size.
Pattern expand(const MSpreadModel& model, std::size_t pattern_index, int n,
               std::uint64_t node_cap = default_node_cap());

/// Relabels every node whose depth-k subtree is complete (levels
/// 0..horizon-k) by the code's image of that subtree. horizon defaults to the
/// pattern's height.
Pattern project(const Pattern& pat, const BlockCode& code, const TypeSet& hidden, int horizon = -1);

/// Dispatches on (m, k) and returns the equivalent 1-spread model with its
/// associated 0-block code.
ReducedModel induce(const MSpreadModel& model, const BlockCode& code);

/// Induced higher-block model S^[j+1] of a 1-spread model: alphabet tau_p^j,
/// patterns tau_p^{j+1} viewed as 1-patterns. Exposed for the xi-matrix
/// invariance check.
ReducedModel higher_block(const MSpreadModel& one_spread, int j);

struct ClosedFormRates {
    ReducedModel reduced;
    NonnegMatrix xi;
    PerronPair perron;
    /// indexed by explicit type
    std::vector<double> rates;
};

/// Closed-form spread rates of every explicit type. Throws StructureError when
/// the reduced xi-matrix is reducible.
ClosedFormRates closed_form_rates(const MSpreadModel& model, const BlockCode& code, const PerronOptions& opts = {});
double closed_form_rate(const MSpreadModel& model, const BlockCode& code, Symbol a, const PerronOptions& opts = {});

struct EmpiricalPoint {
    std::size_t n;
    LevelWindow window;
    /// count of each explicit type in the window
    std::vector<std::uint64_t> counts;
    std::uint64_t total;
    /// counts / total
    std::vector<double> ratios;
};

/// Windowed explicit-type ratios of the projected expansion of the pattern at
/// `start_pattern`, for every window n >= 1 with s_{n+1} <= depth - k.
std::vector<EmpiricalPoint> empirical_rate(const MSpreadModel& model, const BlockCode& code, std::size_t start_pattern,
                                           const WindowSequence& ws, int depth,
                                           std::uint64_t node_cap = default_node_cap());

} // namespace spread
