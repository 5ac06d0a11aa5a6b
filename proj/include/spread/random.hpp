#pragma once

#include "spread/pattern.hpp"
#include "spread/rational.hpp"
#include "spread/rng.hpp"
#include "spread/spectral.hpp"
#include "spread/topo.hpp"
#include "spread/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace spread {

/// One support point of an offspring law: counts per type and its probability.
struct OffspringEntry {
    std::vector<std::uint32_t> counts;
    Rational prob;

    std::uint64_t total() const;
};

/// Finite offspring distribution per hidden type of a multi-type branching
/// process. Entries keep their given order; the order fixes sampling and
/// potential-pattern enumeration.
class SpreadDistribution {
public:
    SpreadDistribution() = default;
    /// Shape is checked here (one law per type, counts of length K,
    /// probabilities in (0, 1]); probability sums are left to validate().
    SpreadDistribution(TypeSet types, std::vector<std::vector<OffspringEntry>> laws);

    const TypeSet& types() const noexcept { return types_; }
    std::size_t size() const noexcept { return types_.size(); }
    const std::vector<OffspringEntry>& law(Symbol b) const { return laws_.at(b); }
    const std::vector<std::vector<OffspringEntry>>& laws() const noexcept { return laws_; }
    /// Largest total offspring of any entry.
    std::uint64_t arity() const;

private:
    TypeSet types_;
    std::vector<std::vector<OffspringEntry>> laws_;
};

/// Problems with a distribution: probability sums other than 1, singular
/// (every type always has exactly one child), empty laws. Empty means valid.
std::vector<std::string> validate(const SpreadDistribution& dist);
void require_valid(const SpreadDistribution& dist);

/// m_ij = E(Z_1,j | Z_0 = 1_{b_i}), exact.
NonnegMatrix mean_matrix(const SpreadDistribution& dist);

struct SimulationLimits {
    /// Individuals generated per trial, all generations together; SPREAD_NODE_CAP overrides.
    std::uint64_t population_cap = 10'000'000;
    static SimulationLimits from_env();
};

/// Per-generation type counts Z_0..Z_N of one trial.
struct Trajectory {
    std::uint64_t seed = 0;
    std::vector<std::vector<std::uint64_t>> counts;

    std::uint64_t total(std::size_t n) const;
    bool extinct() const;
};

/// Draws offspring entries with one uniform per individual.
class OffspringSampler {
public:
    explicit OffspringSampler(const SpreadDistribution& dist);
    std::size_t draw(Symbol b, Rng& rng) const;

private:
    std::vector<std::vector<double>> cumulative_;
};

/// Galton-Watson sampling from a single individual of type `start`.
Trajectory simulate_counts(const SpreadDistribution& dist, Symbol start, int generations, std::uint64_t seed,
                           const SimulationLimits& limits = SimulationLimits::from_env());

/// Same process from arbitrary initial counts, drawing from `rng`. Individuals
/// are processed generation by generation, type by type.
std::vector<std::vector<std::uint64_t>> simulate_counts_from(const SpreadDistribution& dist, const OffspringSampler& sampler,
                                                             std::vector<std::uint64_t> initial, int generations, Rng& rng,
                                                             const SimulationLimits& limits);

/// Full labeled realization to depth N. Uses the same draw sequence as
/// simulate_counts with the same seed, so level counts coincide.
Pattern simulate_tree(const SpreadDistribution& dist, Symbol start, int generations, std::uint64_t seed,
                      std::uint64_t node_cap = default_node_cap());

struct PotentialPattern {
    Pattern pattern;
    Rational prob;
};

/// Potential k-patterns: every k-pattern with positive occurrence probability,
/// with that probability, grouped by root type.
struct PotentialPatternSet {
    int k = 0;
    TypeSet base;
    /// global order: root types in type order, then enumeration order
    std::vector<PotentialPattern> items;

    std::vector<std::size_t> rooted_at(Symbol b) const;
    std::optional<std::size_t> index_of(const Pattern& p) const;
    TypeSet names() const;

    std::unordered_map<Pattern, std::size_t, PatternHash> index;
};

struct EnumerationLimits {
    std::uint64_t pattern_cap = 100'000;
    /// joint outcomes enumerated for one induced offspring law
    std::uint64_t outcome_cap = 1'000'000;
    /// outcomes times alphabet size, summed over the whole induced law
    std::uint64_t law_cell_cap = 50'000'000;
};

PotentialPatternSet enumerate_potential_patterns(const SpreadDistribution& dist, int k,
                                                 const EnumerationLimits& limits = {});

/// Induced branching process on potential k-patterns.
struct InducedModel {
    int k = 0;
    PotentialPatternSet alphabet;
    SpreadDistribution law;
    /// initial law over the alphabet given Z_0 = 1_{b}, per base type b
    std::vector<std::vector<std::pair<std::size_t, Rational>>> initial;
    NonnegMatrix mean;
};

InducedModel induce(const SpreadDistribution& dist, int k, const EnumerationLimits& limits = {});

/// Explicit type of every symbol of the induced alphabet.
std::vector<Symbol> associated_code(const PotentialPatternSet& alphabet, const BlockCode& code);

/// Z^Phi: preimage sums of counts under `code`; throws CoverageError on a
/// symbol the code does not cover.
std::vector<std::uint64_t> project_counts(std::span<const std::uint64_t> counts, std::span<const Symbol> code,
                                          std::size_t n_explicit);

struct TheoreticalRates {
    NonnegMatrix mean;
    PerronPair perron;
    std::vector<Symbol> code;
    std::vector<double> rates;
};

/// Rates from a given mean matrix and 0-block code (used for printed matrices).
TheoreticalRates theoretical_rates_from_matrix(const NonnegMatrix& mean, std::vector<Symbol> code, std::size_t n_explicit,
                                               const PerronOptions& opts = {});
/// Throws RegimeError unless rho > 1.
TheoreticalRates theoretical_rates(const SpreadDistribution& dist, const BlockCode& code, const PerronOptions& opts = {},
                                   const EnumerationLimits& limits = {});
double theoretical_rate(const SpreadDistribution& dist, const BlockCode& code, Symbol a, const PerronOptions& opts = {});

struct McConfig {
    Symbol start = 0;
    int generations = 8;
    std::size_t trials = 300;
    WindowSequence ws = WindowSequence::constant(1);
    std::uint64_t seed = 42;
    unsigned threads = 1;
    SimulationLimits limits = SimulationLimits::from_env();
    EnumerationLimits enumeration;
};

struct McTrial {
    std::uint64_t seed = 0;
    /// counts over the simulated alphabet (base types for k = 0)
    std::vector<std::vector<std::uint64_t>> hidden;
    /// counts over explicit types
    std::vector<std::vector<std::uint64_t>> projected;
    bool alive = false;
};

struct McResult {
    std::vector<LevelWindow> windows;
    /// [window][explicit type]; mean over surviving trials
    std::vector<std::vector<double>> mean_ratio;
    std::vector<std::vector<double>> std_error;
    std::size_t alive = 0;
    std::size_t extinct = 0;
    std::vector<McTrial> trials;
};

/// Windowed explicit-type ratios averaged over trials that survive to the
/// horizon. k >= 1 codes simulate the induced chain. Results do not depend on
/// config.threads. Throws EstimationError when every trial dies out.
McResult mc_rate(const SpreadDistribution& dist, const BlockCode& code, const McConfig& config);

/// |Z_n| / rho^n for n = 0..N.
std::vector<double> w_diagnostic(const Trajectory& traj, double rho);
std::vector<double> w_diagnostic(const std::vector<std::vector<std::uint64_t>>& counts, double rho);

} // namespace spread
