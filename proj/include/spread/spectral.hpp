#pragma once

#include "spread/rational.hpp"
#include "spread/types.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace spread {

/// Square matrix of exact nonnegative rationals indexed by labeled types.
/// Integer xi-matrices and rational mean matrices share this representation;
/// floating point only appears inside perron().
class NonnegMatrix {
public:
    NonnegMatrix() = default;
    /// Row-major entries; throws Error on shape mismatch or negative entries.
    NonnegMatrix(std::vector<std::string> labels, std::vector<Rational> entries);
    static NonnegMatrix from_rows(std::vector<std::string> labels, const std::vector<std::vector<Rational>>& rows);
    static NonnegMatrix zeros(std::vector<std::string> labels);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const Rational& at(std::size_t i, std::size_t j) const { return entries_.at(i * size() + j); }
    void set(std::size_t i, std::size_t j, Rational v);
    void add(std::size_t i, std::size_t j, const Rational& v);

    std::vector<double> to_double() const;
    NonnegMatrix scaled(const Rational& c) const;
    /// Row vector times matrix, exact.
    std::vector<Rational> left_multiply(std::span<const Rational> v) const;

    /// Exact entrywise equality; labels are not compared.
    bool same_entries(const NonnegMatrix& other) const;

    std::string to_string() const;

private:
    std::vector<std::string> labels_;
    std::vector<Rational> entries_;
};

struct PerronOptions {
    double tol = 1e-12;
    std::size_t max_iter = 100000;
};

/// Maximal eigenvalue and left eigenvector normalized to unit coordinate sum.
struct PerronPair {
    double rho = 0.0;
    std::vector<double> w;
    /// ||wM - rho w||_inf at acceptance.
    double residual = 0.0;
    std::size_t iterations = 0;
};

/// Shifted power iteration on (M + I)^T from the uniform vector.
/// Throws StructureError for reducible input and ConvergenceError when
/// max_iter is exhausted.
PerronPair perron(const NonnegMatrix& m, const PerronOptions& opts = {});

struct IrreducibilityReport {
    bool irreducible = false;
    /// Strongly connected components of the nonzero-entry digraph, each sorted,
    /// ordered by smallest member.
    std::vector<std::vector<std::size_t>> components;
};

IrreducibilityReport strongly_connected_components(const NonnegMatrix& m);
inline bool is_irreducible(const NonnegMatrix& m) { return strongly_connected_components(m).irreducible; }

/// u_j = sum of w_i over i with code[i] == j.
std::vector<double> preimage_sums(std::span<const double> w, std::span<const Symbol> code, std::size_t n_explicit);

} // namespace spread
