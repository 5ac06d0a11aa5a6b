#pragma once

#include "spread/fixtures.hpp"
#include "spread/model_io.hpp"
#include "spread/pattern.hpp"
#include "spread/random.hpp"
#include "spread/spectral.hpp"
#include "spread/topo.hpp"

#include <random>
#include <string>
#include <vector>

namespace testutil {

using namespace spread;

inline Pattern pat(const TypeSet& t, const std::string& s) { return parse_pattern(s, t); }

inline NonnegMatrix int_matrix(const std::vector<std::vector<int>>& rows) {
    std::vector<std::string> labels;
    std::vector<std::vector<Rational>> r;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        labels.push_back("s" + std::to_string(i));
        r.emplace_back(rows[i].begin(), rows[i].end());
    }
    return NonnegMatrix::from_rows(labels, r);
}

inline NonnegMatrix rat_matrix(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::string> labels;
    std::vector<std::vector<Rational>> r;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        labels.push_back("s" + std::to_string(i));
        std::vector<Rational> row;
        for (const auto& x : rows[i])
            row.push_back(parse_rational(x));
        r.push_back(std::move(row));
    }
    return NonnegMatrix::from_rows(labels, r);
}

// Exact integer power row 1_b^t M^n.
inline std::vector<Rational> row_power(const NonnegMatrix& m, std::size_t b, int n) {
    std::vector<Rational> v(m.size(), Rational(0));
    v[b] = 1;
    for (int i = 0; i < n; ++i)
        v = m.left_multiply(v);
    return v;
}

// Random valid 1-spread model: every type gets one pattern with 1..max_kids
// children drawn uniformly; always irreducible-ish is not guaranteed.
inline MSpreadModel random_one_spread(std::mt19937& g, std::size_t K, int max_kids) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < K; ++i)
        names.push_back("t" + std::to_string(i));
    MSpreadModel m;
    m.m = 1;
    m.types = TypeSet(names);
    std::uniform_int_distribution<int> nk(1, max_kids);
    std::uniform_int_distribution<Symbol> ty(0, static_cast<Symbol>(K - 1));
    for (Symbol b = 0; b < K; ++b) {
        std::vector<Pattern> kids;
        const int n = nk(g);
        for (int i = 0; i < n; ++i)
            kids.emplace_back(ty(g));
        // guarantee strong connectivity: b -> b+1
        kids.emplace_back(static_cast<Symbol>((b + 1) % K));
        m.patterns.emplace_back(b, kids);
    }
    return m;
}

} // namespace testutil
