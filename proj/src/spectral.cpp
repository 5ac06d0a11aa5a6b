#include "spread/spectral.hpp"

#include "spread/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace spread {

NonnegMatrix::NonnegMatrix(std::vector<std::string> labels, std::vector<Rational> entries)
    : labels_(std::move(labels)), entries_(std::move(entries)) {
    if (entries_.size() != labels_.size() * labels_.size())
        throw Error("matrix has " + std::to_string(entries_.size()) + " entries for " +
                    std::to_string(labels_.size()) + " labels");
    for (const auto& e : entries_)
        if (e < 0)
            throw Error("negative matrix entry " + format_rational(e));
    std::vector<std::string> sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error("duplicate matrix label " + *std::adjacent_find(sorted.begin(), sorted.end()));
}

NonnegMatrix NonnegMatrix::from_rows(std::vector<std::string> labels, const std::vector<std::vector<Rational>>& rows) {
    std::vector<Rational> entries;
    for (const auto& r : rows) {
        if (r.size() != rows.size())
            throw Error("matrix is not square");
        entries.insert(entries.end(), r.begin(), r.end());
    }
    return NonnegMatrix(std::move(labels), std::move(entries));
}

NonnegMatrix NonnegMatrix::zeros(std::vector<std::string> labels) {
    const auto n = labels.size();
    return NonnegMatrix(std::move(labels), std::vector<Rational>(n * n));
}

void NonnegMatrix::set(std::size_t i, std::size_t j, Rational v) {
    if (v < 0)
        throw Error("negative matrix entry");
    entries_.at(i * size() + j) = std::move(v);
}

void NonnegMatrix::add(std::size_t i, std::size_t j, const Rational& v) {
    auto& e = entries_.at(i * size() + j);
    e += v;
    if (e < 0)
        throw Error("negative matrix entry");
}

std::vector<double> NonnegMatrix::to_double() const {
    std::vector<double> out(entries_.size());
    std::transform(entries_.begin(), entries_.end(), out.begin(), [](const Rational& r) { return spread::to_double(r); });
    return out;
}

NonnegMatrix NonnegMatrix::scaled(const Rational& c) const {
    std::vector<Rational> e(entries_);
    for (auto& x : e)
        x *= c;
    return NonnegMatrix(labels_, std::move(e));
}

std::vector<Rational> NonnegMatrix::left_multiply(std::span<const Rational> v) const {
    const auto n = size();
    if (v.size() != n)
        throw Error("vector length does not match matrix");
    std::vector<Rational> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] == 0)
            continue;
        for (std::size_t j = 0; j < n; ++j)
            out[j] += v[i] * at(i, j);
    }
    return out;
}

bool NonnegMatrix::same_entries(const NonnegMatrix& other) const {
    return size() == other.size() && entries_ == other.entries_;
}

std::string NonnegMatrix::to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < size(); ++i) {
        os << labels_[i] << ':';
        for (std::size_t j = 0; j < size(); ++j)
            os << ' ' << format_rational(at(i, j));
        os << '\n';
    }
    return os.str();
}

IrreducibilityReport strongly_connected_components(const NonnegMatrix& m) {
    // Iterative Tarjan over the digraph i -> j when m(i, j) > 0.
    const std::size_t n = m.size();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> comps;
    std::size_t counter = 0;

    struct Frame {
        std::size_t v;
        std::size_t next;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited)
            continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& f = call.back();
            if (f.next < n) {
                const std::size_t w = f.next++;
                if (m.at(f.v, w) == 0)
                    continue;
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const std::size_t v = f.v;
            call.pop_back();
            if (!call.empty())
                low[call.back().v] = std::min(low[call.back().v], low[v]);
            if (low[v] == index[v]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
        }
    }
    std::sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    IrreducibilityReport rep;
    rep.irreducible = n > 0 && comps.size() == 1;
    rep.components = std::move(comps);
    return rep;
}

PerronPair perron(const NonnegMatrix& m, const PerronOptions& opts) {
    const std::size_t n = m.size();
    if (n == 0)
        throw Error("perron: empty matrix");
    auto rep = strongly_connected_components(m);
    if (!rep.irreducible)
        throw StructureError("matrix is reducible (" + std::to_string(rep.components.size()) +
                                 " strongly connected components); no positive Perron vector",
                             std::move(rep.components));

    const auto a = m.to_double();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<double> y(n);
    double residual = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        std::fill(y.begin(), y.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = w[i];
            const double* row = &a[i * n];
            for (std::size_t j = 0; j < n; ++j)
                y[j] += wi * row[j];
        }
        // sum(w) == 1, so sum(wM) is the Rayleigh-type estimate of rho.
        const double rho = std::accumulate(y.begin(), y.end(), 0.0);
        residual = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            residual = std::max(residual, std::abs(y[j] - rho * w[j]));
        if (residual <= opts.tol)
            return PerronPair{rho, w, residual, it + 1};
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            w[j] += y[j];
            total += w[j];
        }
        for (auto& x : w)
            x /= total;
    }
    throw ConvergenceError("perron iteration did not reach tolerance after " + std::to_string(opts.max_iter) +
                               " iterations",
                           residual);
}

std::vector<double> preimage_sums(std::span<const double> w, std::span<const Symbol> code, std::size_t n_explicit) {
    if (w.size() != code.size())
        throw Error("code length does not match eigenvector");
    std::vector<double> u(n_explicit, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i)
        u.at(code[i]) += w[i];
    return u;
}

} // namespace spread
