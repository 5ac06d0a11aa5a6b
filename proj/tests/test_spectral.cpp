#include "helpers.hpp"

#include "spread/error.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace spread;
using testutil::int_matrix;
using testutil::rat_matrix;

namespace {

void check_pair(const PerronPair& p, double rho, const std::vector<double>& w, double tol) {
    CHECK(std::abs(p.rho - rho) <= tol);
    REQUIRE(p.w.size() == w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(std::abs(p.w[i] - w[i]) <= tol);
}

// Independent oracle: dense eigen-decomposition of M^T.
std::pair<double, std::vector<double>> eigen_oracle(const NonnegMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.size());
    const auto d = m.to_double();
    Eigen::MatrixXd mt(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            mt(j, i) = d[static_cast<std::size_t>(i * n + j)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(mt);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < n; ++i)
        if (es.eigenvalues()[i].real() > es.eigenvalues()[best].real())
            best = i;
    Eigen::VectorXd v = es.eigenvectors().col(best).real();
    v /= v.sum();
    return {es.eigenvalues()[best].real(), std::vector<double>(v.data(), v.data() + n)};
}

const NonnegMatrix m411 = int_matrix({{1, 1, 1}, {1, 1, 1}, {1, 1, 0}});
const NonnegMatrix m413 = int_matrix({{0, 1, 1, 0}, {0, 0, 1, 1}, {1, 0, 1, 0}, {1, 0, 1, 0}});

} // namespace

TEST_CASE("perron of [[1]]") {
    check_pair(perron(int_matrix({{1}})), 1.0, {1.0}, 1e-12);
}

TEST_CASE("perron of the three-type xi-matrix") {
    const double s3 = std::sqrt(3.0);
    check_pair(perron(m411), s3 + 1, {(s3 - 1) / 2, (s3 - 1) / 2, 2 - s3}, 1e-9);
}

TEST_CASE("perron of a periodic matrix") {
    check_pair(perron(int_matrix({{0, 1}, {1, 0}})), 1.0, {0.5, 0.5}, 1e-12);
}

TEST_CASE("perron of the four-symbol induced matrix") {
    check_pair(perron(m413), 2.0, {2.0 / 7, 1.0 / 7, 0.5, 1.0 / 14}, 1e-9);
}

TEST_CASE("irreducibility") {
    CHECK(is_irreducible(int_matrix({{1, 1}, {1, 1}})));
    const auto r = strongly_connected_components(int_matrix({{1, 0}, {1, 1}}));
    CHECK_FALSE(r.irreducible);
    CHECK(r.components == std::vector<std::vector<std::size_t>>{{0}, {1}});
    CHECK(is_irreducible(mean_matrix(fixture("4.2.1").dist)));
    CHECK_THROWS_AS(perron(int_matrix({{1, 0}, {1, 1}})), StructureError);
}

TEST_CASE("non-convergence is reported") {
    PerronOptions o;
    o.max_iter = 2;
    CHECK_THROWS_AS(perron(m411, o), ConvergenceError);
}

TEST_CASE("matrix construction checks") {
    CHECK_THROWS(NonnegMatrix({"a", "b"}, {Rational(1), Rational(2), Rational(3)}));
    CHECK_THROWS(NonnegMatrix({"a"}, {Rational(-1)}));
    CHECK_THROWS(NonnegMatrix({"a", "a"}, std::vector<Rational>(4, Rational(1))));
}

TEST_CASE("preimage sums") {
    const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
    const std::vector<Symbol> code{0, 1, 0, 1};
    const auto u = preimage_sums(w, code, 2);
    CHECK(u[0] == doctest::Approx(0.4));
    CHECK(u[1] == doctest::Approx(0.6));
}

TEST_CASE("property: scale covariance") {
    for (const auto* m : {&m411, &m413}) {
        const auto base = perron(*m);
        for (int c : {2, 10}) {
            const auto s = perron(m->scaled(Rational(c)));
            CHECK(std::abs(s.rho - c * base.rho) <= 1e-9 * c);
            for (std::size_t i = 0; i < base.w.size(); ++i)
                CHECK(std::abs(s.w[i] - base.w[i]) <= 1e-10);
        }
    }
}

TEST_CASE("property: residual, positivity and normalisation on every fixture matrix") {
    std::vector<NonnegMatrix> ms{m411, m413, int_matrix({{0, 1, 1}, {1, 1, 0}, {1, 0, 1}})};
    for (const char* id : {"4.2.1", "4.2.2", "4.2.3"})
        ms.push_back(mean_matrix(fixture(id).dist));
    ms.push_back(induce(fixture("4.2.2").dist, 1).mean);
    ms.push_back(induce(fixture("4.2.3").dist, 2).mean);
    ms.push_back(*fixture("4.2.1").mean_matrix_override);
    for (const auto& m : ms) {
        const PerronOptions opts;
        const auto p = perron(m, opts);
        CHECK(p.residual <= opts.tol);
        CHECK(std::abs(std::accumulate(p.w.begin(), p.w.end(), 0.0) - 1.0) <= 1e-12);
        for (double x : p.w)
            CHECK(x > 0);
        // exact check of the rounded pair: ||wM - rho w||_inf in rationals
        std::vector<Rational> wq;
        for (double x : p.w)
            wq.emplace_back(x);
        const auto wm = m.left_multiply(wq);
        double worst = 0;
        for (std::size_t i = 0; i < wq.size(); ++i)
            worst = std::max(worst, std::abs(to_double(wm[i] - Rational(p.rho) * wq[i])));
        CHECK(worst <= 10 * opts.tol);
    }
}

TEST_CASE("property: agreement with a dense eigensolver") {
    std::mt19937 g(3);
    std::uniform_int_distribution<int> e(0, 5);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + rep % 7;
        std::vector<std::vector<int>> rows(n, std::vector<int>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& x : rows[i])
                x = e(g) > 2 ? e(g) : 0;
            rows[i][(i + 1) % n] = std::max(1, rows[i][(i + 1) % n]);
        }
        const auto m = int_matrix(rows);
        const auto p = perron(m);
        const auto [rho, w] = eigen_oracle(m);
        CHECK(std::abs(p.rho - rho) <= 1e-9 * std::max(1.0, rho));
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(p.w[i] - w[i]) <= 1e-8);
    }
    const auto m = rat_matrix({{"1/3", "1"}, {"1", "1/2"}});
    CHECK(perron(m).rho == doctest::Approx(eigen_oracle(m).first).epsilon(1e-12));
}
