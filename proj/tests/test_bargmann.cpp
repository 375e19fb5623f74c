#include <doctest.h>

#include <cmath>
#include <random>

#include "bsl/bargmann.hpp"
#include "bsl/symbols.hpp"

using namespace bsl;

namespace {

double max_abs_diff(const MatrixXc& a, const MatrixXc& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("bargmann") {

TEST_CASE("harmonic monomial is diagonal h(k+1)") {
    auto M = monomial_matrix(1, 1, PlanckParameter(0.1), BasisTruncation(5));
    for (int k = 0; k < 5; ++k) CHECK(std::abs(M.entries(k, k) - 0.1 * (k + 1)) < 1e-15);
    CHECK(std::abs(M.entries.norm() - M.entries.diagonal().norm()) < 1e-15);
}

TEST_CASE("constant monomial is the identity") {
    for (double h : {0.05, 0.3, 1.0}) {
        auto M = monomial_matrix(0, 0, PlanckParameter(h), BasisTruncation(7));
        CHECK(max_abs_diff(M.entries, MatrixXc::Identity(7, 7)) == 0.0);
    }
}

TEST_CASE("z raises the basis index") {
    auto M = monomial_matrix(1, 0, PlanckParameter(0.25), BasisTruncation(3));
    const double want[] = {0.5, std::sqrt(0.5), std::sqrt(0.75)};
    for (int k = 0; k < 2; ++k) CHECK(std::abs(M.entries(k + 1, k) - want[k]) < 1e-15);
    for (int k = 0; k < 2; ++k) {
        auto q = inner_product_oracle(MonomialSymbol{{{1, 0}, 1.0}}, k, k + 1, PlanckParameter(0.25));
        CHECK(std::abs(q.value - M.entries(k + 1, k)) < 1e-10);
    }
}

TEST_CASE("assembly examples") {
    auto M = assemble_toeplitz(MonomialSymbol{{{1, 1}, 2.0}}, PlanckParameter(0.1), BasisTruncation(3));
    for (int k = 0; k < 3; ++k) CHECK(std::abs(M.entries(k, k) - 0.2 * (k + 1)) < 1e-15);

    const double h = 0.3;
    auto B = assemble_toeplitz(MonomialSymbol{{{2, 0}, 1.0}, {{0, 2}, 1.0}}, PlanckParameter(h), BasisTruncation(8));
    for (int l = 0; l < 8; ++l)
        for (int k = 0; k < 8; ++k)
            if (std::abs(l - k) != 2) CHECK(B.entries(l, k) == cplx(0.0));
    for (int k = 0; k + 2 < 8; ++k) {
        const double v = std::sqrt(h * h * (k + 1) * (k + 2));
        CHECK(std::abs(B.entries(k + 2, k) - v) < 1e-14);
        CHECK(std::abs(B.entries(k, k + 2) - v) < 1e-14);
    }
    CHECK(B.lower_bandwidth == 2);
    CHECK(B.upper_bandwidth == 2);

    auto Z = assemble_toeplitz(MonomialSymbol{}, PlanckParameter(0.5), BasisTruncation(4));
    CHECK(Z.entries.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("radial profiles") {
    auto A = toeplitz_radial({0.0, 1.0}, PlanckParameter(0.1), BasisTruncation(4));
    for (int k = 0; k < 4; ++k) CHECK(std::abs(A.entries(k, k) - 0.1 * (k + 1)) < 1e-15);
    auto B = toeplitz_radial({0.0, 0.0, 1.0}, PlanckParameter(1.0), BasisTruncation(3));
    const double want[] = {2, 6, 12};
    for (int k = 0; k < 3; ++k) CHECK(std::abs(B.entries(k, k) - want[k]) < 1e-13);
    // Gaussian moment oracle: int e^{-t} t^{k+2} dt / k!
    for (int k = 0; k < 3; ++k) {
        auto q = gaussian_integral([k](cplx z) { return std::pow(std::norm(z), k + 2) / std::tgamma(k + 1.0); }, 1.0);
        CHECK(std::abs(q.value - want[k]) < 1e-10);
    }
    auto C = toeplitz_radial({}, PlanckParameter(0.2), BasisTruncation(3));
    CHECK(C.entries.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("quadrature oracle basics") {
    auto q = inner_product_oracle(MonomialSymbol{{{1, 1}, 1.0}}, 2, 2, PlanckParameter(0.1));
    CHECK(std::abs(q.value - 0.3) < 1e-10);
    auto off = inner_product_oracle(MonomialSymbol{{{1, 1}, 1.0}, {{2, 2}, 0.5}}, 1, 3, PlanckParameter(0.1));
    CHECK(std::abs(off.value) < 1e-12);
    auto one = inner_product_oracle(MonomialSymbol{{{0, 0}, 1.0}}, 4, 4, PlanckParameter(0.5));
    CHECK(std::abs(one.value - 1.0) < 1e-12);
}

TEST_CASE("oracle equivalence over low monomials") {
    double worst = 0.0;
    for (double h : {0.05, 0.1, 0.5})
        for (int a = 0; a <= 4; ++a)
            for (int b = 0; a + b <= 4; ++b) {
                MonomialSymbol s{{{a, b}, 1.0}};
                auto M = assemble_toeplitz(s, PlanckParameter(h), BasisTruncation(12));
                for (int k = 0; k < 12; ++k) {
                    const int l = k + a - b;
                    if (l < 0 || l >= 12) continue;
                    auto q = inner_product_oracle(s, k, l, PlanckParameter(h));
                    worst = std::max(worst, std::abs(q.value - M.entries(l, k)));
                }
            }
    CHECK(worst <= 1e-9);
}

TEST_CASE("bandedness and adjoint symmetry") {
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 3; ++b) {
            auto M = monomial_matrix(a, b, PlanckParameter(0.2), BasisTruncation(10));
            auto N = monomial_matrix(b, a, PlanckParameter(0.2), BasisTruncation(10));
            for (int l = 0; l < 10; ++l)
                for (int k = 0; k < 10; ++k)
                    if (l - k != a - b) CHECK(M.entries(l, k) == cplx(0.0));
            CHECK(max_abs_diff(M.entries, N.entries.adjoint()) < 1e-14);
        }
}

TEST_CASE("radial consistency") {
    for (int j = 0; j <= 3; ++j) {
        std::vector<double> g(j + 1, 0.0);
        g[j] = 1.0;
        auto A = assemble_toeplitz(MonomialSymbol{{{j, j}, 1.0}}, PlanckParameter(0.15), BasisTruncation(20));
        auto B = toeplitz_radial(g, PlanckParameter(0.15), BasisTruncation(20));
        CHECK(max_abs_diff(A.entries, B.entries) <= 1e-13 * std::max(1.0, B.entries.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("matrix product matches the sharp product away from the edge") {
    const double h = 0.1;
    const int n = 16;
    auto A = assemble_toeplitz(MonomialSymbol{{{1, 1}, 1.0}}, PlanckParameter(h), BasisTruncation(n));
    auto f = FormalSymbol::from_table(TaylorTable2D::monomial(4, 1, 1), 2);
    auto ff = to_monomial_symbol(sharp_product(f, f), h);
    auto B = assemble_toeplitz(ff, PlanckParameter(h), BasisTruncation(n));
    MatrixXc P = A.entries * A.entries;
    CHECK(max_abs_diff(P.topLeftCorner(n - 2, n - 2), B.entries.topLeftCorner(n - 2, n - 2)) <
          1e-12 * P.cwiseAbs().maxCoeff());
}

TEST_CASE("linearity in the symbol") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> N(0.0, 1.0);
    MonomialSymbol s, t;
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; a + b <= 3; ++b) {
            s.add(a, b, {N(rng), N(rng)});
            t.add(a, b, {N(rng), N(rng)});
        }
    const cplx w{0.3, -1.2};
    MatrixXc L = assemble_toeplitz(s + t * w, PlanckParameter(0.2), BasisTruncation(15)).entries;
    MatrixXc R = assemble_toeplitz(s, PlanckParameter(0.2), BasisTruncation(15)).entries +
             w * assemble_toeplitz(t, PlanckParameter(0.2), BasisTruncation(15)).entries;
    CHECK(max_abs_diff(L, R) < 1e-12);
}

TEST_CASE("large truncations stay finite") {
    auto M = monomial_matrix(3, 0, PlanckParameter(0.01), BasisTruncation(1500));
    CHECK(M.entries.allFinite());
    CHECK(std::abs(M.entries(3, 0) - std::pow(0.01, 1.5) * std::sqrt(6.0)) < 1e-15);
}

TEST_CASE("entries are continuous across the exact-product range") {
    // (k+1)...(k+4) passes 2^53 near k = 9700; the reference uses long double products
    const double h = 0.01;
    auto M = monomial_matrix(4, 4, PlanckParameter(h), BasisTruncation(9800));
    auto N = monomial_matrix(3, 1, PlanckParameter(h), BasisTruncation(9800));
    for (int k : {0, 5, 9000, 9690, 9700, 9710, 9790}) {
        long double p4 = 1.0L, p3 = 1.0L, p1 = 1.0L;
        for (int i = 1; i <= 4; ++i) p4 *= k + i;
        for (int i = 1; i <= 3; ++i) p3 *= k + i;
        p1 = k + 3;
        const long double want_m = std::pow(0.01L, 4) * p4;
        const long double want_n = 0.0001L * std::sqrt(p3 * p1);
        CHECK(std::abs(M.entries(k, k).real() / static_cast<double>(want_m) - 1.0) < 1e-13);
        if (k + 2 < 9800) CHECK(std::abs(N.entries(k + 2, k).real() / static_cast<double>(want_n) - 1.0) < 1e-13);
    }
}

TEST_CASE("parameter guards") {
    CHECK_THROWS_AS(PlanckParameter(0.0), Error);
    CHECK_THROWS_AS(PlanckParameter(1.5), Error);
    CHECK_THROWS_AS(BasisTruncation(0), Error);
}

}
