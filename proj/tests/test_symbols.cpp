#include <doctest.h>

#include <cmath>
#include <random>

#include "bsl/bargmann.hpp"
#include "bsl/symbols.hpp"

using namespace bsl;

namespace {

constexpr int kD = 12;

FormalSymbol harmonic(int K = 2, int D = kD) { return FormalSymbol::from_table(TaylorTable2D::monomial(D, 1, 1), K); }

FormalSymbol mono(int a, int b, int K = 2, int D = kD, cplx c = 1.0) {
    return FormalSymbol::from_table(TaylorTable2D::monomial(D, a, b, c), K);
}

double diff(const FormalSymbol& a, const FormalSymbol& b) { return (a - b).max_abs(); }

// random symbol: terms of degree <= deg at each order <= K, stored at (Ks, Ds)
FormalSymbol random_symbol(std::mt19937_64& rng, int deg, int K, int Ks, int Ds) {
    std::normal_distribution<double> N(0.0, 1.0);
    FormalSymbol f(Ks, Ds);
    for (int k = 0; k <= K; ++k)
        for (int a = 0; a <= deg; ++a)
            for (int b = 0; a + b <= deg; ++b) f[k].set(a, b, {N(rng), N(rng)});
    return f;
}

}  // namespace

TEST_SUITE("symbols") {

TEST_CASE("sharp product examples") {
    auto h2 = sharp_product(harmonic(), harmonic());
    FormalSymbol want(2, kD);
    want[0].set(2, 2, 1.0);
    want[1].set(1, 1, -1.0);
    CHECK(diff(h2, want) == 0.0);
    CHECK_FALSE(h2.truncated());

    auto f = mono(2, 1) + mono(0, 3, 2, kD, {0.5, 1.0});
    CHECK(diff(sharp_product(f, FormalSymbol::constant(2, kD, 1.0)), f) == 0.0);
    CHECK(diff(sharp_product(FormalSymbol::constant(2, kD, 1.0), f), f) == 0.0);

    FormalSymbol zzb(2, kD);
    zzb[0].set(1, 1, 1.0);
    zzb[1].set(0, 0, -1.0);
    CHECK(diff(sharp_product(mono(1, 0), mono(0, 1)), zzb) == 0.0);
    CHECK(diff(sharp_product(mono(0, 1), mono(1, 0)), harmonic()) == 0.0);
}

TEST_CASE("sharp product associativity within the budget") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        auto f = random_symbol(rng, 3, 1, 8, kD);
        auto g = random_symbol(rng, 3, 1, 8, kD);
        auto h = random_symbol(rng, 3, 1, 8, kD);
        auto l = sharp_product(sharp_product(f, g), h);
        auto r = sharp_product(f, sharp_product(g, h));
        CHECK_FALSE(l.truncated());
        CHECK(diff(l, r) < 1e-12 * std::max(1.0, l.max_abs()));
    }
}

TEST_CASE("sharp power of the harmonic symbol") {
    CHECK(diff(sharp_power_harmonic(2, 2, kD), sharp_product(harmonic(), harmonic())) == 0.0);
    // diagonal of T((|z|^2)^{#3}) is (h(l+1))^3
    const double h = 0.1;
    auto s = to_monomial_symbol(sharp_power_harmonic(3, 3, kD), h);
    auto M = assemble_toeplitz(s, PlanckParameter(h), BasisTruncation(10));
    for (int l = 0; l < 10; ++l) CHECK(std::abs(M.entries(l, l) - std::pow(h * (l + 1), 3)) < 1e-13);
}

TEST_CASE("formal norm examples") {
    auto one = formal_norm(FormalSymbol::constant(0, 4, 1.0), 0.3);
    CHECK(std::abs(one.at(0) - 2.0) < 1e-15);
    auto z = formal_norm(mono(1, 0, 0, 4), 0.3);
    CHECK(std::abs(z.at(1) - 0.6) < 1e-15);
    auto zero = formal_norm(FormalSymbol(2, 4), 0.3);
    for (double v : zero.per_order) CHECK(v == 0.0);
    // hbar weight: 2 2^{-1} 1!/(1! 1!) rho^2 for the constant at order 1
    auto h1 = formal_norm(FormalSymbol::constant(0, 4, 1.0).reshaped(1, 4).times_hbar(), 0.5);
    CHECK(std::abs(h1.at(2) - 0.25) < 1e-15);
}

TEST_CASE("formal norm cumulative is nondecreasing") {
    std::mt19937_64 rng(3);
    auto f = random_symbol(rng, 5, 2, 3, 8);
    auto r = formal_norm(f, 0.3);
    for (std::size_t s = 1; s < r.cumulative.size(); ++s) CHECK(r.cumulative[s] >= r.cumulative[s - 1]);
    for (double v : r.per_order) CHECK(v >= 0.0);
}

TEST_CASE("submultiplicativity on a random corpus") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> deg(0, 6), ord(0, 3);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto f = random_symbol(rng, deg(rng), ord(rng), 12, 12);
        auto g = random_symbol(rng, deg(rng), ord(rng), 12, 12);
        auto fg = sharp_product(f, g);
        CHECK_FALSE(fg.truncated());
        for (double rho : {0.1, 0.3}) {
            auto nf = formal_norm(f, rho), ng = formal_norm(g, rho), nfg = formal_norm(fg, rho);
            for (int s = 0; s <= 24; ++s) {
                CHECK(nfg.upto(s) <= nf.upto(s) * ng.upto(s) * (1.0 + 1e-12));
                ++checked;
            }
        }
    }
    CHECK(checked == 200 * 2 * 25);
}

TEST_CASE("pointwise lower bound fails for a documented pair") {
    // f = z + h, g = zbar + 1: f#g = z zbar + z + h zbar, the -h from z#zbar
    // cancels the h * 1 constant, so ||f g|| exceeds ||f#g|| at s = 2.
    FormalSymbol f(2, 4), g(2, 4);
    f[0].set(1, 0, 1.0);
    f[1].set(0, 0, 1.0);
    g[0].set(0, 1, 1.0);
    g[0].set(0, 0, 1.0);
    auto fg = sharp_product(f, g);
    CHECK(fg[1].at(0, 0) == cplx(0.0));
    FormalSymbol pointwise(2, 4);
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; i + j <= 2; ++j) pointwise[i + j] += multiply(f[i], g[j]);
    const double rho = 0.3;
    CHECK(formal_norm(pointwise, rho).upto(2) > formal_norm(fg, rho).upto(2));
}

TEST_CASE("Poisson bracket examples") {
    auto zz = TaylorTable2D::monomial(6, 1, 1);
    auto z = TaylorTable2D::monomial(6, 1, 0);
    auto zb = TaylorTable2D::monomial(6, 0, 1);
    auto b = poisson_bracket(zz, z);
    CHECK(std::abs(b.at(1, 0) - kI) < 1e-15);
    CHECK(b.max_abs() == doctest::Approx(1.0));
    auto f = TaylorTable2D::monomial(6, 2, 1, {0.3, 0.7}) + TaylorTable2D::monomial(6, 0, 3, 2.0);
    CHECK(poisson_bracket(f, f).max_abs() < 1e-15);
    // i(d zbar dbar z - dbar zbar d z) = -i under the bracket convention above
    auto c = poisson_bracket(z, zb);
    CHECK(std::abs(c.at(0, 0) + kI) < 1e-15);
    // d_theta f = {|z|^2, f}
    CHECK((poisson_bracket(zz, f) - f.d_theta()).max_abs() < 1e-15);
}

TEST_CASE("commutator expansion: [f,g] = -i h {f,g} + O(h^2)") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto f = random_symbol(rng, 4, 0, 3, 10);
        auto g = random_symbol(rng, 4, 0, 3, 10);
        auto c = sharp_commutator(f, g, 3);
        CHECK(c[0].max_abs() < 1e-13);
        CHECK((c[1] + poisson_bracket(f[0], g[0]) * kI).max_abs() < 1e-12);
    }
}

TEST_CASE("theta antiderivative") {
    auto g = theta_antiderivative(TaylorTable2D::monomial(4, 1, 0));
    CHECK(std::abs(g.at(1, 0) + kI) < 1e-15);
    CHECK((g.d_theta() - TaylorTable2D::monomial(4, 1, 0)).max_abs() < 1e-15);
    CHECK_THROWS_AS(theta_antiderivative(TaylorTable2D::monomial(4, 1, 1)), Error);
    try {
        theta_antiderivative(TaylorTable2D::monomial(4, 1, 1));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonzeroAverage);
    }
    auto g3 = theta_antiderivative(TaylorTable2D::monomial(4, 2, 1));
    CHECK(std::abs(g3.at(2, 1) + kI) < 1e-15);
}

TEST_CASE("averaging contracts every formal norm") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        auto f = random_symbol(rng, 8, 0, 0, 8)[0];
        for (int j = 0; 2 * j <= 8; ++j) f.set(j, j, 0.0);
        auto g = theta_antiderivative(f);
        CHECK((g.d_theta() - f).max_abs() <= 4 * 2.2e-16 * f.max_abs());
        auto nf = formal_norm(f, 0.3), ng = formal_norm(g, 0.3);
        for (std::size_t s = 0; s < nf.per_order.size(); ++s) CHECK(ng.per_order[s] <= nf.per_order[s] * (1 + 1e-14));
    }
}

TEST_CASE("radial average") {
    auto f = TaylorTable2D::monomial(6, 1, 1) + TaylorTable2D::monomial(6, 1, 0);
    auto r = radial_average(f);
    CHECK(r.size() >= 2);
    CHECK(r[1] == cplx(1.0));
    CHECK(r[0] == cplx(0.0));
    for (auto v : radial_average(TaylorTable2D::monomial(6, 1, 3))) CHECK(v == cplx(0.0));
    auto q = radial_average(TaylorTable2D::monomial(6, 2, 2));
    CHECK(q[2] == cplx(1.0));
    CHECK(q[1] == cplx(0.0));
}

TEST_CASE("cohomology equation") {
    auto s1 = cohomology_solve(TaylorTable2D::monomial(6, 1, 2), {1.0});
    for (auto v : s1.r) CHECK(v == cplx(0.0));
    CHECK(std::abs(s1.b.at(1, 2) - kI) < 1e-15);

    auto rad = TaylorTable2D::monomial(6, 1, 1, 2.0) + TaylorTable2D::monomial(6, 2, 2, -1.0);
    auto s2 = cohomology_solve(rad, {1.0});
    CHECK(s2.b.max_abs() == 0.0);
    CHECK(s2.r[1] == cplx(2.0));
    CHECK(s2.r[2] == cplx(-1.0));

    // mu'(s) = 1 + s: b = -i z (1 - |z|^2 + |z|^4 - ...)
    auto s3 = cohomology_solve(TaylorTable2D::monomial(7, 1, 0), {1.0, 1.0});
    for (int j = 0; 2 * j + 1 <= 7; ++j) CHECK(std::abs(s3.b.at(j + 1, j) - (-kI) * std::pow(-1.0, j)) < 1e-14);
    // check mu'(|z|^2) d_theta b = g - r
    auto lhs = multiply(TaylorTable2D::radial({1.0, 1.0}, 7), s3.b.d_theta());
    CHECK((lhs - TaylorTable2D::monomial(7, 1, 0)).max_abs() < 1e-14);
}

TEST_CASE("sharp inverse") {
    auto one = FormalSymbol::constant(3, 6, 1.0);
    CHECK(diff(sharp_inverse(one), one) == 0.0);

    const cplx c{0.5, -0.25};
    auto inv = sharp_inverse(one + FormalSymbol::constant(3, 6, c).times_hbar());
    for (int k = 0; k <= 3; ++k) CHECK(std::abs(inv[k].at(0, 0) - std::pow(-c, k)) < 1e-15);

    // a = h z: brute-force order matching
    auto a = mono(1, 0, 3, 8).times_hbar();
    auto ainv = sharp_inverse(one.reshaped(3, 8) + a);
    CHECK(std::abs(ainv[1].at(1, 0) + 1.0) < 1e-15);
    CHECK(std::abs(ainv[2].at(2, 0) - 1.0) < 1e-15);
    auto prod = sharp_product(one.reshaped(3, 8) + a, ainv);
    CHECK(diff(prod, one.reshaped(3, 8)) < 1e-14);
    CHECK_THROWS_AS(sharp_inverse(one + mono(1, 0, 3, 6)), Error);
}

TEST_CASE("Moser: constant and radial perturbations commute") {
    auto mu = harmonic(4, 12);
    auto g = FormalSymbol::constant(4, 12, {0.7, 0.1});
    auto res = moser_normal_form(mu, g, 3);
    CHECK(res.a.max_abs() < 1e-15);
    CHECK(std::abs(res.r[0].at(0, 0) - cplx(0.7, 0.1)) < 1e-15);

    auto gr = mono(2, 2, 4, 12, 0.3) + mono(1, 1, 4, 12, -1.0);
    auto res2 = moser_normal_form(mu, gr, 3);
    CHECK(res2.a.max_abs() < 1e-14);
    CHECK(diff(res2.r, gr.reshaped(res2.r.order(), res2.r.degree())) < 1e-14);
}

TEST_CASE("Moser: g = z") {
    auto res = moser_normal_form(harmonic(4, 12), mono(1, 0, 4, 12), 3);
    CHECK(res.r.max_abs() < 1e-14);
    // a(1) = -h z at leading order under the sign of the defining identity
    CHECK(std::abs(res.a[1].at(1, 0) + 1.0) < 1e-14);
    CHECK(res.residual.max_abs() < 1e-13);
}

TEST_CASE("Moser residual vanishes for random perturbations") {
    std::mt19937_64 rng(17);
    auto mu = harmonic(5, 12) + mono(2, 2, 5, 12, 0.2);
    for (int trial = 0; trial < 5; ++trial) {
        auto g = random_symbol(rng, 4, 0, 5, 12);
        auto res = moser_normal_form(mu, g, 3);
        CHECK(res.r.is_radial(1e-12));
        for (int k = 0; k <= 4; ++k)
            for (int a = 0; a <= 12; ++a)
                for (int b = 0; a + b <= 12; ++b)
                    if (a + b + 2 * k <= 12) CHECK(std::abs(res.residual[k].at(a, b)) < 1e-10);
        CHECK(std::abs(res.r[0].at(0, 0) - g[0].at(0, 0)) < 1e-13);
    }
}

TEST_CASE("Moser degree overflow") {
    auto g = mono(8, 1, 4, 10);
    CHECK_THROWS_AS(moser_normal_form(harmonic(4, 10), g, 3), Error);
}

TEST_CASE("functions of the oscillator") {
    const int K = 3, D = 12;
    CHECK(diff(oscillator_function_symbol({{0.0, 1.0}}, K, D), harmonic(K, D)) == 0.0);
    FormalSymbol sq(K, D);
    sq[0].set(2, 2, 1.0);
    sq[1].set(1, 1, -1.0);
    CHECK(diff(oscillator_function_symbol({{0.0, 0.0, 1.0}}, K, D), sq) == 0.0);
    const double h = 0.05;
    // mu(s) = s^3 + 0.4 s - h: diagonal mu(h(l+1))
    auto mb = oscillator_function_symbol({{0.0, 0.4, 0.0, 1.0}, {-1.0}}, K, D);
    auto M = assemble_toeplitz(to_monomial_symbol(mb, h), PlanckParameter(h), BasisTruncation(10));
    for (int l = 0; l < 10; ++l) {
        const double s = h * (l + 1);
        CHECK(std::abs(M.entries(l, l) - (s * s * s + 0.4 * s - h)) < 1e-10);
    }
}

TEST_CASE("Birkhoff normal form examples") {
    auto b0 = birkhoff_normal_form(TaylorTable2D::monomial(6, 1, 1), 6);
    CHECK(std::abs(b0.mu0[1] - 1.0) < 1e-14);
    CHECK(std::abs(b0.mu0[2]) < 1e-14);
    for (const auto& g : b0.generators) CHECK(g.is_zero());

    auto f4 = TaylorTable2D::monomial(6, 1, 1) + TaylorTable2D::monomial(6, 2, 2);
    auto b1 = birkhoff_normal_form(f4, 6);
    CHECK(std::abs(b1.mu0[1] - 1.0) < 1e-14);
    CHECK(std::abs(b1.mu0[2] - 1.0) < 1e-14);

    // |z|^2 + z^3 + zbar^3: nonzero cubic generator, s^2 coefficient -3
    auto f3 = TaylorTable2D::monomial(8, 1, 1) + TaylorTable2D::monomial(8, 3, 0) + TaylorTable2D::monomial(8, 0, 3);
    auto b2 = birkhoff_normal_form(f3, 8);
    CHECK_FALSE(b2.generators.front().is_zero());
    CHECK(std::abs(b2.mu0[1] - 1.0) < 1e-14);
    CHECK(std::abs(b2.mu0[2] + 3.0) < 1e-12);

    // transported symbol is radial up to O(|y|^9): halving the radius cuts the error by ~2^9
    for (double ang : {0.3, 1.9, 4.0}) {
        double err[2];
        for (int i = 0; i < 2; ++i) {
            const cplx y = (i == 0 ? 0.1 : 0.05) * std::polar(1.0, ang);
            auto x = birkhoff_transport(b2, {y, std::conj(y)}, 128);
            const cplx s = b2.harmonic_coefficient * std::norm(y);
            cplx rhs = 0.0;
            for (std::size_t j = 0; j < b2.mu0.size(); ++j) rhs += b2.mu0[j] * std::pow(s, static_cast<double>(j));
            err[i] = std::abs(f3.evaluate(x[0], x[1]) - rhs);
        }
        CHECK(err[0] < 1e-5);
        CHECK(err[0] / err[1] > 256.0);
    }
}

TEST_CASE("Birkhoff rejects a hyperbolic Hessian") {
    auto f = TaylorTable2D::monomial(4, 2, 0) + TaylorTable2D::monomial(4, 0, 2);
    CHECK_THROWS_AS(birkhoff_normal_form(f, 4), Error);
}

TEST_CASE("Toeplitz and Weyl symbols are inverse maps") {
    std::mt19937_64 rng(21);
    auto f = random_symbol(rng, 6, 2, 4, 10);
    auto back = weyl_to_toeplitz(toeplitz_to_weyl(f));
    CHECK(diff(back.reshaped(4, 10), f) < 1e-13);
    // Weyl symbol of |z|^2 is |z|^2 + h/2
    auto w = toeplitz_to_weyl(harmonic(2, 6));
    CHECK(std::abs(w[1].at(0, 0) - 0.5) < 1e-15);
}

TEST_CASE("quantum normal form at the harmonic oscillator") {
    MonomialSymbol f{{{1, 1}, 1.0}, {{2, 2}, 0.1}};
    auto q = quantum_normal_form(f, 0.0, 6);
    const double h = 0.05;
    auto M = assemble_toeplitz(f, PlanckParameter(h), BasisTruncation(12));
    for (int l = 0; l < 5; ++l) CHECK(std::abs(q.eigenvalue(l, h) - M.entries(l, l)) < 1e-12);
}

}
