#include <doctest.h>

#include <cmath>
#include <random>

#include "bsl/bargmann.hpp"
#include "bsl/quadratic.hpp"
#include "bsl/spectral.hpp"

using namespace bsl;

namespace {

const ComplexQuadraticForm kHarmonic{1.0, 1.0, 0.0};
const ComplexQuadraticForm kTilted{1.0, kI, 0.0};

bool near(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_SUITE("quadratic") {

TEST_CASE("ellipticity examples") {
    auto e1 = ellipticity_check(kHarmonic);
    CHECK(e1.elliptic);
    CHECK(near(e1.condition_value, 1.0, 1e-15));
    auto e2 = ellipticity_check({1.0, -1.0, 0.0});
    CHECK_FALSE(e2.elliptic);
    CHECK(near(e2.condition_value, -1.0, 1e-15));
    auto e3 = ellipticity_check(kTilted);
    CHECK(e3.elliptic);
    CHECK(e3.range_proper);
    CHECK(near(e3.condition_value, kI, 1e-15));
}

TEST_CASE("range of p^2 + i q^2 lies in a half plane") {
    // brute force: every value has nonnegative real and imaginary part
    for (int i = -20; i <= 20; ++i)
        for (int j = -20; j <= 20; ++j) {
            cplx v = kTilted.evaluate(i * 0.1, j * 0.1);
            CHECK(v.real() >= 0.0);
            CHECK(v.imag() >= 0.0);
        }
}

TEST_CASE("delta selection") {
    auto rot = kHarmonic.scaled(std::polar(1.0, kPi / 3));
    CHECK(near(find_delta(rot), std::polar(1.0, -kPi / 3), 1e-10));
    cplx d = find_delta(kTilted);
    CHECK(near(d, std::polar(1.0, -kPi / 4), 1e-10));
    auto re = kTilted.scaled(d).re_matrix();
    CHECK(re[0][0] > 0.0);
    CHECK(re[0][0] * re[1][1] - re[0][1] * re[1][0] > 0.0);
    CHECK_THROWS_AS(find_delta({1.0, -1.0, 0.0}), Error);
    try {
        find_delta({1.0, -1.0, 0.0});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoDeltaFound);
    }
}

TEST_CASE("reduction examples") {
    auto h = reduce_quadratic(kHarmonic);
    CHECK(near(h.delta, 1.0, 1e-12));
    CHECK(near(h.d0, 1.0, 1e-12));
    CHECK(near(h.zeta, 1.0, 1e-12));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            CHECK(near(h.kappa2[i][j], i == j ? 1.0 : 0.0, 1e-12));
            CHECK(near(h.kappa3[i][j], i == j ? 1.0 : 0.0, 1e-12));
        }

    auto t = reduce_quadratic(kTilted);
    CHECK(near(t.zeta, kI, 1e-12));
    CHECK(t.Delta == doctest::Approx(2.0));
    CHECK(t.alpha == doctest::Approx(-1.0));
    CHECK(t.beta == doctest::Approx(1.0));
    CHECK(std::abs(t.gamma) < 1e-12);
    CHECK(near(t.d0, std::polar(1.0, kPi / 4), 1e-12));

    auto s = reduce_quadratic({2.0, 2.0, 0.0});
    CHECK(near(s.d0, 2.0, 1e-12));
    CHECK(near(s.zeta, 1.0, 1e-12));
}

TEST_CASE("reduction invariants on random elliptic forms") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int tested = 0;
    while (tested < 30) {
        ComplexQuadraticForm Q{{U(rng) + 1.5, U(rng)}, {U(rng) + 1.5, U(rng)}, {0.4 * U(rng), 0.4 * U(rng)}};
        Q = Q.scaled(std::polar(1.0, 2.0 * U(rng)));
        auto e = ellipticity_check(Q);
        if (!e.elliptic || !e.range_proper) continue;
        ++tested;
        auto nf = reduce_quadratic(Q);
        CHECK(near(mat_det(nf.kappa1), 1.0, 1e-12));
        CHECK(near(mat_det(nf.kappa2), 1.0, 1e-12));
        CHECK(near(mat_det(nf.kappa3), 1.0, 1e-12));
        CHECK(std::real(std::pow(nf.zeta, 0.25)) > 0.0);
        for (int k = 0; k < 20; ++k) {
            const cplx z = cplx(U(rng), U(rng)) * 0.7, v = cplx(U(rng), U(rng)) * 0.7;
            CHECK(near(nf.reduced_value(z, v), nf.harmonic_coefficient * z * v, 1e-10));
        }
        // delta independence of the spectrum on the admissible arc
        const cplx d0 = find_delta(Q);
        for (double tilt : {-0.05, 0.05}) {
            const cplx d1 = d0 * std::polar(1.0, tilt);
            auto re = Q.scaled(d1).re_matrix();
            if (!(re[0][0] > 0.0 && re[0][0] * re[1][1] - re[0][1] * re[1][0] > 0.0)) continue;
            auto alt = reduce_quadratic(Q, d1);
            CHECK(near(alt.d0, nf.d0, 1e-12));
        }
        // weight sign
        auto pw = phase_and_weights(nf);
        CHECK(pw.second.r > 0.0);
        CHECK(pw.second.W.levi_margin() > 0.0);
        CHECK(pw.first.ratio < 1.0);
    }
}

TEST_CASE("phase and weights") {
    auto [ph, w] = phase_and_weights(reduce_quadratic(kHarmonic));
    CHECK(w.r == doctest::Approx(1.0));
    CHECK(std::abs(w.j) < 1e-12);
    CHECK(std::abs(w.W.abs_coef) < 1e-12);
    CHECK(std::abs(w.W.q) < 1e-12);
    CHECK(std::abs(w.W_i.abs_coef) < 1e-12);
    CHECK(w.vanishes_to_second_order);

    auto [pt, wt] = phase_and_weights(reduce_quadratic(kTilted));
    CHECK(wt.r == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(wt.j == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(near(cplx(wt.r, wt.j) * cplx(wt.r, wt.j), kI, 1e-14));
    CHECK_FALSE(wt.vanishes_to_second_order);
    // W(x) = (1 - sqrt2)|x|^2 + 2 Re x Im x
    for (cplx x : {cplx(0.3, 0.2), cplx(-0.5, 0.1), cplx(0.0, 1.0)}) {
        const double want = (1.0 - std::sqrt(2.0)) * std::norm(x) + 2.0 * x.real() * x.imag();
        CHECK(wt.W.evaluate(x) == doctest::Approx(want).epsilon(1e-12));
    }
    (void)ph;
    (void)pt;
}

TEST_CASE("transformed weight of a real symplectic map is zero") {
    // real-symplectic maps in (z, vbar) coordinates are [[a, b], [conj b, conj a]] with |a|^2 - |b|^2 = 1
    const cplx a = std::polar(std::cosh(0.4), 0.3), b = std::polar(std::sinh(0.4), -1.1);
    auto W = transformed_weight({{{a, b}, {std::conj(b), std::conj(a)}}});
    CHECK(std::abs(W.abs_coef) < 1e-14);
    CHECK(std::abs(W.q) < 1e-14);
}

TEST_CASE("hyperbolic forms are rejected") {
    CHECK_THROWS_AS(exact_quadratic_spectrum({1.0, -1.0, 0.0}, 0.1, 3), Error);
}

TEST_CASE("exact spectrum examples") {
    auto ev = exact_quadratic_spectrum(kHarmonic, 0.1, 5);
    for (int k = 0; k < 5; ++k) CHECK(near(ev[k], 0.1 * (2 * k + 2), 1e-14));
    // diagonal oracle T(2|z|^2)
    auto M = toeplitz_radial({0.0, 2.0}, PlanckParameter(0.1), BasisTruncation(5));
    for (int k = 0; k < 5; ++k) CHECK(near(ev[k], M.entries(k, k), 1e-14));

    // homogeneity in hbar
    auto a = exact_quadratic_spectrum(kTilted, 0.1, 3), b = exact_quadratic_spectrum(kTilted, 0.01, 3);
    for (int k = 0; k < 3; ++k) CHECK(near(a[k], 10.0 * b[k], 1e-14));
}

TEST_CASE("exact spectrum against the truncated matrix") {
    // the matrix oracle fixes the harmonic coefficient to 2 sqrt(det(delta f))/delta
    const double h = 0.1;
    auto ev = exact_quadratic_spectrum(kTilted, h, 5);
    const auto nf = reduce_quadratic(kTilted);
    for (int k = 0; k < 5; ++k)
        CHECK(near(ev[k], h * (std::polar(1.0, kPi / 4) * (2.0 * k + 1.0) + cplx(1.0, 1.0) / 2.0), 1e-14));
    CHECK(near(nf.harmonic_coefficient, 2.0 * nf.d0, 1e-15));
    auto M = assemble_toeplitz(quadratic_pq_symbol(kTilted.a, kTilted.b, kTilted.c), PlanckParameter(h),
                               BasisTruncation(400));
    auto sp = eigen_spectrum(M, 5);
    for (int k = 0; k < 5; ++k) CHECK(std::abs(sp.eigenvalues[k] - ev[k]) <= 1e-6 * std::abs(ev[k]));
}

TEST_CASE("trace term is tr/2") {
    // p^2 + q^2 + 2 c p q with real c: the tr/4 variant is off by h/2
    ComplexQuadraticForm Q{1.0, 2.0, 0.3};
    const double h = 0.05;
    auto ev = exact_quadratic_spectrum(Q, h, 3);
    auto sp = eigen_spectrum(quadratic_pq_symbol(Q.a, Q.b, Q.c), h, 3, 1e-10);
    for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(sp.eigenvalues[k] - ev[k]) < 1e-8);
        CHECK(std::abs(sp.eigenvalues[k] - (ev[k] - h * Q.tr() / 4.0)) > 1e-3);
    }
}

}
