#include <doctest.h>

#include <cmath>
#include <random>

#include "bsl/contour.hpp"

using namespace bsl;

namespace {

MatrixXc random_symmetric(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> N(0.0, 1.0);
    MatrixXc H(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) H(i, j) = H(j, i) = cplx(N(rng), N(rng));
    return H;
}

QuadraticPhase minus_y2() {
    QuadraticPhase Q;
    Q.H = MatrixXc::Identity(1, 1);
    Q.y_c = VectorXc::Zero(1);
    return Q;
}

AffineContour line(cplx dir) {
    AffineContour G;
    G.A = MatrixXc::Constant(1, 1, dir);
    G.b = VectorXc::Zero(1);
    return G;
}

TaylorTable2D exp_table(int D) {
    // e^{y + ybar} = sum y^a ybar^b / (a! b!)
    TaylorTable2D t(D);
    for (int a = 0; a <= D; ++a)
        for (int b = 0; a + b <= D; ++b) t.set(a, b, 1.0 / (std::tgamma(a + 1.0) * std::tgamma(b + 1.0)));
    return t;
}

}  // namespace

TEST_SUITE("contour") {

TEST_CASE("square root examples") {
    CHECK((complex_sym_sqrt(MatrixXc::Identity(3, 3)) - MatrixXc::Identity(3, 3)).norm() < 1e-15);
    MatrixXc D = MatrixXc::Zero(2, 2);
    D(0, 0) = 4.0;
    D(1, 1) = 9.0;
    MatrixXc P = complex_sym_sqrt(D);
    CHECK(std::abs(P(0, 0) - 2.0) < 1e-14);
    CHECK(std::abs(P(1, 1) - 3.0) < 1e-14);
    CHECK(std::abs(P(0, 1)) < 1e-14);

    MatrixXc X(2, 2);
    X << 0.0, 1.0, 1.0, 0.0;
    MatrixXc S = complex_sym_sqrt(X);
    const cplx p{0.5, 0.5}, m{0.5, -0.5};
    CHECK(std::abs(S(0, 0) - p) < 1e-14);
    CHECK(std::abs(S(1, 1) - p) < 1e-14);
    CHECK(std::abs(S(0, 1) - m) < 1e-14);
    CHECK((S * S - X).norm() < 1e-14);
}

TEST_CASE("square root on random symmetric matrices") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> dim(1, 4);
    for (int trial = 0; trial < 100; ++trial) {
        MatrixXc H = random_symmetric(rng, dim(rng));
        MatrixXc P = complex_sym_sqrt(H);
        CHECK((P - P.transpose()).norm() <= 1e-13 * P.norm());
        CHECK((P * P - H).norm() <= 1e-12 * H.norm());
    }
}

TEST_CASE("square root of a defective-free repeated eigenvalue") {
    MatrixXc H = MatrixXc::Identity(2, 2) * cplx(-4.0);
    MatrixXc P = complex_sym_sqrt(H);
    CHECK((P * P - H).norm() < 1e-13);
    CHECK(std::abs(P(0, 0) - cplx(0.0, 2.0)) < 1e-13);
}

TEST_CASE("square root rejects singular input") {
    MatrixXc H = MatrixXc::Zero(2, 2);
    H(0, 0) = 1.0;
    CHECK_THROWS_AS(complex_sym_sqrt(H), Error);
}

TEST_CASE("principal branch") {
    CHECK(std::abs(principal_sqrt(-1.0) - kI) < 1e-15);
    for (double a : {-3.0, -1.0, 0.0, 1.0, 3.0}) CHECK(std::real(principal_sqrt(std::polar(2.0, a))) >= 0.0);
}

TEST_CASE("affine contour examples") {
    auto Q = minus_y2();
    auto real = affine_contour_is_good(line(1.0), Q);
    CHECK(real.good);
    CHECK(real.contraction < 1e-15);
    CHECK(real.passes_through_critical);

    auto imag = affine_contour_is_good(line(kI), Q);
    CHECK_FALSE(imag.good);
    CHECK(std::isinf(imag.contraction));

    auto tilted = affine_contour_is_good(line(std::polar(1.0, kPi / 8)), Q);
    CHECK(tilted.good);
    CHECK(tilted.contraction == doctest::Approx(std::tan(kPi / 8)).epsilon(1e-12));

    // a line missing the critical point
    AffineContour off = line(1.0);
    off.b(0) = cplx(0.0, 0.3);
    auto miss = affine_contour_is_good(off, Q);
    CHECK_FALSE(miss.good);
    CHECK_FALSE(miss.passes_through_critical);
}

TEST_CASE("good contours descend") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> N(0.0, 1.0);
    int good = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 2;
        QuadraticPhase Q;
        MatrixXc R = random_symmetric(rng, d);
        Q.H = R * R.transpose() + MatrixXc::Identity(d, d) * cplx(3.0);
        Q.y_c = VectorXc::Zero(d);
        MatrixXc P = complex_sym_sqrt(Q.H);
        AffineContour G;
        MatrixXc pert(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) pert(i, j) = cplx(N(rng), N(rng)) * 0.2;
        G.A = P.inverse() * (MatrixXc::Identity(d, d) + pert);
        G.b = VectorXc::Zero(d);
        auto v = affine_contour_is_good(G, Q);
        if (!v.good) continue;
        ++good;
        for (int s = 0; s < 1000; ++s) {
            Eigen::VectorXd w(d);
            for (int i = 0; i < d; ++i) w(i) = N(rng);
            VectorXc y = G.A * w.cast<cplx>() + G.b;
            if ((y - Q.y_c).norm() < 0.1) continue;
            CHECK(std::real(Q.evaluate(y) - Q.value_at_critical) < 0.0);
        }
    }
    CHECK(good > 0);
}

TEST_CASE("Gaussian expansion examples") {
    auto yy = gaussian_expansion(TaylorTable2D::monomial(4, 1, 1), 0.1, 1.0, 0.5, 0.5);
    CHECK(std::abs(yy.value - 0.1) < 1e-15);
    auto one = gaussian_expansion(TaylorTable2D::constant(4, 1.0), 0.1, 1.0, 0.5, 0.5);
    CHECK(std::abs(one.value - 1.0) < 1e-15);

    auto e = gaussian_expansion(exp_table(12), 0.2, 10.0, 5.0, 0.9);
    CHECK(std::abs(e.value - std::exp(0.2)) < 1e-8);
    auto q = gaussian_moment_quadrature([](cplx y) { return std::exp(2.0 * std::real(y)); }, 0.2);
    CHECK(std::abs(q - std::exp(0.2)) < 1e-10);
}

TEST_CASE("Gaussian expansion truncation rule") {
    auto r = gaussian_expansion(exp_table(40), 0.1, 1.0, 0.5, 0.5);
    CHECK(r.n_requested == 3);  // ceil(0.5 * 0.5 / 0.1)
    CHECK(r.n_used == 3);
    CHECK_FALSE(r.degree_too_low);
    CHECK(r.tail_bound > 0.0);
    auto low = gaussian_expansion(exp_table(2), 0.01, 1.0, 0.5, 0.5);
    CHECK(low.degree_too_low);
    CHECK(low.n_used < low.n_requested);
}

TEST_CASE("Gaussian expansion error decays exponentially") {
    std::vector<double> x, y;
    for (double h : {0.4, 0.2, 0.1, 0.05}) {
        auto r = gaussian_expansion(exp_table(40), h, 1.0, 0.5, 0.5);
        x.push_back(1.0 / h);
        y.push_back(std::log(std::abs(r.value - std::exp(h))));
    }
    const double n = 4;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < 4; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double r2 = std::pow(n * sxy - sx * sy, 2) / ((n * sxx - sx * sx) * (n * syy - sy * sy));
    CHECK(slope < 0.0);
    CHECK(r2 > 0.95);
}

TEST_CASE("Gaussian expansion is rotation covariant") {
    TaylorTable2D F(8);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int a = 0; a <= 8; ++a)
        for (int b = 0; a + b <= 8; ++b) F.set(a, b, {N(rng), N(rng)});
    const cplx u = std::polar(1.0, 0.7);
    TaylorTable2D G = linear_substitute(F, {{{u, 0.0}, {0.0, std::conj(u)}}});
    auto a = gaussian_expansion(F, 0.1, 2.0, 1.0, 0.9);
    auto b = gaussian_expansion(G, 0.1, 2.0, 1.0, 0.9);
    CHECK(std::abs(a.value - b.value) < 1e-13);
}

TEST_CASE("critical point data") {
    auto base = TaylorTable2D::monomial(4, 1, 1, -1.0);
    auto c0 = critical_point_data(base);
    CHECK(std::abs(c0.z_c) < 1e-15);
    CHECK(std::abs(c0.v_c) < 1e-15);
    CHECK(std::abs(c0.hessian_factor - 1.0) < 1e-14);

    auto shifted = base + TaylorTable2D::constant(4, 0.25);
    auto c1 = critical_point_data(shifted);
    CHECK(std::abs(c1.value - 0.25) < 1e-15);
    CHECK(std::abs(c1.leading_value(0.1) - std::exp(2.5)) < 1e-10);

    // -(z - 0.1)(v - 0.2) = -z v + 0.2 z + 0.1 v - 0.02
    TaylorTable2D f(4);
    f.set(1, 1, -1.0);
    f.set(1, 0, 0.2);
    f.set(0, 1, 0.1);
    f.set(0, 0, -0.02);
    auto c2 = critical_point_data(f);
    CHECK(std::abs(c2.z_c - 0.1) < 1e-14);
    CHECK(std::abs(c2.v_c - 0.2) < 1e-14);
    CHECK(std::abs(c2.hessian_factor - 1.0) < 1e-14);
    CHECK(c2.iterations <= 2);
}

TEST_CASE("critical point failures") {
    CHECK_THROWS_AS(critical_point_data(TaylorTable2D::monomial(4, 2, 0)), Error);
    try {
        critical_point_data(TaylorTable2D::monomial(4, 2, 0));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateHessian);
    }
}

}
