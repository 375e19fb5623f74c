#include "bsl/quadratic.hpp"

#include <algorithm>
#include <cmath>

namespace bsl {

Mat2c mat_mul(const Mat2c& A, const Mat2c& B) {
    Mat2c C{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) C[i][j] = A[i][0] * B[0][j] + A[i][1] * B[1][j];
    return C;
}

cplx mat_det(const Mat2c& A) { return A[0][0] * A[1][1] - A[0][1] * A[1][0]; }

Mat2c mat_inv(const Mat2c& A) {
    cplx d = mat_det(A);
    if (d == cplx(0.0)) throw Error(ErrorKind::SingularInput, "singular 2x2 matrix");
    return {{{A[1][1] / d, -A[0][1] / d}, {-A[1][0] / d, A[0][0] / d}}};
}

std::array<cplx, 2> mat_apply(const Mat2c& A, std::array<cplx, 2> x) {
    return {A[0][0] * x[0] + A[0][1] * x[1], A[1][0] * x[0] + A[1][1] * x[1]};
}

Mat2c mat_identity() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

Mat2c pq_to_zv() {
    const double s = 1.0 / std::sqrt(2.0);
    return {{{s, kI * s}, {s, -kI * s}}};
}

Mat2c to_zv(const Mat2c& pq_map) {
    const Mat2c U = pq_to_zv();
    return mat_mul(mat_mul(U, pq_map), mat_inv(U));
}

std::array<std::array<double, 2>, 2> ComplexQuadraticForm::re_matrix() const {
    return {{{a.real(), c.real()}, {c.real(), b.real()}}};
}

std::array<std::array<double, 2>, 2> ComplexQuadraticForm::im_matrix() const {
    return {{{a.imag(), c.imag()}, {c.imag(), b.imag()}}};
}

cplx ComplexQuadraticForm::evaluate_zv(cplx z, cplx v) const {
    const double s = std::sqrt(2.0);
    return evaluate((z + v) / s, (z - v) / (kI * s));
}

ComplexQuadraticForm ComplexQuadraticForm::from_z_coefficients(cplx f20, cplx f02, cplx f11) {
    return {0.5 * (f20 + f02 + f11), 0.5 * (f11 - f20 - f02), 0.5 * kI * (f20 - f02)};
}

namespace {

double det2(const std::array<std::array<double, 2>, 2>& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

// smallest eigenvalue of Re(e^{i theta} Q)
double min_eig_rotated(const ComplexQuadraticForm& Q, double theta) {
    const cplx e = std::polar(1.0, theta);
    const double a = (e * Q.a).real(), b = (e * Q.b).real(), c = (e * Q.c).real();
    const double m = 0.5 * (a + b);
    const double r = std::hypot(0.5 * (a - b), c);
    return m - r;
}

double form_scale(const ComplexQuadraticForm& Q) {
    return std::max({std::abs(Q.a), std::abs(Q.b), std::abs(Q.c), 1e-300});
}

constexpr int kAngleGrid = 3600;

double bisect_boundary(const ComplexQuadraticForm& Q, double inside, double outside, double thresh) {
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (inside + outside);
        if (min_eig_rotated(Q, mid) > thresh)
            inside = mid;
        else
            outside = mid;
    }
    return 0.5 * (inside + outside);
}

}  // namespace

EllipticityReport ellipticity_check(const ComplexQuadraticForm& Q) {
    const auto R = Q.re_matrix();
    const auto I = Q.im_matrix();
    const double dr = det2(R), di = det2(I);
    const double imdet = Q.det().imag();
    const cplx E(dr + di, std::sqrt(std::abs(imdet * imdet - 4.0 * dr * di)));
    const double scale = form_scale(Q);
    const double tol = 1e-13 * scale * scale;
    const bool on_negative_axis = std::abs(E.imag()) <= tol && E.real() <= tol;

    // max over theta of the smallest eigenvalue of Re(e^{i theta} Q)
    double best = -1e300, best_th = 0.0;
    for (int i = 0; i < kAngleGrid; ++i) {
        double th = -kPi + 2.0 * kPi * i / kAngleGrid;
        double v = min_eig_rotated(Q, th);
        if (v > best) best = v, best_th = th;
    }
    // golden-section refinement around the best grid angle
    double lo = best_th - 2.0 * kPi / kAngleGrid, hi = best_th + 2.0 * kPi / kAngleGrid;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 100; ++it) {
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        if (min_eig_rotated(Q, x1) > min_eig_rotated(Q, x2))
            hi = x2;
        else
            lo = x1;
    }
    best = std::max(best, min_eig_rotated(Q, 0.5 * (lo + hi)));
    return {!on_negative_axis, best >= -1e-12 * scale, E};
}

cplx find_delta(const ComplexQuadraticForm& Q) {
    const double thresh = 1e-14 * form_scale(Q);
    std::vector<char> ok(kAngleGrid);
    std::vector<double> th(kAngleGrid);
    int count = 0;
    for (int i = 0; i < kAngleGrid; ++i) {
        th[i] = -kPi + 2.0 * kPi * i / kAngleGrid;
        ok[i] = min_eig_rotated(Q, th[i]) > thresh;
        count += ok[i];
    }
    if (count == 0) throw Error(ErrorKind::NoDeltaFound, "Re(delta Q) is indefinite for every delta");
    if (count == kAngleGrid) throw Error(ErrorKind::NoDeltaFound, "admissible arc is the whole circle");
    // longest circular run of admissible grid angles
    int best_start = -1, best_len = 0;
    for (int i = 0; i < kAngleGrid; ++i) {
        if (!ok[i] || ok[(i + kAngleGrid - 1) % kAngleGrid]) continue;
        int len = 0;
        while (ok[(i + len) % kAngleGrid]) ++len;
        if (len > best_len) best_len = len, best_start = i;
    }
    const double step = 2.0 * kPi / kAngleGrid;
    const double first = th[best_start];
    const double last = first + (best_len - 1) * step;
    const double left = bisect_boundary(Q, first, first - step, thresh);
    const double right = bisect_boundary(Q, last, last + step, thresh);
    return std::polar(1.0, 0.5 * (left + right));
}

cplx NormalFormData::reduced_value(cplx z, cplx v) const {
    const Mat2c inv = mat_inv(kappa_zv);
    auto x = mat_apply(inv, {z, v});
    return form.evaluate_zv(x[0], x[1]);
}

NormalFormData reduce_quadratic(const ComplexQuadraticForm& Q) { return reduce_quadratic(Q, find_delta(Q)); }

NormalFormData reduce_quadratic(const ComplexQuadraticForm& Q, cplx delta) {
    NormalFormData nf;
    nf.form = Q;
    nf.delta = delta;
    const ComplexQuadraticForm F = Q.scaled(delta);
    const double a0 = F.a.real(), b0 = F.b.real(), c0 = F.c.real();
    const double ap = F.a.imag(), bp = F.b.imag(), cp = F.c.imag();
    const double dd = a0 * b0 - c0 * c0;
    if (!(a0 > 0.0) || !(dd > 0.0))
        throw Error(ErrorKind::NoDeltaFound, "Re(delta Q) is not positive definite for the supplied delta");
    const double d0 = std::sqrt(dd);
    nf.d0_real = d0;
    nf.kappa1 = {{{std::sqrt(a0 / d0), c0 / std::sqrt(d0 * a0)}, {0.0, std::sqrt(d0 / a0)}}};
    nf.alpha = ap / a0;
    nf.gamma = (cp * a0 - ap * c0) / (d0 * a0);
    nf.beta = (a0 * bp - 2.0 * cp * c0 + c0 * c0 * ap / a0) / (d0 * d0);
    const double al = nf.alpha, be = nf.beta, ga = nf.gamma;
    nf.Delta = std::sqrt((be - al) * (be - al) + 4.0 * ga * ga);

    // eigenvector of [[alpha, gamma], [gamma, beta]] for (alpha + beta + Delta)/2
    double vx, vy;
    if (be - al >= 0.0) {
        vx = ga;
        vy = 0.5 * (be - al + nf.Delta);
    } else {
        vx = 0.5 * (al - be + nf.Delta);
        vy = ga;
    }
    const double nv = std::hypot(vx, vy);
    if (nv == 0.0) {
        nf.kappa2 = mat_identity();
    } else {
        vx /= nv;
        vy /= nv;
        // R = [v, v_perp] maps new to old coordinates; kappa2 = R^T
        nf.kappa2 = {{{vx, vy}, {-vy, vx}}};
    }
    const cplx lp = 1.0 + 0.5 * kI * (be + al + nf.Delta);
    const cplx lm = 1.0 + 0.5 * kI * (be + al - nf.Delta);
    nf.zeta = lp / lm;
    nf.r_coef = d0 * lm;
    const cplx s = std::pow(nf.zeta, 0.25);
    nf.kappa3 = {{{s, 0.0}, {0.0, 1.0 / s}}};
    nf.kappa = mat_mul(nf.kappa3, mat_mul(nf.kappa2, nf.kappa1));
    nf.kappa_zv = to_zv(nf.kappa);
    const cplx root = nf.r_coef * std::sqrt(nf.zeta);
    nf.d0 = root / delta;
    nf.harmonic_coefficient = 2.0 * root / delta;

    const Mat2c& m = nf.kappa_zv;
    const cplx a = m[0][0], b = m[0][1], c = m[1][0], d = m[1][1];
    (void)a;
    nf.phase.matrix_zv = m;
    nf.phase.x2 = -c / (2.0 * d);
    nf.phase.xv = 1.0 / d;
    nf.phase.v2 = b / (2.0 * d);
    nf.phase.ratio = std::abs(b / d);
    return nf;
}

RealQuadraticWeight transformed_weight(const Mat2c& m) {
    const cplx a = m[0][0], b = m[0][1], c = m[1][0], d = m[1][1];
    const double den = std::norm(d) - std::norm(b);
    RealQuadraticWeight w;
    w.abs_coef = (1.0 - den) / den;
    w.q = (a * std::conj(b) - std::conj(d) * c) / den;
    return w;
}

std::pair<PhaseQuadratic, QuadraticWeightPair> phase_and_weights(const NormalFormData& nf) {
    if (!(nf.phase.ratio < 1.0))
        throw Error(ErrorKind::PhaseConditionViolated, "|b/d| >= 1 for the composed symplectic matrix");
    const cplx u = std::sqrt(nf.zeta / std::abs(nf.zeta));
    QuadraticWeightPair w;
    w.r = u.real();
    w.j = u.imag();
    // W = (r-1)/r |x|^2 + (2j/r) Re x Im x, and (2j/r) Re x Im x = Re(-i j/r x^2)
    w.W.abs_coef = (w.r - 1.0) / w.r;
    w.W.q = -kI * (w.j / w.r);
    w.W_i.abs_coef = (1.0 - w.r) / w.r;
    w.W_i.q = -kI * (w.j / w.r);
    w.vanishes_to_second_order = std::abs(nf.zeta / std::abs(nf.zeta) - 1.0) < 1e-12;
    return {nf.phase, w};
}

std::vector<cplx> exact_quadratic_spectrum(const ComplexQuadraticForm& Q, double hbar, int count) {
    const auto e = ellipticity_check(Q);
    if (!e.elliptic || !e.range_proper) throw Error(ErrorKind::NoDeltaFound, "quadratic form is not elliptic with proper range");
    const NormalFormData nf = reduce_quadratic(Q);
    std::vector<cplx> out(std::max(count, 0));
    for (int k = 0; k < count; ++k)
        out[k] = hbar * (nf.harmonic_coefficient * (2.0 * k + 1.0) / 2.0 + Q.tr() / 2.0);
    return out;
}

}  // namespace bsl
