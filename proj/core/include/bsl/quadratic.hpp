#pragma once

#include <array>
#include <vector>

#include "bsl/common.hpp"

namespace bsl {

using Mat2c = std::array<std::array<cplx, 2>, 2>;

Mat2c mat_mul(const Mat2c& A, const Mat2c& B);
Mat2c mat_inv(const Mat2c& A);
cplx mat_det(const Mat2c& A);
std::array<cplx, 2> mat_apply(const Mat2c& A, std::array<cplx, 2> x);
Mat2c mat_identity();
// (p, q) -> (z, vbar) with z = (p + i q)/sqrt2, vbar = (p - i q)/sqrt2
Mat2c pq_to_zv();
// Express a (p,q)-linear map in (z, vbar) coordinates.
Mat2c to_zv(const Mat2c& pq_map);

// f(p, q) = a p^2 + b q^2 + 2 c p q
struct ComplexQuadraticForm {
    cplx a, b, c;
    std::array<std::array<double, 2>, 2> re_matrix() const;
    std::array<std::array<double, 2>, 2> im_matrix() const;
    cplx det() const { return a * b - c * c; }
    cplx tr() const { return a + b; }
    cplx evaluate(cplx p, cplx q) const { return a * p * p + b * q * q + 2.0 * c * p * q; }
    // holomorphic extension in (z, vbar)
    cplx evaluate_zv(cplx z, cplx v) const;
    ComplexQuadraticForm scaled(cplx s) const { return {s * a, s * b, s * c}; }
    // from the z^2, zbar^2, z zbar coefficients of a symbol
    static ComplexQuadraticForm from_z_coefficients(cplx f20, cplx f02, cplx f11);
};

struct EllipticityReport {
    bool elliptic;
    bool range_proper;
    cplx condition_value;
};

EllipticityReport ellipticity_check(const ComplexQuadraticForm& Q);
// Unit delta with Re(delta Q) positive definite, midpoint of the admissible arc.
cplx find_delta(const ComplexQuadraticForm& Q);

// phi(x, vbar) = x2 x^2 + xv x vbar + v2 vbar^2
struct PhaseQuadratic {
    cplx x2, xv, v2;
    Mat2c matrix_zv;   // [[a, b], [c, d]]
    double ratio;      // |b/d|
    cplx evaluate(cplx x, cplx v) const { return x2 * x * x + xv * x * v + v2 * v * v; }
};

// W(x) = abs_coef |x|^2 + Re(q x^2)
struct RealQuadraticWeight {
    double abs_coef = 0.0;
    cplx q = 0.0;
    double evaluate(cplx x) const { return abs_coef * std::norm(x) + std::real(q * x * x); }
    // 1 - d dbar W
    double levi_margin() const { return 1.0 - abs_coef; }
};

struct QuadraticWeightPair {
    double r, j;
    RealQuadraticWeight W, W_i;
    bool vanishes_to_second_order;
};

struct NormalFormData {
    ComplexQuadraticForm form;
    cplx delta;
    Mat2c kappa1, kappa2, kappa3;  // (p,q) maps for delta * form
    Mat2c kappa;                   // kappa3 kappa2 kappa1
    Mat2c kappa_zv;                // kappa in (z, vbar) coordinates
    double alpha, beta, gamma, Delta, d0_real;
    cplx zeta;
    cplx r_coef;                   // r = d0_real (1 + i(beta + alpha - Delta)/2)
    cplx d0;                       // sqrt(det(delta f))/delta
    cplx harmonic_coefficient;     // f o kappa^{-1}(z, vbar) = harmonic_coefficient z vbar
    PhaseQuadratic phase;
    // f o kappa^{-1} evaluated at (z, vbar)
    cplx reduced_value(cplx z, cplx v) const;
};

NormalFormData reduce_quadratic(const ComplexQuadraticForm& Q);
NormalFormData reduce_quadratic(const ComplexQuadraticForm& Q, cplx delta);

std::pair<PhaseQuadratic, QuadraticWeightPair> phase_and_weights(const NormalFormData& nf);
// Transformed weight of 0 under the linear map [[a,b],[c,d]] (z, vbar coords).
RealQuadraticWeight transformed_weight(const Mat2c& m);

std::vector<cplx> exact_quadratic_spectrum(const ComplexQuadraticForm& Q, double hbar, int count);

}  // namespace bsl
