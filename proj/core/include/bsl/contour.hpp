#pragma once

#include <limits>

#include "bsl/bargmann.hpp"
#include "bsl/symbols.hpp"

namespace bsl {

// Gamma = { A w + b : w real }
struct AffineContour {
    MatrixXc A;
    VectorXc b;
};

// F(y) = F(y_c) - (P (y - y_c))^2 with P^T P = H.
struct QuadraticPhase {
    MatrixXc H;
    VectorXc y_c;
    cplx value_at_critical = 0.0;
    cplx evaluate(const VectorXc& y) const;
};

// Square root on the spectrum, arguments mapped into (-pi/2, pi/2].
cplx principal_sqrt(cplx x);

// Symmetric P with P^2 = H, built from the Hermite interpolation polynomial of
// principal_sqrt on the spectrum of H.
MatrixXc complex_sym_sqrt(const MatrixXc& H);

struct ContourVerdict {
    bool good = false;
    double contraction = std::numeric_limits<double>::infinity();
    bool passes_through_critical = false;
    Eigen::VectorXd w_critical;  // real parameter of y_c when it lies on Gamma
};

ContourVerdict affine_contour_is_good(const AffineContour& G, const QuadraticPhase& Q);

struct GaussianExpansion {
    cplx value = 0.0;
    int n_used = 0;
    int n_requested = 0;
    double tail_bound = 0.0;
    bool degree_too_low = false;  // table could not supply all n_requested terms
};

// sum_{k<N} hbar^k/k! (d_y d_ybar)^k F(0), N = ceil(delta min(rho-eta, eta)/hbar)
GaussianExpansion gaussian_expansion(const TaylorTable2D& F, double hbar, double rho, double eta, double delta);

// Reference value of (pi hbar)^{-1} int e^{-|y|^2/hbar} F(y, ybar) dy by quadrature.
cplx gaussian_moment_quadrature(const std::function<cplx(cplx)>& F, double hbar);

struct CriticalPointData {
    cplx z_c = 0.0;
    cplx v_c = 0.0;  // value of the vbar slot
    cplx value = 0.0;  // F(z_c, v_c)
    cplx hessian_factor = 1.0;  // (-det Hess F)^{-1/2}
    int iterations = 0;
    // e^{F_c/hbar} * hessian_factor
    cplx leading_value(double hbar) const;
};

// phi: table in the slots (z, vbar). Newton from the origin.
CriticalPointData critical_point_data(const TaylorTable2D& phi, double newton_tol = 1e-14);

}  // namespace bsl
