#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "bsl/common.hpp"

namespace bsl {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

// Finite map (alpha, beta) -> coefficient of z^alpha zbar^beta.
class MonomialSymbol {
public:
    using Key = std::pair<int, int>;

    MonomialSymbol() = default;
    MonomialSymbol(std::initializer_list<std::pair<const Key, cplx>> init);

    void add(int alpha, int beta, cplx c);
    void set(int alpha, int beta, cplx c);
    cplx coeff(int alpha, int beta) const;
    const std::map<Key, cplx>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    // Largest alpha + beta among stored entries (0 for the empty symbol).
    int degree() const;
    // Largest |alpha - beta|, the half bandwidth of the assembled matrix.
    int lower_bandwidth() const;
    int upper_bandwidth() const;
    bool is_radial() const;
    // Evaluate with z and zbar as independent complex slots.
    cplx evaluate(cplx z, cplx w) const;
    cplx evaluate(cplx z) const { return evaluate(z, std::conj(z)); }

    MonomialSymbol operator+(const MonomialSymbol& o) const;
    MonomialSymbol operator*(cplx s) const;
    bool operator==(const MonomialSymbol& o) const { return terms_ == o.terms_; }

private:
    std::map<Key, cplx> terms_;
};

// p^2, q^2, pq in z = (p + i q)/sqrt 2 coordinates.
MonomialSymbol quadratic_pq_symbol(cplx a, cplx b, cplx c);

struct ToeplitzMatrix {
    MatrixXc entries;  // M(l, k) = <e_l, T(f) e_k>
    double hbar = 0.0;
    int lower_bandwidth = 0;  // nonzeros at M(k + j, k) for j <= lower_bandwidth
    int upper_bandwidth = 0;
    int dim() const { return static_cast<int>(entries.rows()); }
};

ToeplitzMatrix monomial_matrix(int alpha, int beta, PlanckParameter hbar, BasisTruncation n);
ToeplitzMatrix assemble_toeplitz(const MonomialSymbol& symbol, PlanckParameter hbar, BasisTruncation n);
ToeplitzMatrix toeplitz_radial(const std::vector<double>& moments, PlanckParameter hbar, BasisTruncation n);
// Complex radial profile variant, D[k] = sum_j g_j hbar^j (k+j)!/k!.
std::vector<cplx> radial_diagonal(const std::vector<cplx>& moments, double hbar, int n);

struct QuadratureResult {
    cplx value;
    double error_estimate;
    int radial_nodes;
    int angular_nodes;
};

// Integral of e^{-|z|^2/hbar} F(z) dz / (pi hbar) by Gauss-Laguerre in
// t = |z|^2/hbar times the trapezoid rule in the angle. Node counts double
// until two successive values agree to tol.
QuadratureResult gaussian_integral(const std::function<cplx(cplx)>& F, double hbar, double tol = 1e-12,
                                   int max_nodes = 1024);

// Gauss-Laguerre nodes and weights (weight e^{-t} on [0, inf)).
void gauss_laguerre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// <e_l, f e_k> by quadrature. Throws QuadratureFailed if the estimated
// error exceeds 1e-10.
QuadratureResult inner_product_oracle(const MonomialSymbol& symbol, int k, int l, PlanckParameter hbar);

}  // namespace bsl
