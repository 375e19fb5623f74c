#pragma once

#include <array>
#include <vector>

#include "bsl/bargmann.hpp"
#include "bsl/common.hpp"
#include "bsl/quadratic.hpp"

namespace bsl {

// Truncated Taylor data of a germ at 0: t(alpha, beta) is the coefficient of
// z^alpha zbar^beta, i.e. d^alpha dbar^beta a(0) / (alpha! beta!).
class TaylorTable2D {
public:
    TaylorTable2D() : TaylorTable2D(0) {}
    explicit TaylorTable2D(int degree);

    static TaylorTable2D constant(int degree, cplx c);
    static TaylorTable2D monomial(int degree, int alpha, int beta, cplx c = 1.0);
    static TaylorTable2D from_symbol(const MonomialSymbol& s, int degree);
    // radial profile sum_j p_j s^j evaluated at s = z zbar
    static TaylorTable2D radial(const std::vector<cplx>& profile, int degree);

    int degree() const { return D_; }
    cplx at(int alpha, int beta) const;
    void set(int alpha, int beta, cplx c);
    void add(int alpha, int beta, cplx c);
    // raw derivative d^alpha dbar^beta a(0)
    cplx derivative(int alpha, int beta) const;
    int effective_degree() const;
    double max_abs() const;
    bool is_zero(double tol = 0.0) const { return max_abs() <= tol; }
    bool truncated() const { return truncated_; }
    void mark_truncated() { truncated_ = true; }
    void clear_truncated() { truncated_ = false; }

    TaylorTable2D resized(int degree) const;
    TaylorTable2D homogeneous_part(int n) const;
    TaylorTable2D d_z() const;
    TaylorTable2D d_zbar() const;
    // d_theta = i (z d - zbar dbar)
    TaylorTable2D d_theta() const;
    cplx evaluate(cplx z, cplx w) const;
    cplx evaluate(cplx z) const { return evaluate(z, std::conj(z)); }
    MonomialSymbol to_symbol(double drop_below = 0.0) const;

    TaylorTable2D operator+(const TaylorTable2D& o) const;
    TaylorTable2D operator-(const TaylorTable2D& o) const;
    TaylorTable2D operator*(cplx s) const;
    TaylorTable2D& operator+=(const TaylorTable2D& o);
    TaylorTable2D& operator-=(const TaylorTable2D& o);

    const std::vector<cplx>& raw() const { return c_; }

private:
    int idx(int a, int b) const { return a * (D_ + 1) + b; }
    int D_;
    std::vector<cplx> c_;
    bool truncated_ = false;
};

// Pointwise product truncated at the shared degree.
TaylorTable2D multiply(const TaylorTable2D& f, const TaylorTable2D& g);
// f(L00 z + L01 w, L10 z + L11 w)
TaylorTable2D linear_substitute(const TaylorTable2D& f, const std::array<std::array<cplx, 2>, 2>& L);
// f(z + z0, w + w0)
TaylorTable2D translate(const TaylorTable2D& f, cplx z0, cplx w0);

// Finite hbar expansion a_0 + hbar a_1 + ... + hbar^K a_K.
class FormalSymbol {
public:
    FormalSymbol() : FormalSymbol(0, 0) {}
    FormalSymbol(int K, int D);
    static FormalSymbol from_table(const TaylorTable2D& t, int K);
    static FormalSymbol constant(int K, int D, cplx c);

    int order() const { return K_; }
    int degree() const { return D_; }
    const TaylorTable2D& operator[](int k) const { return terms_.at(k); }
    TaylorTable2D& operator[](int k) { return terms_.at(k); }
    const std::vector<TaylorTable2D>& terms() const { return terms_; }
    bool truncated() const;
    void clear_truncated();
    double max_abs() const;
    bool is_radial(double tol = 0.0) const;

    FormalSymbol reshaped(int K, int D) const;
    // multiply by hbar (order K term drops, flagged if nonzero)
    FormalSymbol times_hbar() const;
    // divide by hbar; requires the order-0 term to vanish to tol
    FormalSymbol div_hbar(double tol = 1e-13) const;
    // zero every coefficient with degree + 2 * order > w
    FormalSymbol weight_truncated(int w) const;
    FormalSymbol weight_part(int w) const;

    FormalSymbol operator+(const FormalSymbol& o) const;
    FormalSymbol operator-(const FormalSymbol& o) const;
    FormalSymbol operator*(cplx s) const;
    FormalSymbol& operator+=(const FormalSymbol& o);

    cplx evaluate(cplx z, cplx w, double hbar) const;

private:
    int K_, D_;
    std::vector<TaylorTable2D> terms_;
};

// sum_k hbar^k a_k as a plain symbol, for matrix assembly
MonomialSymbol to_monomial_symbol(const FormalSymbol& a, double hbar);

FormalSymbol sharp_product(const FormalSymbol& f, const FormalSymbol& g, int K);
inline FormalSymbol sharp_product(const FormalSymbol& f, const FormalSymbol& g) {
    return sharp_product(f, g, std::max(f.order(), g.order()));
}
// [f, g]_# = f#g - g#f
FormalSymbol sharp_commutator(const FormalSymbol& f, const FormalSymbol& g, int K);
// (|z|^2)^{#j}
FormalSymbol sharp_power_harmonic(int j, int K, int D);

struct FormalNormReport {
    double rho = 0.0;
    std::vector<double> per_order;   // ||a||_{rho,s}
    std::vector<double> cumulative;  // ||a||_{rho,s-}
    double at(int s) const;
    double upto(int s) const;  // cumulative, 0 for s < 0, saturates beyond S
};

// ||a||_{rho,s} = rho^s sum_{2k+alpha+beta=s} 2 2^{-k} k!/((k+alpha)!(k+beta)!) |d^alpha dbar^beta a_k(0)|
FormalNormReport formal_norm(const FormalSymbol& a, double rho, int s_max = -1);
FormalNormReport formal_norm(const TaylorTable2D& a, double rho, int s_max = -1);

// {f, g} = i (dg dbar f - dbar g d f)
TaylorTable2D poisson_bracket(const TaylorTable2D& f, const TaylorTable2D& g);
// termwise over hbar orders
FormalSymbol poisson_bracket(const FormalSymbol& f, const FormalSymbol& g, int K);

TaylorTable2D theta_antiderivative(const TaylorTable2D& f, double tol = 1e-14);
std::vector<cplx> radial_average(const TaylorTable2D& f);

struct CohomologySolution {
    TaylorTable2D b;
    std::vector<cplx> r;
};
// Solve mu'(|z|^2) d_theta b = g - r(|z|^2) with b free of diagonal terms.
CohomologySolution cohomology_solve(const TaylorTable2D& g, const std::vector<cplx>& mu_prime);

// Radial series helpers (coefficients of s^j).
std::vector<cplx> series_reciprocal(const std::vector<cplx>& p, int n);
std::vector<cplx> series_derivative(const std::vector<cplx>& p);
cplx series_eval(const std::vector<cplx>& p, cplx s);

// Returns 1 + a* with (1+a)#(1+a*) = 1; requires the order-0 term of the
// input to be exactly 1.
FormalSymbol sharp_inverse(const FormalSymbol& one_plus_a);

struct MoserResult {
    FormalSymbol a;          // a(1)
    FormalSymbol r;          // r(1), radial
    FormalSymbol residual;   // eq. residual at t = 1 (orders 0..K+1)
    int exact_degree_at_order0 = 0;  // coefficients with d + 2k <= this are exact
    bool truncated = false;
};

// mu: radial symbol mu(|z|^2) (order-0 profile must be s + O(s^2)).
// g: perturbation. Solves (mu + t h^2 g)#(1+a) = (1+a)#(mu + h^2 r) through
// hbar order K+1, with t-collocation on t_nodes points.
MoserResult moser_normal_form(const FormalSymbol& mu, const FormalSymbol& g, int K, int t_nodes = 0);
// residual (mu + h^2 g)#(1+a) - (1+a)#(mu + h^2 r)
FormalSymbol moser_residual(const FormalSymbol& mu, const FormalSymbol& g, const FormalSymbol& a,
                            const FormalSymbol& r, int K);

// mu_b = sum_{k,j} hbar^k mu_k^{(j)}(0)/j! (|z|^2)^{#j}; mu given as a list of
// radial profiles mu_k.
FormalSymbol oscillator_function_symbol(const std::vector<std::vector<cplx>>& mu, int K, int D);

struct BirkhoffResult {
    std::vector<cplx> mu0;          // mu0(s) = s + ..., s = c z w
    cplx harmonic_coefficient;      // c
    Mat2c linear_map;               // old (z,w) = linear_map * new (z,w)
    std::vector<TaylorTable2D> generators;  // chi_3 .. chi_D
    TaylorTable2D normal_form;      // f o linear o flows, radial to degree D
    TaylorTable2D quadratic_reduced; // f o linear truncated at degree 2
};

BirkhoffResult birkhoff_normal_form(const TaylorTable2D& f, int D);
// Hamiltonian flow zdot = i d_w chi, wdot = -i d_z chi, time 1 by RK4.
std::array<cplx, 2> flow_time_one(const TaylorTable2D& chi, std::array<cplx, 2> y, int steps = 64);
// Maps normal coordinates to original ones: linear o Phi_3 o ... o Phi_D.
std::array<cplx, 2> birkhoff_transport(const BirkhoffResult& b, std::array<cplx, 2> y, int steps = 64);

// Toeplitz <-> Weyl symbol conversion, exp(+-(hbar/2) d dbar).
FormalSymbol toeplitz_to_weyl(const FormalSymbol& f);
FormalSymbol weyl_to_toeplitz(const FormalSymbol& f);

struct QuantumNormalForm {
    FormalSymbol radial;  // Toeplitz symbol, radial through weight max_weight
    cplx harmonic_coefficient;
    cplx level;           // f(x0)
    int max_weight;
    // sum_{k,j} radial_k(j,j) hbar^{k+j} (l+j)!/l! over weight <= max_weight
    cplx eigenvalue(int l, double hbar, int weight = -1) const;
};

// Quantum Birkhoff normal form of T(f) near a nondegenerate critical point
// x0 of f with elliptic Hessian.
QuantumNormalForm quantum_normal_form(const MonomialSymbol& f, cplx x0, int max_weight = 8);

}  // namespace bsl
