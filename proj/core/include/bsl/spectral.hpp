#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bsl/bargmann.hpp"
#include "bsl/quadratic.hpp"
#include "bsl/symbols.hpp"

namespace bsl {

// All eigenvalues of a dense matrix (LAPACK zgeev), sorted by modulus.
std::vector<cplx> dense_eigenvalues(const MatrixXc& M);

struct SpectrumResult {
    std::vector<cplx> eigenvalues;  // k_wanted smallest by modulus
    int n_max_used = 0;
    double convergence_gap = 0.0;
    bool converged = true;
};

// Fixed matrix: smallest-modulus eigenvalues, gap 0.
SpectrumResult eigen_spectrum(const ToeplitzMatrix& M, int k_wanted);

// Adaptive truncation: doubles n_max from n_start until the k_wanted
// smallest-modulus eigenvalues move by less than tol. Throws NoConvergence
// only when throw_on_failure is set; otherwise the last result is flagged.
SpectrumResult eigen_spectrum(const MonomialSymbol& symbol, double hbar, int k_wanted, double tol,
                              int n_start = 64, int n_cap = 4096, bool throw_on_failure = false);

struct GridRect {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

enum class SigmaMethod { Auto, Dense, Banded };

struct PseudospectrumField {
    GridRect rect;
    int nx = 0, ny = 0;
    std::vector<double> sigma_min;  // row-major, index iy * nx + ix
    cplx lambda(int ix, int iy) const;
    double at(int ix, int iy) const { return sigma_min[static_cast<std::size_t>(iy) * nx + ix]; }
    // nearest grid cell of z, or nullopt outside the rectangle (half a cell tolerance)
    std::optional<std::pair<int, int>> cell_of(cplx z) const;
};

// sigma_min(M - lambda) at one point.
double smallest_singular_value(const ToeplitzMatrix& M, cplx lambda, SigmaMethod method = SigmaMethod::Auto);

// Grid points are independent; evaluated in parallel by worker_count() threads.
PseudospectrumField resolvent_grid(const ToeplitzMatrix& M, const GridRect& rect, int nx, int ny,
                                   SigmaMethod method = SigmaMethod::Auto);

struct PseudospectrumMask {
    double c = 0.0, hbar = 0.0, threshold = 0.0;
    std::vector<unsigned char> mask;  // sigma_min <= e^{-c/h}
    std::vector<int> label;           // component id or -1
    int components = 0;
    std::vector<int> component_size;
    // number of eigenvalues whose nearest cell falls in each component
    std::vector<int> eigen_count;
    int eigenvalues_in_window = 0;
    int eigenvalues_outside_mask = 0;
    // every component holds exactly one eigenvalue and every eigenvalue in the
    // window lies in some component
    bool isolating() const;
};

PseudospectrumMask analytic_pseudospectrum(const PseudospectrumField& field, double c, double hbar,
                                           const std::vector<cplx>& eigenvalues = {});

struct CScanResult {
    std::vector<double> c_values;
    std::vector<int> components;
    std::vector<bool> isolating;
    double c_lo = 0.0, c_hi = 0.0;  // isolating range (both 0 when none)
    bool found = false;
};

CScanResult scan_isolating_c(const PseudospectrumField& field, double hbar, const std::vector<cplx>& eigenvalues,
                             double c_min, double c_max, int steps);

// -i * closed-loop integral of vbar dx along x(t) = sqrt(E/d) e^{it},
// vbar(t) = sqrt(E/d) e^{-it}, t in [0, 2 pi winding]. Trapezoid with
// node doubling to 1e-10 agreement.
cplx action_integral(cplx d, cplx E, int winding);

// Same integral along a user loop t -> (x, vbar), t in [0, 1].
cplx action_integral_loop(const std::function<std::array<cplx, 2>(double)>& loop, double tol = 1e-10);

// Leading Bohr-Sommerfeld rule lambda(x) = level + mu0( h (c (x + 1/2) + tr/2) ),
// mu0(s) = s + O(s^2).
struct BohrSommerfeldRule {
    std::vector<cplx> mu0{0.0, 1.0};
    cplx c = 1.0;
    cplx tr = 1.0;
    cplx level = 0.0;
    double hbar = 0.1;
    cplx predict(cplx x) const;
    cplx derivative(cplx x) const;
    static BohrSommerfeldRule from_quadratic(const NormalFormData& nf, double hbar);
    static BohrSommerfeldRule from_birkhoff(const BirkhoffResult& b, const ComplexQuadraticForm& Q, double hbar);
};

struct BohrSommerfeldResidual {
    int l = 0;
    cplx index_residual = 0.0;   // rule^{-1}(lambda_l) - l
    cplx energy_residual = 0.0;  // lambda_l - rule(l)
};

// eigenvalues taken in the given order as l = 0, 1, ...; Newton inversion
// throws InversionFailed when it does not converge.
std::vector<BohrSommerfeldResidual> bohr_sommerfeld_residuals(const std::vector<cplx>& eigenvalues,
                                                              const BohrSommerfeldRule& rule);

struct Well {
    cplx x0;
    QuantumNormalForm qnf;
    NormalFormData quadratic;
};

struct MatchedEigenvalue {
    cplx eigenvalue;
    int well = -1;
    int level = -1;
    cplx prediction;          // quantum normal form prediction
    cplx leading_prediction;  // quadratic lattice prediction
    double residual = 0.0;
    double leading_residual = 0.0;
};

struct DegeneratePair {
    int i = 0, j = 0;  // indices into MultiwellReport::matches
    double gap = 0.0;
    bool jordan_candidate = false;  // gap < 10 eps ||M||
    double departure_from_normality = 0.0;
};

struct MultiwellReport {
    double hbar = 0.0, window = 0.0;
    cplx center;
    int n_max = 0;
    std::vector<Well> wells;
    std::vector<MatchedEigenvalue> matches;
    std::vector<DegeneratePair> pairs;
    double max_residual = 0.0;
    double max_leading_residual = 0.0;
    double truncation_gap = 0.0;  // movement of window eigenvalues under n_max doubling
};

struct MultiwellOptions {
    int max_weight = 12;
    int n_max = 256;
    double window = -1.0;       // default 8 h max|d0|
    double pair_tolerance = -1.0;  // default 1e-6 h
};

// Wells must be critical points of the symbol at a common level.
MultiwellReport multiwell_compare(const MonomialSymbol& symbol, const std::vector<cplx>& wells, double hbar,
                                  const MultiwellOptions& opt = {});

}  // namespace bsl
