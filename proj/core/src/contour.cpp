#include "bsl/contour.hpp"

#include <algorithm>
#include <cmath>

namespace bsl {

cplx QuadraticPhase::evaluate(const VectorXc& y) const {
    VectorXc d = y - y_c;
    return value_at_critical - (d.transpose() * H * d)(0, 0);
}

cplx principal_sqrt(cplx x) {
    if (x.imag() == 0.0 && x.real() < 0.0) return cplx(0.0, std::sqrt(-x.real()));
    return std::sqrt(x);
}

MatrixXc complex_sym_sqrt(const MatrixXc& H) {
    const int d = static_cast<int>(H.rows());
    if (d == 0 || H.cols() != d) throw Error(ErrorKind::InvalidArgument, "square matrix required");
    const double nrm = H.norm();
    if ((H - H.transpose()).norm() > 1e-12 * std::max(nrm, 1.0))
        throw Error(ErrorKind::InvalidArgument, "matrix is not symmetric");
    Eigen::ComplexEigenSolver<MatrixXc> es(H, false);
    VectorXc ev = es.eigenvalues();
    for (int i = 0; i < d; ++i)
        if (std::abs(ev[i]) <= 1e-14 * nrm) throw Error(ErrorKind::SingularInput, "matrix is singular");

    // cluster nearly equal eigenvalues; each cluster becomes one confluent node
    std::vector<cplx> node;
    std::vector<int> mult;
    std::vector<bool> used(d, false);
    for (int i = 0; i < d; ++i) {
        if (used[i]) continue;
        cplx sum = ev[i];
        int m = 1;
        used[i] = true;
        for (int j = i + 1; j < d; ++j)
            if (!used[j] && std::abs(ev[j] - ev[i]) <= 1e-8 * nrm) {
                used[j] = true;
                sum += ev[j];
                ++m;
            }
        node.push_back(sum / static_cast<double>(m));
        mult.push_back(m);
    }
    // interpolation points with repetition, and derivatives of sqrt there
    std::vector<cplx> x;
    for (std::size_t c = 0; c < node.size(); ++c)
        for (int r = 0; r < mult[c]; ++r) x.push_back(node[c]);
    const int n = static_cast<int>(x.size());
    auto deriv = [](cplx t, int j) {
        // d^j/dt^j t^{1/2} / j!
        cplx coef = 1.0;
        for (int i = 0; i < j; ++i) coef *= (0.5 - i) / static_cast<double>(i + 1);
        return coef * principal_sqrt(t) / ipow(t, j);
    };
    // confluent divided differences
    std::vector<std::vector<cplx>> dd(n, std::vector<cplx>(n));
    for (int i = 0; i < n; ++i) dd[i][0] = principal_sqrt(x[i]);
    for (int k = 1; k < n; ++k)
        for (int i = 0; i + k < n; ++i) {
            if (x[i + k] == x[i])
                dd[i][k] = deriv(x[i], k);
            else
                dd[i][k] = (dd[i + 1][k - 1] - dd[i][k - 1]) / (x[i + k] - x[i]);
        }
    // Newton form evaluated at H by Horner
    MatrixXc I = MatrixXc::Identity(d, d);
    MatrixXc P = dd[0][n - 1] * I;
    for (int k = n - 2; k >= 0; --k) P = P * (H - x[k] * I) + dd[0][k] * I;
    P = 0.5 * (P + P.transpose()).eval();
    return P;
}

ContourVerdict affine_contour_is_good(const AffineContour& G, const QuadraticPhase& Q) {
    const int d = static_cast<int>(G.A.rows());
    if (G.A.cols() != d || G.b.size() != d || Q.H.rows() != d || Q.y_c.size() != d)
        throw Error(ErrorKind::InvalidArgument, "dimension mismatch");
    ContourVerdict v;
    const MatrixXc PA = complex_sym_sqrt(Q.H) * G.A;
    const Eigen::MatrixXd M = PA.real(), N = PA.imag();
    Eigen::JacobiSVD<Eigen::MatrixXd> svdM(M);
    const auto sM = svdM.singularValues();
    if (sM(d - 1) <= 1e-14 * std::max(sM(0), 1e-300)) {
        v.good = false;
        v.contraction = std::numeric_limits<double>::infinity();
    } else {
        const Eigen::MatrixXd NMinv = N * M.inverse();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(NMinv);
        v.contraction = svd.singularValues()(0);
    }
    // y_c = A w + b with real w
    Eigen::MatrixXd R(2 * d, d);
    R << G.A.real(), G.A.imag();
    const VectorXc rhs_c = Q.y_c - G.b;
    Eigen::VectorXd rhs(2 * d);
    rhs << rhs_c.real(), rhs_c.imag();
    Eigen::VectorXd w = R.colPivHouseholderQr().solve(rhs);
    const double resid = (R * w - rhs).norm();
    v.passes_through_critical = resid < 1e-10;
    if (v.passes_through_critical) v.w_critical = w;
    v.good = v.contraction < 1.0 && v.passes_through_critical;
    return v;
}

GaussianExpansion gaussian_expansion(const TaylorTable2D& F, double hbar, double rho, double eta, double delta) {
    if (!(hbar > 0.0)) throw Error(ErrorKind::InvalidArgument, "hbar must be positive");
    if (!(eta > 0.0 && eta < rho)) throw Error(ErrorKind::InvalidArgument, "need 0 < eta < rho");
    if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::InvalidArgument, "need 0 < delta < 1");
    GaussianExpansion g;
    const double m = std::min(rho - eta, eta);
    g.n_requested = std::max(1, static_cast<int>(std::ceil(delta * m / hbar)));
    const int available = F.degree() / 2 + 1;
    g.n_used = std::min(g.n_requested, available);
    g.degree_too_low = g.n_used < g.n_requested;
    // hbar^k/k! (d d')^k y^k ybar^k = hbar^k k!
    for (int k = 0; k < g.n_used; ++k)
        g.value += F.at(k, k) * std::exp(k * std::log(hbar) + std::lgamma(k + 1.0));
    const double N = g.n_requested;
    g.tail_bound = std::exp(2.0 * std::log(N) + std::lgamma(N + 1.0) + N * std::log(hbar / m));
    return g;
}

cplx gaussian_moment_quadrature(const std::function<cplx(cplx)>& F, double hbar) {
    return gaussian_integral(F, hbar, 1e-13, 2048).value;
}

cplx CriticalPointData::leading_value(double hbar) const { return std::exp(value / hbar) * hessian_factor; }

CriticalPointData critical_point_data(const TaylorTable2D& phi, double newton_tol) {
    const TaylorTable2D Fz = phi.d_z(), Fw = phi.d_zbar();
    const TaylorTable2D Fzz = Fz.d_z(), Fzw = Fz.d_zbar(), Fww = Fw.d_zbar();
    CriticalPointData out;
    cplx z = 0.0, w = 0.0;
    const int max_iter = 50;
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        const cplx gz = Fz.evaluate(z, w), gw = Fw.evaluate(z, w);
        const cplx a = Fzz.evaluate(z, w), b = Fzw.evaluate(z, w), c = Fww.evaluate(z, w);
        const cplx det = a * c - b * b;
        if (std::abs(det) < 1e-300) throw Error(ErrorKind::DegenerateHessian, "singular Hessian during Newton");
        const cplx dz = (c * gz - b * gw) / det, dw = (a * gw - b * gz) / det;
        z -= dz;
        w -= dw;
        out.iterations = it + 1;
        if (std::abs(dz) + std::abs(dw) <= newton_tol * (1.0 + std::abs(z) + std::abs(w)) &&
            std::abs(Fz.evaluate(z, w)) + std::abs(Fw.evaluate(z, w)) <= 1e3 * newton_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) throw Error(ErrorKind::NewtonDiverged, "Newton did not converge in 50 iterations");
    const cplx a = Fzz.evaluate(z, w), b = Fzw.evaluate(z, w), c = Fww.evaluate(z, w);
    const cplx det = a * c - b * b;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), 1e-300});
    if (std::abs(det) <= 1e-14 * scale * scale) throw Error(ErrorKind::DegenerateHessian, "degenerate Hessian");
    out.z_c = z;
    out.v_c = w;
    out.value = phi.evaluate(z, w);
    out.hessian_factor = 1.0 / std::sqrt(-det);
    return out;
}

}  // namespace bsl
