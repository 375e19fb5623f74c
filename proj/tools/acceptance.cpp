#include "acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

#include "bsl/bargmann.hpp"
#include "bsl/contour.hpp"
#include "bsl/quadratic.hpp"
#include "bsl/spectral.hpp"
#include "bsl/symbols.hpp"

namespace bsl::acceptance {

namespace {

using Rng = std::mt19937_64;

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

std::string sci(double v) { return fmt("%.2e", v); }

cplx randc(Rng& rng) {
    std::normal_distribution<double> N;
    const double re = N(rng);
    return {re, N(rng)};
}

// random symbol with terms of degree <= deg and order <= K, stored at (Ks, Ds)
FormalSymbol random_formal(Rng& rng, int deg, int K, int Ks, int Ds) {
    FormalSymbol f(Ks, Ds);
    std::bernoulli_distribution keep(0.6);
    for (int k = 0; k <= K; ++k)
        for (int a = 0; a <= deg; ++a)
            for (int b = 0; a + b <= deg; ++b)
                if (keep(rng)) f[k].set(a, b, randc(rng));
    return f;
}

ComplexQuadraticForm rotated(double theta) { return {1.0, std::exp(kI * theta), 0.0}; }

// ---------------------------------------------------------------- criteria

Criterion quadratic_spectrum() {
    Criterion c{1, "quadratic spectrum reproduction"};
    double worst = 0.0, slowest = 0.0;
    bool ok = true;
    for (double theta : {0.0, kPi / 4, 0.9 * kPi / 2})
        for (double h : {0.1, 0.05}) {
            const auto t0 = std::chrono::steady_clock::now();
            const ComplexQuadraticForm Q = rotated(theta);
            const auto sym = quadratic_pq_symbol(Q.a, Q.b, Q.c);
            const auto res = eigen_spectrum(sym, h, 5, 1e-10);
            const auto exact = exact_quadratic_spectrum(Q, h, 5);
            for (int k = 0; k < 5; ++k)
                worst = std::max(worst, std::abs(res.eigenvalues[k] - exact[k]) / std::abs(exact[k]));
            const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            slowest = std::max(slowest, dt);
            ok = ok && res.converged;
        }
    c.passed = ok && worst <= 1e-6 && slowest <= 60.0;
    c.detail = "max rel err " + sci(worst) + " over 6 cases, slowest case " + fmt("%.2f", slowest) + " s";
    return c;
}

Criterion harmonic_exactness() {
    Criterion c{2, "harmonic oscillator exactness"};
    double worst = 0.0, off = 0.0;
    for (double h : {0.1, 0.05, 1.0 / 3.0}) {
        const auto M = assemble_toeplitz(MonomialSymbol{{{1, 1}, 1.0}}, PlanckParameter(h), BasisTruncation{64});
        for (int l = 0; l < 64; ++l)
            for (int k = 0; k < 64; ++k) {
                if (l == k)
                    worst = std::max(worst, std::abs(M.entries(k, k) - h * (k + 1)) / (h * (k + 1)));
                else
                    off = std::max(off, std::abs(M.entries(l, k)));
            }
    }
    const double eps = std::numeric_limits<double>::epsilon();
    c.passed = off == 0.0 && worst <= 4 * eps;
    c.detail = "max rel diag err " + sci(worst) + ", max off-diagonal " + sci(off);
    return c;
}

Criterion product_arbitration() {
    Criterion c{3, "matrix/symbol product arbitration"};
    const int n = 48, D = 8, K = 4;
    double worst = 0.0;
    auto check = [&](const FormalSymbol& f, const FormalSymbol& g, double h) {
        const auto Mf = assemble_toeplitz(to_monomial_symbol(f, h), PlanckParameter(h), BasisTruncation{n}).entries;
        const auto Mg = assemble_toeplitz(to_monomial_symbol(g, h), PlanckParameter(h), BasisTruncation{n}).entries;
        const FormalSymbol fg = sharp_product(f, g, K);
        const auto Mfg = assemble_toeplitz(to_monomial_symbol(fg, h), PlanckParameter(h), BasisTruncation{n}).entries;
        const MatrixXc P = Mf * Mg;
        const int m = n - 2;
        const double scale = std::max(1.0, P.topLeftCorner(m, m).cwiseAbs().maxCoeff());
        worst = std::max(worst, (P - Mfg).topLeftCorner(m, m).cwiseAbs().maxCoeff() / scale);
        return !fg.truncated();
    };
    auto H = FormalSymbol::from_table(TaylorTable2D::monomial(D, 1, 1), K);
    auto Z = FormalSymbol::from_table(TaylorTable2D::monomial(D, 1, 0), K);
    auto Zb = FormalSymbol::from_table(TaylorTable2D::monomial(D, 0, 1), K);
    bool ok = true;
    for (double h : {0.1, 0.05}) {
        ok = check(H, H, h) && ok;
        ok = check(Z, Zb, h) && ok;
        ok = check(Zb, Z, h) && ok;
    }
    c.passed = ok && worst <= 1e-12;
    c.detail = "max rel entry err " + sci(worst) + " (|z|^2#|z|^2, z#zbar, zbar#z; h = 0.1, 0.05)";
    return c;
}

Criterion norm_inequalities(std::uint64_t seed) {
    Criterion c{4, "formal-norm product and bracket inequalities"};
    Rng rng(seed + 4);
    std::uniform_int_distribution<int> degd(0, 6), ordd(0, 3);
    const int Ks = 12, Ds = 12, S = 24;
    int prod_viol = 0, br_viol = 0, truncated = 0;
    double worst_prod = 0.0, worst_br = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const FormalSymbol f = random_formal(rng, degd(rng), ordd(rng), Ks, Ds);
        const FormalSymbol g = random_formal(rng, degd(rng), ordd(rng), Ks, Ds);
        const double rho = (trial % 2 == 0) ? 0.1 : 0.3;
        const FormalSymbol fg = sharp_product(f, g, Ks);
        const FormalSymbol br = sharp_commutator(f, g, Ks) + poisson_bracket(f, g, Ks).times_hbar() * kI;
        if (fg.truncated() || br.truncated()) ++truncated;
        const auto nf = formal_norm(f, rho, S), ng = formal_norm(g, rho, S);
        const auto nfg = formal_norm(fg, rho, S), nbr = formal_norm(br, rho, S);
        for (int s = 0; s <= S; ++s) {
            const double rhs = nf.upto(s) * ng.upto(s);
            if (nfg.upto(s) > rhs * (1 + 1e-12)) ++prod_viol;
            if (rhs > 0) worst_prod = std::max(worst_prod, nfg.upto(s) / rhs);
            // the order-1 terms cancel exactly; what survives below s = 4 is
            // round-off on the scale of the cancelled products
            const double floor = 64.0 * std::numeric_limits<double>::epsilon() * rhs;
            const double rb = 2.0 * nf.upto(s - 2) * ng.upto(s - 2);
            if (nbr.upto(s) > rb * (1 + 1e-12) + floor) ++br_viol;
            if (rb > 0) worst_br = std::max(worst_br, nbr.upto(s) / rb);
        }
    }
    c.passed = prod_viol == 0 && br_viol == 0 && truncated == 0;
    c.detail = "200 pairs: product violations " + std::to_string(prod_viol) + " (max ratio " + fmt("%.3f", worst_prod) +
               "), bracket violations " + std::to_string(br_viol) + " (max ratio " + fmt("%.3f", worst_br) + ")";
    return c;
}

Criterion theta_round_trip(std::uint64_t seed) {
    Criterion c{5, "theta-calculus round trip and averaging contraction"};
    Rng rng(seed + 5);
    std::uniform_int_distribution<int> degd(1, 10);
    const double eps = std::numeric_limits<double>::epsilon();
    double worst = 0.0;
    int contraction_viol = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int D = degd(rng);
        TaylorTable2D f(D);
        for (int a = 0; a <= D; ++a)
            for (int b = 0; a + b <= D; ++b)
                if (a != b) f.set(a, b, randc(rng));
        const TaylorTable2D g = theta_antiderivative(f);
        const TaylorTable2D back = g.d_theta();
        for (int a = 0; a <= D; ++a)
            for (int b = 0; a + b <= D; ++b)
                if (f.at(a, b) != cplx(0.0))
                    worst = std::max(worst, std::abs(back.at(a, b) - f.at(a, b)) / std::abs(f.at(a, b)));
        for (double rho : {0.1, 0.3, 1.0}) {
            const auto nf = formal_norm(f, rho), ng = formal_norm(g, rho);
            for (int s = 0; s <= D; ++s)
                if (ng.at(s) > nf.at(s) * (1 + 1e-14)) ++contraction_viol;
        }
    }
    c.passed = worst <= 4 * eps && contraction_viol == 0;
    c.detail = "100 tables: max rel round-trip err " + sci(worst) + ", contraction violations " +
               std::to_string(contraction_viol);
    return c;
}

Criterion moser_residual_check(std::uint64_t seed) {
    Criterion c{6, "Moser residual"};
    Rng rng(seed + 6);
    const int K = 3, D = 4 + 2 * (K + 1);
    double worst = 0.0, worst_r = 0.0;
    const FormalSymbol mu = FormalSymbol::from_table(TaylorTable2D::monomial(D, 1, 1), K + 1);
    for (int trial = 0; trial < 20; ++trial) {
        TaylorTable2D g(D);
        for (int a = 0; a <= 4; ++a)
            for (int b = 0; a + b <= 4; ++b) g.set(a, b, randc(rng));
        const auto res = moser_normal_form(mu, FormalSymbol::from_table(g, K + 1), K);
        const double scale = 1.0 + g.max_abs();
        for (int k = 0; k <= K; ++k)
            for (int a = 0; a <= 4; ++a)
                for (int b = 0; a + b <= 4; ++b)
                    worst = std::max(worst, std::abs(res.residual[k].at(a, b)) / scale);
        const auto avg = radial_average(g);
        for (int j = 0; 2 * j <= D; ++j) {
            const cplx want = j < static_cast<int>(avg.size()) ? avg[j] : cplx(0.0);
            worst_r = std::max(worst_r, std::abs(res.r[0].at(j, j) - want) / scale);
        }
    }
    c.passed = worst <= 1e-12 && worst_r <= 1e-13;
    c.detail = "20 random g: max residual " + sci(worst) + " (orders 0..3, degree <= 4), |r(1)_0 - avg g| " +
               sci(worst_r);
    return c;
}

TaylorTable2D exp_y_plus_ybar(int D) {
    TaylorTable2D F(D);
    for (int a = 0; a <= D; ++a)
        for (int b = 0; a + b <= D; ++b) F.set(a, b, std::exp(-std::lgamma(a + 1.0) - std::lgamma(b + 1.0)));
    return F;
}

Criterion gaussian_accuracy() {
    Criterion c{7, "Gaussian expansion exponential accuracy"};
    const TaylorTable2D F = exp_y_plus_ybar(40);
    std::vector<double> x, y;
    std::ostringstream errs;
    bool ok = true;
    for (double h : {0.4, 0.2, 0.1, 0.05}) {
        const auto ge = gaussian_expansion(F, h, 1.0, 0.5, 0.5);
        const cplx ref = gaussian_moment_quadrature([](cplx z) { return std::exp(2.0 * z.real()); }, h);
        ok = ok && std::abs(ref - std::exp(h)) <= 1e-12 * std::exp(h) && !ge.degree_too_low;
        const double err = std::abs(ge.value - ref);
        x.push_back(1.0 / h);
        y.push_back(std::log(err));
        errs << (errs.tellp() > 0 ? ", " : "") << sci(err);
    }
    const auto fit = fit_line(x, y);
    c.passed = ok && fit.slope < 0.0 && fit.r2 > 0.95;
    c.detail = "errors " + errs.str() + "; slope " + fmt("%.3f", fit.slope) + ", R^2 " + fmt("%.4f", fit.r2);
    return c;
}

Criterion contour_predicate(std::uint64_t seed) {
    Criterion c{8, "affine contour predicate"};
    auto one = [](cplx v) {
        MatrixXc m(1, 1);
        m(0, 0) = v;
        return m;
    };
    QuadraticPhase Q{one(1.0), VectorXc::Zero(1)};
    const auto real_axis = affine_contour_is_good({one(1.0), VectorXc::Zero(1)}, Q);
    const auto imag_axis = affine_contour_is_good({one(kI), VectorXc::Zero(1)}, Q);
    const auto tilted = affine_contour_is_good({one(std::exp(kI * kPi / 8.0)), VectorXc::Zero(1)}, Q);
    const bool examples = real_axis.good && real_axis.contraction == 0.0 && !imag_axis.good &&
                          std::isinf(imag_axis.contraction) && tilted.good &&
                          std::abs(tilted.contraction - std::tan(kPi / 8.0)) <= 1e-12;

    Rng rng(seed + 8);
    std::uniform_int_distribution<int> dimd(1, 3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int good_count = 0, sign_viol = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int d = dimd(rng);
        MatrixXc X(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) X(i, j) = randc(rng);
        MatrixXc H = X * X.transpose() + 0.5 * MatrixXc::Identity(d, d);
        VectorXc yc(d), w0(d);
        for (int i = 0; i < d; ++i) {
            yc[i] = randc(rng);
            w0[i] = U(rng);
        }
        // half the contours are built near the steepest-descent frame
        MatrixXc A(d, d);
        if (trial % 2 == 0) {
            Eigen::MatrixXd Mr(d, d), Nr(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    Mr(i, j) = U(rng) + (i == j ? 2.0 : 0.0);
                    Nr(i, j) = 0.3 * U(rng);
                }
            MatrixXc PA = Mr.cast<cplx>() + kI * Nr.cast<cplx>();
            A = complex_sym_sqrt(H).inverse() * PA;
        } else {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) A(i, j) = randc(rng);
        }
        const VectorXc b = yc - A * w0;
        QuadraticPhase F{H, yc, randc(rng)};
        const auto v = affine_contour_is_good({A, b}, F);
        if (!v.good) continue;
        ++good_count;
        // Re(F(Aw+b) - F(y_c)) < 0 away from y_c
        double worst = -std::numeric_limits<double>::infinity();
        for (int s = 0; s < 1000; ++s) {
            Eigen::VectorXd w(d);
            for (int i = 0; i < d; ++i) w[i] = 3.0 * U(rng);
            const VectorXc y = A * w.cast<cplx>() + b;
            const double dist = (y - yc).norm();
            if (dist < 0.1) continue;
            worst = std::max(worst, (F.evaluate(y) - F.value_at_critical).real() / (dist * dist));
        }
        if (!(worst < 0.0)) ++sign_viol;
    }
    c.passed = examples && sign_viol == 0 && good_count > 0;
    c.detail = std::string("worked examples ") + (examples ? "ok" : "FAILED") + " (tan(pi/8) err " +
               sci(std::abs(tilted.contraction - std::tan(kPi / 8.0))) + "); 50 random contours, " +
               std::to_string(good_count) + " good, sign violations " + std::to_string(sign_viol);
    return c;
}

Criterion matrix_sqrt(std::uint64_t seed) {
    Criterion c{9, "complex symmetric square root"};
    Rng rng(seed + 9);
    std::uniform_int_distribution<int> dimd(1, 4);
    double worst = 0.0, asym = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int d = dimd(rng);
        MatrixXc X(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) X(i, j) = randc(rng);
        const MatrixXc H = X + X.transpose();
        const MatrixXc P = complex_sym_sqrt(H);
        worst = std::max(worst, (P * P - H).norm() / H.norm());
        asym = std::max(asym, (P - P.transpose()).cwiseAbs().maxCoeff());
    }
    c.passed = worst <= 1e-12 && asym == 0.0;
    c.detail = "100 matrices: max ||P^2-H||/||H|| " + sci(worst) + ", max |P-P^T| " + sci(asym);
    return c;
}

Criterion pseudospectrum() {
    Criterion c{10, "pseudospectrum structure"};
    const auto t0 = std::chrono::steady_clock::now();
    const double theta = 0.9 * kPi / 2, h = 0.05;
    const auto sym = quadratic_pq_symbol(1.0, std::exp(kI * theta), 0.0);
    const auto M = assemble_toeplitz(sym, PlanckParameter(h), BasisTruncation{256});
    const auto field = resolvent_grid(M, {0.0, 0.4, -0.05, 0.35}, 200, 200);
    const auto ev = dense_eigenvalues(M.entries);
    const auto scan = scan_isolating_c(field, h, ev, 0.0, 1.0, 80);
    int n_in = 0;
    for (cplx z : ev)
        if (field.cell_of(z)) ++n_in;

    std::vector<double> x, y;
    const cplx lam = 0.3 * std::exp(kI * theta / 4.0);
    for (double hh : {0.2, 0.1, 0.05, 0.033}) {
        const auto Mh = assemble_toeplitz(sym, PlanckParameter(hh), BasisTruncation{256});
        x.push_back(1.0 / hh);
        y.push_back(std::log(smallest_singular_value(Mh, lam)));
    }
    const auto fit = fit_line(x, y);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.passed = scan.found && fit.slope < 0.0 && fit.r2 > 0.9 && dt <= 300.0;
    c.detail = (scan.found ? "isolating c in [" + fmt("%.4f", scan.c_lo) + ", " + fmt("%.4f", scan.c_hi) + "]"
                           : std::string("no isolating c")) +
               " with " + std::to_string(n_in) + " eigenvalues in window; interior slope " + fmt("%.3f", fit.slope) +
               ", R^2 " + fmt("%.4f", fit.r2) + "; " + fmt("%.1f", dt) + " s";
    return c;
}

Criterion action(std::uint64_t seed) {
    Criterion c{11, "action integral"};
    Rng rng(seed + 11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const cplx E(U(rng), U(rng));
        cplx d(U(rng), U(rng));
        if (std::abs(d) < 0.2) d += 0.5;
        for (int w : {1, 2}) {
            const cplx num = action_integral(d, E, w);
            worst = std::max(worst, std::abs(num - 2.0 * kPi * E * static_cast<double>(w) / d));
        }
    }

    // A o mu0 for f = |z|^2 + 0.1|z|^4: action of the level set {f = E} found
    // in the original coordinates, composed with mu0 from the normal form
    const int D = 6;
    TaylorTable2D f(D);
    f.set(1, 1, 1.0);
    f.set(2, 2, 0.1);
    const auto B = birkhoff_normal_form(f, D);
    const std::vector<double> svals{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08};
    Eigen::MatrixXcd V(svals.size(), 4);
    Eigen::VectorXcd A(svals.size());
    for (std::size_t i = 0; i < svals.size(); ++i) {
        const cplx E = series_eval(B.mu0, svals[i]);
        auto loop = [&](double t) -> std::array<cplx, 2> {
            const cplx u = std::exp(2.0 * kPi * kI * t);
            cplx r = std::sqrt(E);
            for (int it = 0; it < 60; ++it) {
                const cplx val = f.evaluate(r * u, r / u) - E;
                const cplx der = (f.evaluate((r + 1e-7) * u, (r + 1e-7) / u) - f.evaluate(r * u, r / u)) / 1e-7;
                const cplx step = val / der;
                r -= step;
                if (std::abs(step) < 1e-16) break;
            }
            return {r * u, r / u};
        };
        A[i] = action_integral_loop(loop, 1e-12);
        for (int j = 0; j < 4; ++j) V(i, j) = std::pow(svals[i], j);
    }
    const Eigen::VectorXcd coef = V.colPivHouseholderQr().solve(A);
    const cplx c1 = 2.0 * kPi / B.harmonic_coefficient;
    const double lin_err =
        std::max({std::abs(coef[0]), std::abs(coef[1] - c1), std::abs(coef[2]), std::abs(coef[3])});
    c.passed = worst <= 1e-8 && lin_err <= 1e-6;
    c.detail = "20 random (E,d), w in {1,2}: max err " + sci(worst) + "; A o mu0 coefficients vs 2 pi s/c: max err " +
               sci(lin_err);
    return c;
}

MonomialSymbol double_well(bool asymmetric) {
    const int D = 8;
    const cplx s(1.0, 0.3);
    TaylorTable2D g(D);
    g.set(2, 2, 1.0);
    g.set(2, 0, -1.0);
    g.set(0, 2, -1.0);
    g.set(0, 0, 1.0);
    if (asymmetric) {
        TaylorTable2D w(D);
        w.set(0, 0, 1.0);
        w.set(1, 0, 0.125);
        w.set(0, 1, 0.125);
        w.set(1, 1, 0.25);
        g = multiply(g, w);
    }
    return (g * s).to_symbol();
}

Criterion multiwell() {
    Criterion c{12, "multi-well matching"};
    const auto t0 = std::chrono::steady_clock::now();
    const double h = 0.02;
    bool ok = true;
    std::string detail;
    try {
        const auto sym = multiwell_compare(double_well(false), {1.0, -1.0}, h);
        const auto asym = multiwell_compare(double_well(true), {1.0, -1.0}, h);
        const bool paired = !sym.pairs.empty() && 2 * sym.pairs.size() == sym.matches.size();
        ok = sym.max_residual <= 1e-3 * h && asym.max_residual <= 1e-3 * h && paired && asym.pairs.empty() &&
             !sym.matches.empty() && !asym.matches.empty();
        detail = "symmetric: " + std::to_string(sym.matches.size()) + " matched, " + std::to_string(sym.pairs.size()) +
                 " near-degenerate pairs, max residual " + sci(sym.max_residual) + " (leading lattice " +
                 sci(sym.max_leading_residual) + "); asymmetric: " + std::to_string(asym.matches.size()) +
                 " matched, " + std::to_string(asym.pairs.size()) + " pairs, max residual " + sci(asym.max_residual) +
                 "; bound " + sci(1e-3 * h);
    } catch (const Error& e) {
        ok = false;
        detail = e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.passed = ok && dt <= 180.0;
    c.detail = detail + "; " + fmt("%.1f", dt) + " s";
    return c;
}

}  // namespace

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

std::string format_line(const Criterion& c) {
    char head[96];
    std::snprintf(head, sizeof(head), "%s %2d %s: ", c.passed ? "PASS" : "FAIL", c.id, c.name.c_str());
    return head + c.detail + " [" + fmt("%.2f", c.seconds) + " s]";
}

std::vector<Criterion> run_all(const Options& opt, std::ostream& os) {
    const std::vector<std::function<Criterion()>> all{
        [] { return quadratic_spectrum(); },
        [] { return harmonic_exactness(); },
        [] { return product_arbitration(); },
        [&] { return norm_inequalities(opt.seed); },
        [&] { return theta_round_trip(opt.seed); },
        [&] { return moser_residual_check(opt.seed); },
        [] { return gaussian_accuracy(); },
        [&] { return contour_predicate(opt.seed); },
        [&] { return matrix_sqrt(opt.seed); },
        [] { return pseudospectrum(); },
        [&] { return action(opt.seed); },
        [] { return multiwell(); },
    };
    std::vector<Criterion> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Criterion c;
        try {
            c = all[i]();
        } catch (const std::exception& e) {
            c.id = id;
            c.name = "criterion " + std::to_string(id);
            c.passed = false;
            c.detail = std::string("exception: ") + e.what();
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        os << format_line(c) << std::endl;
        out.push_back(c);
    }
    return out;
}

}  // namespace bsl::acceptance
