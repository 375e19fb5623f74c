#include "bsl/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <thread>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace bsl {

namespace {

void sort_by_modulus(std::vector<cplx>& v) {
    std::stable_sort(v.begin(), v.end(), [](cplx a, cplx b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma < mb;
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

// eigenvalues and optionally right eigenvectors
void zgeev(const MatrixXc& M, std::vector<cplx>& w, MatrixXc* V) {
    const lapack_int n = static_cast<lapack_int>(M.rows());
    MatrixXc A = M;
    w.assign(n, 0.0);
    MatrixXc vr;
    if (V) vr.resize(n, n);
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', V ? 'V' : 'N', n, A.data(), n, w.data(), nullptr, 1,
                                          V ? vr.data() : nullptr, n);
    if (info != 0) throw Error(ErrorKind::NoConvergence, "zgeev failed with info " + std::to_string(info));
    if (V) *V = vr;
}

double max_match_gap(const std::vector<cplx>& cur, const std::vector<cplx>& prev) {
    double gap = 0.0;
    for (cplx z : cur) {
        double best = std::numeric_limits<double>::infinity();
        for (cplx p : prev) best = std::min(best, std::abs(z - p));
        gap = std::max(gap, best);
    }
    return gap;
}

}  // namespace

std::vector<cplx> dense_eigenvalues(const MatrixXc& M) {
    std::vector<cplx> w;
    zgeev(M, w, nullptr);
    sort_by_modulus(w);
    return w;
}

SpectrumResult eigen_spectrum(const ToeplitzMatrix& M, int k_wanted) {
    if (k_wanted < 1) throw Error(ErrorKind::InvalidArgument, "k_wanted must be >= 1");
    SpectrumResult r;
    auto w = dense_eigenvalues(M.entries);
    w.resize(std::min<std::size_t>(w.size(), k_wanted));
    r.eigenvalues = w;
    r.n_max_used = M.dim();
    return r;
}

SpectrumResult eigen_spectrum(const MonomialSymbol& symbol, double hbar, int k_wanted, double tol, int n_start,
                              int n_cap, bool throw_on_failure) {
    if (k_wanted < 1) throw Error(ErrorKind::InvalidArgument, "k_wanted must be >= 1");
    int n = std::max(n_start, 4 * k_wanted);
    std::vector<cplx> prev = dense_eigenvalues(assemble_toeplitz(symbol, PlanckParameter(hbar), BasisTruncation{n}).entries);
    prev.resize(std::min<std::size_t>(prev.size(), k_wanted + 2));
    SpectrumResult r;
    while (true) {
        const int next = 2 * n;
        if (next > n_cap) {
            r.converged = false;
            r.n_max_used = n;
            prev.resize(std::min<std::size_t>(prev.size(), k_wanted));
            r.eigenvalues = prev;
            if (throw_on_failure)
                throw Error(ErrorKind::NoConvergence, "eigenvalues did not settle below n_max cap " + std::to_string(n_cap));
            return r;
        }
        auto cur = dense_eigenvalues(assemble_toeplitz(symbol, PlanckParameter(hbar), BasisTruncation{next}).entries);
        cur.resize(std::min<std::size_t>(cur.size(), k_wanted + 2));
        std::vector<cplx> head(cur.begin(), cur.begin() + std::min<std::size_t>(cur.size(), k_wanted));
        const double gap = max_match_gap(head, prev);
        n = next;
        if (gap < tol) {
            r.eigenvalues = head;
            r.n_max_used = n;
            r.convergence_gap = gap;
            r.converged = true;
            return r;
        }
        r.convergence_gap = gap;
        prev = cur;
    }
}

// ---------------------------------------------------------------- resolvent grid

cplx PseudospectrumField::lambda(int ix, int iy) const {
    const double dx = nx > 1 ? (rect.x1 - rect.x0) / (nx - 1) : 0.0;
    const double dy = ny > 1 ? (rect.y1 - rect.y0) / (ny - 1) : 0.0;
    return {rect.x0 + ix * dx, rect.y0 + iy * dy};
}

std::optional<std::pair<int, int>> PseudospectrumField::cell_of(cplx z) const {
    const double dx = (rect.x1 - rect.x0) / (nx - 1), dy = (rect.y1 - rect.y0) / (ny - 1);
    const double fx = (z.real() - rect.x0) / dx, fy = (z.imag() - rect.y0) / dy;
    if (fx < -0.5 || fy < -0.5 || fx > nx - 0.5 || fy > ny - 0.5) return std::nullopt;
    return std::make_pair(std::clamp(static_cast<int>(std::lround(fx)), 0, nx - 1),
                          std::clamp(static_cast<int>(std::lround(fy)), 0, ny - 1));
}

namespace {

double sigma_dense(const MatrixXc& M, cplx lambda) {
    const lapack_int n = static_cast<lapack_int>(M.rows());
    MatrixXc A = M;
    A.diagonal().array() -= lambda;
    std::vector<double> s(n);
    const lapack_int info =
        LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', n, n, A.data(), n, s.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw Error(ErrorKind::NoConvergence, "zgesdd failed");
    return s[n - 1];
}

// Banded LU of M - lambda plus inverse iteration on (A^* A)^{-1}.
struct BandedSolver {
    int n, kl, ku, ldab;
    std::vector<cplx> ab;
    std::vector<lapack_int> ipiv;
    const MatrixXc* M;

    BandedSolver(const ToeplitzMatrix& T) : n(T.dim()), kl(T.lower_bandwidth), ku(T.upper_bandwidth), M(&T.entries) {
        ldab = 2 * kl + ku + 1;
        ab.resize(static_cast<std::size_t>(ldab) * n);
        ipiv.resize(n);
    }

    // returns false if exactly singular
    bool factor(cplx lambda) {
        std::fill(ab.begin(), ab.end(), cplx(0.0));
        for (int j = 0; j < n; ++j)
            for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i) {
                cplx v = (*M)(i, j);
                if (i == j) v -= lambda;
                ab[static_cast<std::size_t>(j) * ldab + kl + ku + i - j] = v;
            }
        const lapack_int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab.data(), ldab, ipiv.data());
        if (info < 0) throw Error(ErrorKind::InvalidArgument, "zgbtrf argument error");
        return info == 0;
    }

    void solve(char trans, VectorXc& x) {
        LAPACKE_zgbtrs(LAPACK_COL_MAJOR, trans, n, kl, ku, 1, ab.data(), ldab, ipiv.data(), x.data(), n);
    }

    // Lanczos with full reorthogonalisation on (A^* A)^{-1}; the largest Ritz
    // value is 1/sigma_min^2
    double sigma_min(cplx lambda) {
        if (!factor(lambda)) return 0.0;
        const int m_max = std::min(n, 80);
        std::mt19937_64 rng(0x5eed);
        std::normal_distribution<double> N;
        MatrixXc Qb(n, m_max + 1);
        VectorXc q(n);
        for (int i = 0; i < n; ++i) q[i] = cplx(N(rng), N(rng));
        Qb.col(0) = q.normalized();
        std::vector<double> alpha, beta;
        double prev = 0.0;
        for (int k = 0; k < m_max; ++k) {
            VectorXc w = Qb.col(k);
            solve('N', w);
            solve('C', w);
            if (!w.allFinite()) return 0.0;
            const double a = Qb.col(k).dot(w).real();
            alpha.push_back(a);
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i <= k; ++i) w -= Qb.col(i).dot(w) * Qb.col(i);
            const double b = w.norm();
            Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), k + 1);
            Eigen::VectorXd e = Eigen::Map<Eigen::VectorXd>(beta.data(), k);
            double theta = d[0];
            if (k > 0) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
                es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
                theta = es.eigenvalues()[k];
            }
            if (!(theta > 0.0)) return 0.0;
            if (b <= 1e-14 * theta || (k >= 2 && std::abs(theta - prev) <= 1e-14 * theta)) {
                prev = theta;
                break;
            }
            prev = theta;
            beta.push_back(b);
            Qb.col(k + 1) = w / b;
        }
        return 1.0 / std::sqrt(prev);
    }
};

bool prefer_banded(const ToeplitzMatrix& M) {
    return 2 * (M.lower_bandwidth + M.upper_bandwidth) + 1 < M.dim() / 4;
}

}  // namespace

double smallest_singular_value(const ToeplitzMatrix& M, cplx lambda, SigmaMethod method) {
    if (method == SigmaMethod::Auto) method = prefer_banded(M) ? SigmaMethod::Banded : SigmaMethod::Dense;
    if (method == SigmaMethod::Dense) return sigma_dense(M.entries, lambda);
    BandedSolver s(M);
    return s.sigma_min(lambda);
}

PseudospectrumField resolvent_grid(const ToeplitzMatrix& M, const GridRect& rect, int nx, int ny,
                                   SigmaMethod method) {
    if (nx < 2 || ny < 2) throw Error(ErrorKind::InvalidArgument, "resolution must be >= 2 per axis");
    if (!(rect.x1 > rect.x0) || !(rect.y1 > rect.y0)) throw Error(ErrorKind::InvalidArgument, "empty rectangle");
    PseudospectrumField f;
    f.rect = rect;
    f.nx = nx;
    f.ny = ny;
    f.sigma_min.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    if (method == SigmaMethod::Auto) method = prefer_banded(M) ? SigmaMethod::Banded : SigmaMethod::Dense;
    std::atomic<int> next{0};
    const int total = nx * ny;
    auto worker = [&]() {
        std::optional<BandedSolver> solver;
        if (method == SigmaMethod::Banded) solver.emplace(M);
        for (int p = next++; p < total; p = next++) {
            const cplx lam = f.lambda(p % nx, p / nx);
            f.sigma_min[p] = solver ? solver->sigma_min(lam) : sigma_dense(M.entries, lam);
        }
    };
    const unsigned nt = std::max(1u, std::min<unsigned>(worker_count(), static_cast<unsigned>(total)));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return f;
}

// ---------------------------------------------------------------- c-analytic pseudospectrum

bool PseudospectrumMask::isolating() const {
    if (components == 0 || eigenvalues_outside_mask > 0) return false;
    return std::all_of(eigen_count.begin(), eigen_count.end(), [](int c) { return c == 1; });
}

PseudospectrumMask analytic_pseudospectrum(const PseudospectrumField& field, double c, double hbar,
                                           const std::vector<cplx>& eigenvalues) {
    PseudospectrumMask m;
    m.c = c;
    m.hbar = hbar;
    m.threshold = std::exp(-c / hbar);
    const int nx = field.nx, ny = field.ny, N = nx * ny;
    m.mask.assign(N, 0);
    m.label.assign(N, -1);
    for (int p = 0; p < N; ++p) m.mask[p] = field.sigma_min[p] <= m.threshold ? 1 : 0;
    std::vector<int> stack;
    for (int p = 0; p < N; ++p) {
        if (!m.mask[p] || m.label[p] >= 0) continue;
        const int id = m.components++;
        int size = 0;
        stack.push_back(p);
        m.label[p] = id;
        while (!stack.empty()) {
            const int q = stack.back();
            stack.pop_back();
            ++size;
            const int ix = q % nx, iy = q / nx;
            const int nb[4][2] = {{ix - 1, iy}, {ix + 1, iy}, {ix, iy - 1}, {ix, iy + 1}};
            for (const auto& b : nb) {
                if (b[0] < 0 || b[0] >= nx || b[1] < 0 || b[1] >= ny) continue;
                const int r = b[1] * nx + b[0];
                if (m.mask[r] && m.label[r] < 0) {
                    m.label[r] = id;
                    stack.push_back(r);
                }
            }
        }
        m.component_size.push_back(size);
    }
    m.eigen_count.assign(m.components, 0);
    for (cplx z : eigenvalues) {
        const auto cell = field.cell_of(z);
        if (!cell) continue;
        ++m.eigenvalues_in_window;
        const int lab = m.label[cell->second * nx + cell->first];
        if (lab < 0)
            ++m.eigenvalues_outside_mask;
        else
            ++m.eigen_count[lab];
    }
    return m;
}

CScanResult scan_isolating_c(const PseudospectrumField& field, double hbar, const std::vector<cplx>& eigenvalues,
                             double c_min, double c_max, int steps) {
    if (steps < 1 || !(c_max >= c_min)) throw Error(ErrorKind::InvalidArgument, "bad c scan range");
    CScanResult s;
    for (int i = 0; i <= steps; ++i) {
        const double c = c_min + (c_max - c_min) * i / steps;
        const auto m = analytic_pseudospectrum(field, c, hbar, eigenvalues);
        s.c_values.push_back(c);
        s.components.push_back(m.components);
        const bool iso = m.isolating();
        s.isolating.push_back(iso);
        if (iso) {
            if (!s.found) s.c_lo = c;
            s.c_hi = c;
            s.found = true;
        }
    }
    return s;
}

// ---------------------------------------------------------------- action

cplx action_integral_loop(const std::function<std::array<cplx, 2>(double)>& loop, double tol) {
    const auto a = loop(0.0), b = loop(1.0);
    if (std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) > 1e-12)
        throw Error(ErrorKind::NonClosedContour, "loop endpoints differ");
    // -i sum (vbar_i + vbar_{i+1})/2 (x_{i+1} - x_i): second order, so
    // successive doublings are Richardson-extrapolated
    auto secant = [&](int n) {
        cplx s = 0.0;
        auto prev = loop(0.0);
        for (int i = 1; i <= n; ++i) {
            const auto cur = loop(static_cast<double>(i) / n);
            s += 0.5 * (prev[1] + cur[1]) * (cur[0] - prev[0]);
            prev = cur;
        }
        return -kI * s;
    };
    int n = 64;
    cplx coarse = secant(n), prev_rich = coarse;
    for (int it = 0; it < 16; ++it) {
        n *= 2;
        const cplx fine = secant(n);
        const cplx rich = (4.0 * fine - coarse) / 3.0;
        if (it > 0 && std::abs(rich - prev_rich) <= tol * std::max(1.0, std::abs(rich))) return rich;
        prev_rich = rich;
        coarse = fine;
    }
    throw Error(ErrorKind::QuadratureFailed, "action integral did not converge");
}

cplx action_integral(cplx d, cplx E, int winding) {
    if (d == cplx(0.0)) throw Error(ErrorKind::InvalidArgument, "d must be nonzero");
    if (E == cplx(0.0) || winding == 0) return 0.0;
    const cplx r = std::sqrt(E / d);
    auto trap = [&](int n) {
        cplx s = 0.0;
        const double T = 2.0 * kPi * winding;
        const double h = T / n;
        for (int i = 0; i < n; ++i) {
            const double t = i * h;
            const cplx x_dot = r * kI * std::exp(kI * t);
            const cplx vbar = r * std::exp(-kI * t);
            s += vbar * x_dot;
        }
        return -kI * s * h;
    };
    const double T = 2.0 * kPi * winding;
    const cplx x0 = r, x1 = r * std::exp(kI * T);
    if (std::abs(x0 - x1) > 1e-12 * std::max(1.0, std::abs(r)))
        throw Error(ErrorKind::NonClosedContour, "loop endpoints differ");
    int n = 16;
    cplx prev = trap(n);
    for (int it = 0; it < 20; ++it) {
        n *= 2;
        const cplx cur = trap(n);
        if (std::abs(cur - prev) <= 1e-10 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    throw Error(ErrorKind::QuadratureFailed, "action integral did not converge");
}

// ---------------------------------------------------------------- Bohr-Sommerfeld

cplx BohrSommerfeldRule::predict(cplx x) const {
    return level + series_eval(mu0, hbar * (c * (x + 0.5) + 0.5 * tr));
}

cplx BohrSommerfeldRule::derivative(cplx x) const {
    return series_eval(series_derivative(mu0), hbar * (c * (x + 0.5) + 0.5 * tr)) * hbar * c;
}

BohrSommerfeldRule BohrSommerfeldRule::from_quadratic(const NormalFormData& nf, double hbar) {
    BohrSommerfeldRule r;
    r.c = nf.harmonic_coefficient;
    r.tr = nf.form.tr();
    r.hbar = hbar;
    return r;
}

BohrSommerfeldRule BohrSommerfeldRule::from_birkhoff(const BirkhoffResult& b, const ComplexQuadraticForm& Q,
                                                     double hbar) {
    BohrSommerfeldRule r;
    r.mu0 = b.mu0;
    r.c = b.harmonic_coefficient;
    r.tr = Q.tr();
    r.hbar = hbar;
    return r;
}

std::vector<BohrSommerfeldResidual> bohr_sommerfeld_residuals(const std::vector<cplx>& eigenvalues,
                                                              const BohrSommerfeldRule& rule) {
    std::vector<BohrSommerfeldResidual> out;
    for (std::size_t l = 0; l < eigenvalues.size(); ++l) {
        const cplx lam = eigenvalues[l];
        cplx x = static_cast<double>(l);
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
            const cplx d = rule.derivative(x);
            if (std::abs(d) < 1e-300) break;
            const cplx step = (rule.predict(x) - lam) / d;
            x -= step;
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) break;
            if (std::abs(step) <= 1e-14 * (1.0 + std::abs(x))) {
                ok = true;
                break;
            }
        }
        if (!ok)
            throw Error(ErrorKind::InversionFailed,
                        "Newton inversion of the quantization rule failed at l = " + std::to_string(l));
        BohrSommerfeldResidual r;
        r.l = static_cast<int>(l);
        r.index_residual = x - static_cast<double>(l);
        r.energy_residual = lam - rule.predict(static_cast<double>(l));
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------- multiwell

MultiwellReport multiwell_compare(const MonomialSymbol& symbol, const std::vector<cplx>& wells, double hbar,
                                  const MultiwellOptions& opt) {
    if (wells.empty()) throw Error(ErrorKind::InvalidArgument, "no wells given");
    MultiwellReport rep;
    rep.hbar = hbar;
    rep.n_max = opt.n_max;
    double max_d0 = 0.0;
    for (cplx x0 : wells) {
        Well w;
        w.x0 = x0;
        w.qnf = quantum_normal_form(symbol, x0, opt.max_weight);
        TaylorTable2D t = translate(TaylorTable2D::from_symbol(symbol, std::max(2, symbol.degree())), x0, std::conj(x0));
        w.quadratic = reduce_quadratic(ComplexQuadraticForm::from_z_coefficients(t.at(2, 0), t.at(0, 2), t.at(1, 1)));
        max_d0 = std::max(max_d0, std::abs(w.quadratic.d0));
        rep.wells.push_back(w);
    }
    rep.center = rep.wells[0].qnf.level;
    for (const auto& w : rep.wells)
        if (std::abs(w.qnf.level - rep.center) > 1e-10 * std::max(1.0, std::abs(rep.center)))
            throw Error(ErrorKind::InvalidArgument, "wells are not at a common level");
    rep.window = opt.window > 0.0 ? opt.window : 8.0 * hbar * max_d0;
    const double pair_tol = opt.pair_tolerance > 0.0 ? opt.pair_tolerance : 1e-6 * hbar;

    const ToeplitzMatrix M = assemble_toeplitz(symbol, PlanckParameter(hbar), BasisTruncation{opt.n_max});
    std::vector<cplx> ev;
    MatrixXc V;
    zgeev(M.entries, ev, &V);
    std::vector<int> in_window;
    for (int i = 0; i < static_cast<int>(ev.size()); ++i)
        if (std::abs(ev[i] - rep.center) < rep.window) in_window.push_back(i);
    std::sort(in_window.begin(), in_window.end(), [&](int a, int b) {
        const double da = std::abs(ev[a] - rep.center), db = std::abs(ev[b] - rep.center);
        return da != db ? da < db : std::abs(ev[a]) < std::abs(ev[b]);
    });

    {
        const auto ev2 = dense_eigenvalues(
            assemble_toeplitz(symbol, PlanckParameter(hbar), BasisTruncation{2 * opt.n_max}).entries);
        std::vector<cplx> a, b;
        for (int i : in_window) a.push_back(ev[i]);
        for (cplx z : ev2)
            if (std::abs(z - rep.center) < 1.5 * rep.window) b.push_back(z);
        rep.truncation_gap = b.empty() ? std::numeric_limits<double>::infinity() : max_match_gap(a, b);
    }

    struct Pred {
        int well, level;
        cplx value, leading;
        double spacing;
    };
    std::vector<Pred> preds;
    for (int wi = 0; wi < static_cast<int>(rep.wells.size()); ++wi) {
        const auto& w = rep.wells[wi];
        const cplx c = w.quadratic.harmonic_coefficient, tr = w.quadratic.form.tr();
        const double spacing = std::abs(hbar * c);
        for (int l = 0; l < 10000; ++l) {
            const cplx lead = w.qnf.level + hbar * (c * (l + 0.5) + 0.5 * tr);
            if (std::abs(lead - rep.center) > 2.0 * rep.window + 2.0 * spacing) break;
            preds.push_back({wi, l, w.qnf.eigenvalue(l, hbar), lead, spacing});
        }
    }

    struct Cand {
        double dist;
        int e, p;
    };
    std::vector<Cand> cand;
    for (int e = 0; e < static_cast<int>(in_window.size()); ++e)
        for (int p = 0; p < static_cast<int>(preds.size()); ++p)
            cand.push_back({std::abs(ev[in_window[e]] - preds[p].value), e, p});
    std::stable_sort(cand.begin(), cand.end(), [&](const Cand& a, const Cand& b) {
        if (a.dist != b.dist) return a.dist < b.dist;
        return std::abs(ev[in_window[a.e]]) < std::abs(ev[in_window[b.e]]);
    });
    std::vector<int> e_match(in_window.size(), -1);
    std::vector<bool> p_used(preds.size(), false);
    for (const auto& c : cand) {
        if (e_match[c.e] >= 0 || p_used[c.p]) continue;
        e_match[c.e] = c.p;
        p_used[c.p] = true;
    }
    for (int e = 0; e < static_cast<int>(in_window.size()); ++e) {
        const cplx z = ev[in_window[e]];
        const int p = e_match[e];
        if (p < 0 || std::abs(z - preds[p].value) > 0.5 * preds[p].spacing)
            throw Error(ErrorKind::UnmatchedEigenvalue, "eigenvalue (" + std::to_string(z.real()) + "," +
                                                            std::to_string(z.imag()) + ") has no prediction");
        MatchedEigenvalue m;
        m.eigenvalue = z;
        m.well = preds[p].well;
        m.level = preds[p].level;
        m.prediction = preds[p].value;
        m.leading_prediction = preds[p].leading;
        m.residual = std::abs(z - m.prediction);
        m.leading_residual = std::abs(z - m.leading_prediction);
        rep.max_residual = std::max(rep.max_residual, m.residual);
        rep.max_leading_residual = std::max(rep.max_leading_residual, m.leading_residual);
        rep.matches.push_back(m);
    }

    double normM = 0.0;
    for (int i = 0; i < M.dim(); ++i) normM = std::max(normM, M.entries.row(i).cwiseAbs().sum());
    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 0; i < static_cast<int>(rep.matches.size()); ++i)
        for (int j = i + 1; j < static_cast<int>(rep.matches.size()); ++j) {
            const double gap = std::abs(rep.matches[i].eigenvalue - rep.matches[j].eigenvalue);
            if (gap >= pair_tol) continue;
            DegeneratePair dp;
            dp.i = i;
            dp.j = j;
            dp.gap = gap;
            dp.jordan_candidate = gap < 10.0 * eps * normM;
            // departure from normality of M restricted to span of the two eigenvectors
            MatrixXc B(M.dim(), 2);
            B.col(0) = V.col(in_window[i]);
            B.col(1) = V.col(in_window[j]);
            Eigen::JacobiSVD<MatrixXc> svd(B, Eigen::ComputeThinU);
            MatrixXc Q;
            if (svd.singularValues()(1) > 1e-8 * svd.singularValues()(0)) {
                Q = svd.matrixU();
            } else {
                // nearly parallel eigenvectors: add a generalized eigenvector
                MatrixXc S = M.entries;
                S.diagonal().array() -= rep.matches[i].eigenvalue;
                VectorXc g = S.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(B.col(0));
                B.col(1) = g;
                Eigen::HouseholderQR<MatrixXc> qr(B);
                Q = qr.householderQ() * MatrixXc::Identity(M.dim(), 2);
            }
            const MatrixXc R = Q.adjoint() * M.entries * Q;
            dp.departure_from_normality = (R.adjoint() * R - R * R.adjoint()).norm();
            rep.pairs.push_back(dp);
        }
    return rep;
}

}  // namespace bsl
