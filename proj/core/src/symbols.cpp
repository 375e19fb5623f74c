#include "bsl/symbols.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

#include "bsl/quadratic.hpp"

namespace bsl {

namespace {

double falling(int a, int j) {
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= (a - i);
    return r;
}

double factorial(int n) { return std::exp(std::lgamma(n + 1.0)); }

struct Entry {
    int a, b;
    cplx v;
};

std::vector<Entry> nonzeros(const TaylorTable2D& t) {
    std::vector<Entry> out;
    const int D = t.degree();
    for (int a = 0; a <= D; ++a)
        for (int b = 0; a + b <= D; ++b) {
            cplx v = t.at(a, b);
            if (v != cplx(0.0)) out.push_back({a, b, v});
        }
    return out;
}

}  // namespace

// ---------------------------------------------------------------- tables

TaylorTable2D::TaylorTable2D(int degree) : D_(degree) {
    if (degree < 0) throw Error(ErrorKind::InvalidArgument, "negative table degree");
    c_.assign(static_cast<std::size_t>(D_ + 1) * (D_ + 1), 0.0);
}

TaylorTable2D TaylorTable2D::constant(int degree, cplx c) {
    TaylorTable2D t(degree);
    t.set(0, 0, c);
    return t;
}

TaylorTable2D TaylorTable2D::monomial(int degree, int alpha, int beta, cplx c) {
    TaylorTable2D t(degree);
    t.set(alpha, beta, c);
    return t;
}

TaylorTable2D TaylorTable2D::from_symbol(const MonomialSymbol& s, int degree) {
    TaylorTable2D t(degree);
    for (const auto& [k, v] : s.terms()) {
        if (k.first + k.second > degree) {
            t.truncated_ = true;
            continue;
        }
        t.add(k.first, k.second, v);
    }
    return t;
}

TaylorTable2D TaylorTable2D::radial(const std::vector<cplx>& profile, int degree) {
    TaylorTable2D t(degree);
    for (std::size_t j = 0; j < profile.size(); ++j) {
        if (2 * static_cast<int>(j) > degree) {
            if (profile[j] != cplx(0.0)) t.truncated_ = true;
            continue;
        }
        t.set(static_cast<int>(j), static_cast<int>(j), profile[j]);
    }
    return t;
}

cplx TaylorTable2D::at(int alpha, int beta) const {
    if (alpha < 0 || beta < 0 || alpha + beta > D_) return 0.0;
    return c_[idx(alpha, beta)];
}

void TaylorTable2D::set(int alpha, int beta, cplx c) {
    if (alpha < 0 || beta < 0 || alpha + beta > D_)
        throw Error(ErrorKind::DegreeOverflow, "coefficient outside the table degree");
    c_[idx(alpha, beta)] = c;
}

void TaylorTable2D::add(int alpha, int beta, cplx c) {
    if (alpha < 0 || beta < 0 || alpha + beta > D_)
        throw Error(ErrorKind::DegreeOverflow, "coefficient outside the table degree");
    c_[idx(alpha, beta)] += c;
}

cplx TaylorTable2D::derivative(int alpha, int beta) const { return at(alpha, beta) * factorial(alpha) * factorial(beta); }

int TaylorTable2D::effective_degree() const {
    int d = -1;
    for (int a = 0; a <= D_; ++a)
        for (int b = 0; a + b <= D_; ++b)
            if (c_[idx(a, b)] != cplx(0.0)) d = std::max(d, a + b);
    return d;
}

double TaylorTable2D::max_abs() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
}

TaylorTable2D TaylorTable2D::resized(int degree) const {
    TaylorTable2D t(degree);
    t.truncated_ = truncated_;
    for (int a = 0; a <= D_; ++a)
        for (int b = 0; a + b <= D_; ++b) {
            cplx v = c_[idx(a, b)];
            if (v == cplx(0.0)) continue;
            if (a + b > degree)
                t.truncated_ = true;
            else
                t.set(a, b, v);
        }
    return t;
}

TaylorTable2D TaylorTable2D::homogeneous_part(int n) const {
    TaylorTable2D t(D_);
    for (int a = 0; a <= n; ++a) t.set(a, n - a, at(a, n - a));
    return t;
}

TaylorTable2D TaylorTable2D::d_z() const {
    TaylorTable2D t(D_);
    for (int a = 1; a <= D_; ++a)
        for (int b = 0; a + b <= D_; ++b) t.set(a - 1, b, static_cast<double>(a) * at(a, b));
    return t;
}

TaylorTable2D TaylorTable2D::d_zbar() const {
    TaylorTable2D t(D_);
    for (int a = 0; a <= D_; ++a)
        for (int b = 1; a + b <= D_; ++b) t.set(a, b - 1, static_cast<double>(b) * at(a, b));
    return t;
}

TaylorTable2D TaylorTable2D::d_theta() const {
    TaylorTable2D t(D_);
    for (int a = 0; a <= D_; ++a)
        for (int b = 0; a + b <= D_; ++b) t.set(a, b, kI * static_cast<double>(a - b) * at(a, b));
    return t;
}

cplx TaylorTable2D::evaluate(cplx z, cplx w) const {
    // Horner in w inside Horner in z
    cplx s = 0.0;
    for (int a = D_; a >= 0; --a) {
        cplx inner = 0.0;
        for (int b = D_ - a; b >= 0; --b) inner = inner * w + c_[idx(a, b)];
        s = s * z + inner;
    }
    return s;
}

MonomialSymbol TaylorTable2D::to_symbol(double drop_below) const {
    MonomialSymbol s;
    for (int a = 0; a <= D_; ++a)
        for (int b = 0; a + b <= D_; ++b) {
            cplx v = c_[idx(a, b)];
            if (std::abs(v) > drop_below) s.add(a, b, v);
        }
    return s;
}

TaylorTable2D TaylorTable2D::operator+(const TaylorTable2D& o) const {
    TaylorTable2D r = *this;
    r += o;
    return r;
}

TaylorTable2D TaylorTable2D::operator-(const TaylorTable2D& o) const {
    TaylorTable2D r = *this;
    r -= o;
    return r;
}

TaylorTable2D& TaylorTable2D::operator+=(const TaylorTable2D& o) {
    if (o.D_ > D_) *this = resized(o.D_);
    for (int a = 0; a <= o.D_; ++a)
        for (int b = 0; a + b <= o.D_; ++b) c_[idx(a, b)] += o.at(a, b);
    truncated_ = truncated_ || o.truncated_;
    return *this;
}

TaylorTable2D& TaylorTable2D::operator-=(const TaylorTable2D& o) { return *this += o * cplx(-1.0); }

TaylorTable2D TaylorTable2D::operator*(cplx s) const {
    TaylorTable2D r = *this;
    for (auto& v : r.c_) v *= s;
    return r;
}

TaylorTable2D multiply(const TaylorTable2D& f, const TaylorTable2D& g) {
    const int D = std::max(f.degree(), g.degree());
    TaylorTable2D out(D);
    if (f.truncated() || g.truncated()) out.mark_truncated();
    const auto F = nonzeros(f), G = nonzeros(g);
    for (const auto& x : F)
        for (const auto& y : G) {
            int a = x.a + y.a, b = x.b + y.b;
            if (a + b > D) {
                out.mark_truncated();
                continue;
            }
            out.add(a, b, x.v * y.v);
        }
    return out;
}

TaylorTable2D linear_substitute(const TaylorTable2D& f, const Mat2c& L) {
    const int D = f.degree();
    // powers of the two linear forms
    std::vector<TaylorTable2D> P(D + 1, TaylorTable2D(D)), Q(D + 1, TaylorTable2D(D));
    P[0].set(0, 0, 1.0);
    Q[0].set(0, 0, 1.0);
    TaylorTable2D l1(D), l2(D);
    if (D >= 1) {
        l1.set(1, 0, L[0][0]);
        l1.set(0, 1, L[0][1]);
        l2.set(1, 0, L[1][0]);
        l2.set(0, 1, L[1][1]);
    }
    for (int k = 1; k <= D; ++k) {
        P[k] = multiply(P[k - 1], l1);
        Q[k] = multiply(Q[k - 1], l2);
    }
    TaylorTable2D out(D);
    for (const auto& e : nonzeros(f)) out += multiply(P[e.a], Q[e.b]) * e.v;
    out.clear_truncated();
    if (f.truncated()) out.mark_truncated();
    return out;
}

TaylorTable2D translate(const TaylorTable2D& f, cplx z0, cplx w0) {
    const int D = f.degree();
    TaylorTable2D out(D);
    for (const auto& e : nonzeros(f)) {
        // (z + z0)^a (w + w0)^b
        for (int i = 0; i <= e.a; ++i) {
            double ci = std::exp(std::lgamma(e.a + 1.0) - std::lgamma(i + 1.0) - std::lgamma(e.a - i + 1.0));
            cplx zi = ci * ipow(z0, e.a - i);
            for (int j = 0; j <= e.b; ++j) {
                double cj = std::exp(std::lgamma(e.b + 1.0) - std::lgamma(j + 1.0) - std::lgamma(e.b - j + 1.0));
                out.add(i, j, e.v * zi * cj * ipow(w0, e.b - j));
            }
        }
    }
    if (f.truncated()) out.mark_truncated();
    return out;
}

// ---------------------------------------------------------------- formal symbols

FormalSymbol::FormalSymbol(int K, int D) : K_(K), D_(D), terms_(K + 1, TaylorTable2D(D)) {
    if (K < 0) throw Error(ErrorKind::InvalidArgument, "negative hbar order");
}

FormalSymbol FormalSymbol::from_table(const TaylorTable2D& t, int K) {
    FormalSymbol f(K, t.degree());
    f.terms_[0] = t;
    return f;
}

FormalSymbol FormalSymbol::constant(int K, int D, cplx c) {
    FormalSymbol f(K, D);
    f.terms_[0].set(0, 0, c);
    return f;
}

bool FormalSymbol::truncated() const {
    return std::any_of(terms_.begin(), terms_.end(), [](const TaylorTable2D& t) { return t.truncated(); });
}

void FormalSymbol::clear_truncated() {
    for (auto& t : terms_) t.clear_truncated();
}

double FormalSymbol::max_abs() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, t.max_abs());
    return m;
}

bool FormalSymbol::is_radial(double tol) const {
    for (const auto& t : terms_)
        for (int a = 0; a <= D_; ++a)
            for (int b = 0; a + b <= D_; ++b)
                if (a != b && std::abs(t.at(a, b)) > tol) return false;
    return true;
}

FormalSymbol FormalSymbol::reshaped(int K, int D) const {
    FormalSymbol f(K, D);
    for (int k = 0; k <= std::min(K, K_); ++k) f.terms_[k] = terms_[k].resized(D);
    for (int k = K + 1; k <= K_; ++k)
        if (!terms_[k].is_zero()) f.terms_[K].mark_truncated();
    return f;
}

FormalSymbol FormalSymbol::times_hbar() const {
    FormalSymbol f(K_, D_);
    for (int k = 0; k < K_; ++k) f.terms_[k + 1] = terms_[k];
    if (!terms_[K_].is_zero()) f.terms_[K_].mark_truncated();
    return f;
}

FormalSymbol FormalSymbol::div_hbar(double tol) const {
    if (terms_[0].max_abs() > tol)
        throw Error(ErrorKind::InvalidArgument, "order-0 term does not vanish, cannot divide by hbar");
    FormalSymbol f(K_, D_);
    for (int k = 1; k <= K_; ++k) f.terms_[k - 1] = terms_[k];
    return f;
}

FormalSymbol FormalSymbol::weight_truncated(int w) const {
    FormalSymbol f = *this;
    for (int k = 0; k <= K_; ++k)
        for (int a = 0; a <= D_; ++a)
            for (int b = 0; a + b <= D_; ++b)
                if (a + b + 2 * k > w && f.terms_[k].at(a, b) != cplx(0.0)) f.terms_[k].set(a, b, 0.0);
    return f;
}

FormalSymbol FormalSymbol::weight_part(int w) const {
    FormalSymbol f(K_, D_);
    for (int k = 0; k <= K_ && 2 * k <= w; ++k) {
        int d = w - 2 * k;
        if (d > D_) continue;
        for (int a = 0; a <= d; ++a) f.terms_[k].set(a, d - a, terms_[k].at(a, d - a));
    }
    return f;
}

FormalSymbol FormalSymbol::operator+(const FormalSymbol& o) const {
    FormalSymbol r = *this;
    r += o;
    return r;
}

FormalSymbol& FormalSymbol::operator+=(const FormalSymbol& o) {
    if (o.K_ > K_ || o.D_ > D_) *this = reshaped(std::max(K_, o.K_), std::max(D_, o.D_));
    for (int k = 0; k <= o.K_; ++k) terms_[k] += o.terms_[k];
    return *this;
}

FormalSymbol FormalSymbol::operator-(const FormalSymbol& o) const { return *this + o * cplx(-1.0); }

FormalSymbol FormalSymbol::operator*(cplx s) const {
    FormalSymbol r = *this;
    for (auto& t : r.terms_) t = t * s;
    return r;
}

cplx FormalSymbol::evaluate(cplx z, cplx w, double hbar) const {
    cplx s = 0.0, hk = 1.0;
    for (int k = 0; k <= K_; ++k, hk *= hbar) s += hk * terms_[k].evaluate(z, w);
    return s;
}

MonomialSymbol to_monomial_symbol(const FormalSymbol& a, double hbar) {
    MonomialSymbol s;
    double hk = 1.0;
    for (int k = 0; k <= a.order(); ++k, hk *= hbar)
        for (const auto& e : nonzeros(a[k])) s.add(e.a, e.b, hk * e.v);
    return s;
}

namespace {

// out_m += sum_j (-1)^j/j! d^j f_k dbar^j g_l over j + k + l = m, output
// weight (degree + 2 order) capped at weight_cap when >= 0
FormalSymbol sharp_product_capped(const FormalSymbol& f, const FormalSymbol& g, int K, int weight_cap) {
    const int D = std::max(f.degree(), g.degree());
    FormalSymbol out(K, D);
    std::vector<std::vector<Entry>> F(f.order() + 1), G(g.order() + 1);
    for (int k = 0; k <= f.order(); ++k) F[k] = nonzeros(f[k]);
    for (int l = 0; l <= g.order(); ++l) G[l] = nonzeros(g[l]);
    bool trunc = f.truncated() || g.truncated();
    for (int k = 0; k <= f.order(); ++k)
        for (int l = 0; l <= g.order(); ++l)
            for (const auto& x : F[k])
                for (const auto& y : G[l]) {
                    const int wsum = x.a + x.b + y.a + y.b + 2 * (k + l);
                    if (weight_cap >= 0 && wsum > weight_cap) continue;
                    const int jmax = std::min(x.a, y.b);
                    double sign_fact = 1.0;  // (-1)^j / j!
                    for (int j = 0; j <= jmax; ++j) {
                        if (j > 0) sign_fact *= -1.0 / j;
                        const int m = k + l + j;
                        const int a = x.a - j + y.a, b = x.b + y.b - j;
                        if (m > K || a + b > D) {
                            trunc = true;
                            continue;
                        }
                        out[m].add(a, b, sign_fact * falling(x.a, j) * falling(y.b, j) * x.v * y.v);
                    }
                }
    if (trunc) out[K].mark_truncated();
    return out;
}

}  // namespace

FormalSymbol sharp_product(const FormalSymbol& f, const FormalSymbol& g, int K) {
    return sharp_product_capped(f, g, K, -1);
}

FormalSymbol sharp_commutator(const FormalSymbol& f, const FormalSymbol& g, int K) {
    return sharp_product(f, g, K) - sharp_product(g, f, K);
}

FormalSymbol sharp_power_harmonic(int j, int K, int D) {
    FormalSymbol h = FormalSymbol::from_table(TaylorTable2D::monomial(D, 1, 1), K);
    FormalSymbol p = FormalSymbol::constant(K, D, 1.0);
    for (int i = 0; i < j; ++i) p = sharp_product(p, h, K);
    return p;
}

// ---------------------------------------------------------------- norms

double FormalNormReport::at(int s) const {
    if (s < 0 || s >= static_cast<int>(per_order.size())) return 0.0;
    return per_order[s];
}

double FormalNormReport::upto(int s) const {
    if (s < 0 || cumulative.empty()) return 0.0;
    if (s >= static_cast<int>(cumulative.size())) return cumulative.back();
    return cumulative[s];
}

FormalNormReport formal_norm(const FormalSymbol& a, double rho, int s_max) {
    if (!(rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "rho must be positive");
    if (s_max < 0) s_max = 2 * a.order() + a.degree();
    FormalNormReport rep;
    rep.rho = rho;
    rep.per_order.assign(s_max + 1, 0.0);
    for (int k = 0; k <= a.order(); ++k)
        for (const auto& e : nonzeros(a[k])) {
            const int s = 2 * k + e.a + e.b;
            if (s > s_max) continue;
            // 2 2^{-k} k!/((k+a)!(k+b)!) times the raw derivative a! b! t
            const double lc = std::log(2.0) - k * std::log(2.0) + std::lgamma(k + 1.0) + std::lgamma(e.a + 1.0) +
                              std::lgamma(e.b + 1.0) - std::lgamma(k + e.a + 1.0) - std::lgamma(k + e.b + 1.0);
            rep.per_order[s] += std::exp(lc) * std::abs(e.v);
        }
    rep.cumulative.resize(s_max + 1);
    double acc = 0.0;
    for (int s = 0; s <= s_max; ++s) {
        rep.per_order[s] *= std::pow(rho, s);
        acc += rep.per_order[s];
        rep.cumulative[s] = acc;
    }
    return rep;
}

FormalNormReport formal_norm(const TaylorTable2D& a, double rho, int s_max) {
    return formal_norm(FormalSymbol::from_table(a, 0), rho, s_max);
}

// ---------------------------------------------------------------- brackets, averages

TaylorTable2D poisson_bracket(const TaylorTable2D& f, const TaylorTable2D& g) {
    TaylorTable2D r = multiply(g.d_z(), f.d_zbar()) - multiply(g.d_zbar(), f.d_z());
    return r * kI;
}

FormalSymbol poisson_bracket(const FormalSymbol& f, const FormalSymbol& g, int K) {
    FormalSymbol out(K, std::max(f.degree(), g.degree()));
    for (int k = 0; k <= f.order(); ++k)
        for (int l = 0; l <= g.order(); ++l) {
            if (k + l > K) {
                if (!f[k].is_zero() && !g[l].is_zero()) out[K].mark_truncated();
                continue;
            }
            out[k + l] += poisson_bracket(f[k], g[l]);
        }
    return out;
}

TaylorTable2D theta_antiderivative(const TaylorTable2D& f, double tol) {
    const int D = f.degree();
    TaylorTable2D g(D);
    for (int a = 0; a <= D; ++a)
        for (int b = 0; a + b <= D; ++b) {
            cplx v = f.at(a, b);
            if (a == b) {
                if (std::abs(v) > tol)
                    throw Error(ErrorKind::NonzeroAverage,
                                "diagonal coefficient (" + std::to_string(a) + "," + std::to_string(b) + ") is nonzero");
                continue;
            }
            g.set(a, b, v / (kI * static_cast<double>(a - b)));
        }
    if (f.truncated()) g.mark_truncated();
    return g;
}

std::vector<cplx> radial_average(const TaylorTable2D& f) {
    std::vector<cplx> p(f.degree() / 2 + 1);
    for (std::size_t j = 0; j < p.size(); ++j) p[j] = f.at(static_cast<int>(j), static_cast<int>(j));
    return p;
}

std::vector<cplx> series_reciprocal(const std::vector<cplx>& p, int n) {
    if (p.empty() || p[0] == cplx(0.0)) throw Error(ErrorKind::InvalidArgument, "series has no reciprocal");
    std::vector<cplx> q(n, 0.0);
    for (int m = 0; m < n; ++m) {
        cplx s = (m == 0) ? cplx(1.0) : cplx(0.0);
        for (int i = 1; i <= m && i < static_cast<int>(p.size()); ++i) s -= p[i] * q[m - i];
        q[m] = s / p[0];
    }
    return q;
}

std::vector<cplx> series_derivative(const std::vector<cplx>& p) {
    if (p.size() <= 1) return {0.0};
    std::vector<cplx> d(p.size() - 1);
    for (std::size_t j = 1; j < p.size(); ++j) d[j - 1] = static_cast<double>(j) * p[j];
    return d;
}

cplx series_eval(const std::vector<cplx>& p, cplx s) {
    cplx r = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * s + *it;
    return r;
}

CohomologySolution cohomology_solve(const TaylorTable2D& g, const std::vector<cplx>& mu_prime) {
    if (mu_prime.empty() || std::abs(mu_prime[0] - 1.0) > 1e-12)
        throw Error(ErrorKind::InvalidArgument, "mu'(0) must equal 1");
    const int D = g.degree();
    CohomologySolution sol;
    sol.r = radial_average(g);
    TaylorTable2D h = g - TaylorTable2D::radial(sol.r, D);
    const auto inv = series_reciprocal(mu_prime, D / 2 + 1);
    TaylorTable2D q = multiply(h, TaylorTable2D::radial(inv, D));
    for (int j = 0; 2 * j <= D; ++j) q.set(j, j, 0.0);
    sol.b = theta_antiderivative(q);
    return sol;
}

FormalSymbol sharp_inverse(const FormalSymbol& one_plus_a) {
    const int K = one_plus_a.order(), D = one_plus_a.degree();
    FormalSymbol a = one_plus_a - FormalSymbol::constant(K, D, 1.0);
    if (a[0].max_abs() != 0.0)
        throw Error(ErrorKind::InvalidArgument, "sharp_inverse requires a of hbar-order >= 1");
    FormalSymbol astar(K, D);
    for (int k = 1; k <= K; ++k) {
        FormalSymbol p = sharp_product(a, astar, K);
        astar[k] = (a[k] + p[k]) * cplx(-1.0);
    }
    return FormalSymbol::constant(K, D, 1.0) + astar;
}

// ---------------------------------------------------------------- Moser

namespace {

struct Collocation {
    std::vector<double> t;
    std::vector<std::vector<double>> S;  // S[i][j] = int_0^{t_i} l_j
    std::vector<double> w1;              // int_0^1 l_j
};

Collocation make_collocation(int m) {
    Collocation c;
    c.t.resize(m);
    for (int i = 0; i < m; ++i) c.t[i] = 0.5 * (1.0 - std::cos(kPi * (i + 0.5) / m));
    std::vector<double> bw(m, 1.0);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
            if (k != j) bw[j] /= (c.t[j] - c.t[k]);
    auto lagrange = [&](int j, double s) {
        double p = bw[j];
        for (int k = 0; k < m; ++k)
            if (k != j) p *= (s - c.t[k]);
        return p;
    };
    using GL = boost::math::quadrature::gauss<double, 40>;
    c.S.assign(m, std::vector<double>(m));
    c.w1.resize(m);
    for (int j = 0; j < m; ++j) {
        auto lj = [&](double s) { return lagrange(j, s); };
        for (int i = 0; i < m; ++i) c.S[i][j] = GL::integrate(lj, 0.0, c.t[i]);
        c.w1[j] = GL::integrate(lj, 0.0, 1.0);
    }
    return c;
}

FormalSymbol capped_product(const FormalSymbol& f, const FormalSymbol& g, int K, int cap) {
    return sharp_product_capped(f, g, K, cap).weight_truncated(cap);
}

FormalSymbol capped_commutator(const FormalSymbol& f, const FormalSymbol& g, int K, int cap) {
    return capped_product(f, g, K, cap) - capped_product(g, f, K, cap);
}

FormalSymbol capped_inverse_tail(const FormalSymbol& a, int kmax, int cap) {
    const int K = a.order(), D = a.degree();
    FormalSymbol astar(K, D);
    for (int k = 1; k <= std::min(kmax, K); ++k) {
        FormalSymbol p = capped_product(a, astar, K, cap);
        astar[k] = (a[k] + p[k]) * cplx(-1.0);
    }
    return astar;
}

}  // namespace

FormalSymbol moser_residual(const FormalSymbol& mu, const FormalSymbol& g, const FormalSymbol& a, const FormalSymbol& r,
                            int K) {
    const int D = std::max({mu.degree(), g.degree(), a.degree(), r.degree()});
    FormalSymbol one_a = FormalSymbol::constant(K, D, 1.0) + a.reshaped(K, D);
    FormalSymbol lhs = mu.reshaped(K, D) + g.reshaped(K, D).times_hbar().times_hbar();
    FormalSymbol rhs = mu.reshaped(K, D) + r.reshaped(K, D).times_hbar().times_hbar();
    return capped_product(lhs, one_a, K, D) - capped_product(one_a, rhs, K, D);
}

MoserResult moser_normal_form(const FormalSymbol& mu, const FormalSymbol& g, int K, int t_nodes) {
    if (K < 0) throw Error(ErrorKind::InvalidArgument, "K must be >= 0");
    if (!mu.is_radial()) throw Error(ErrorKind::InvalidArgument, "mu must be radial");
    const int D = std::max(mu.degree(), g.degree());
    int gdeg = 0;
    for (int k = 0; k <= g.order(); ++k)
        if (!g[k].is_zero()) gdeg = std::max(gdeg, g[k].effective_degree() + 2 * k);
    if (gdeg + 2 * (K + 1) > D)
        throw Error(ErrorKind::DegreeOverflow, "degree budget " + std::to_string(D) + " cannot hold weight " +
                                                   std::to_string(gdeg + 2 * (K + 1)));
    const int cap = D;
    const int Ks = D / 2 + 2;
    const auto mu0 = radial_average(mu[0]);
    if (mu0.size() < 2 || std::abs(mu0[1] - 1.0) > 1e-12 || std::abs(mu0[0]) > 1e-12)
        throw Error(ErrorKind::InvalidArgument, "mu must be s + O(s^2) at order 0");
    const auto mu0p = series_derivative(mu0);

    const FormalSymbol MU = mu.reshaped(Ks, D);
    const FormalSymbol G = g.reshaped(Ks, D);
    const FormalSymbol ONE = FormalSymbol::constant(Ks, D, 1.0);

    if (t_nodes <= 0) t_nodes = 2 * K + 6;
    const Collocation col = make_collocation(t_nodes);
    const int m = t_nodes;
    std::vector<FormalSymbol> a(m, FormalSymbol(Ks, D)), b(m, FormalSymbol(Ks, D)), rdot(m, FormalSymbol(Ks, D));

    for (int k = 0; k <= K; ++k) {
        if (k >= 1) {
            std::vector<TaylorTable2D> integrand(m);
            for (int i = 0; i < m; ++i) integrand[i] = capped_product(b[i], ONE + a[i], Ks, cap)[k - 1];
            for (int i = 0; i < m; ++i) {
                TaylorTable2D acc(D);
                for (int j = 0; j < m; ++j) acc += integrand[j] * cplx(col.S[i][j]);
                a[i][k] = acc * kI;
            }
        }
        if (k == K) break;  // a_K is needed for the residual, b_K and rdot_K are not
        for (int i = 0; i < m; ++i) {
            const double t = col.t[i];
            const FormalSymbol astar = capped_inverse_tail(a[i], k, cap);
            // (R - rdot)_k with rdot_k still zero
            FormalSymbol ar = capped_product(a[i], rdot[i], Ks, cap);
            FormalSymbol R = ar + capped_product(rdot[i], astar, Ks, cap) + capped_product(ar, astar, Ks, cap);
            // i hbar^{-1} [mu, b] with b_k still zero: take order k+1 of the commutator
            FormalSymbol L = capped_commutator(MU, b[i], Ks, cap);
            // i t hbar [g, b]: order k-1 of the commutator
            TaylorTable2D T(D);
            if (k >= 1) T = capped_commutator(G, b[i], Ks, cap)[k - 1] * (kI * t);
            TaylorTable2D F = (G[k] + L[k + 1] * kI + T - R[k]) * cplx(-1.0);
            CohomologySolution sol = cohomology_solve(F, mu0p);
            b[i][k] = sol.b;
            rdot[i][k] = TaylorTable2D::radial(sol.r, D) * cplx(-1.0);
        }
    }

    MoserResult res;
    res.a = FormalSymbol(K, D);
    res.r = FormalSymbol(K, D);
    for (int k = 1; k <= K; ++k) {
        std::vector<TaylorTable2D> integrand(m);
        for (int i = 0; i < m; ++i) integrand[i] = capped_product(b[i], ONE + a[i], Ks, cap)[k - 1];
        TaylorTable2D acc(D);
        for (int j = 0; j < m; ++j) acc += integrand[j] * cplx(col.w1[j]);
        res.a[k] = acc * kI;
    }
    for (int k = 0; k < K; ++k) {
        TaylorTable2D acc(D);
        for (int j = 0; j < m; ++j) acc += rdot[j][k] * cplx(col.w1[j]);
        res.r[k] = acc;
    }
    res.residual = moser_residual(mu, g, res.a, res.r, K + 1);
    res.exact_degree_at_order0 = D;
    res.truncated = res.a.truncated() || res.r.truncated();
    return res;
}

FormalSymbol oscillator_function_symbol(const std::vector<std::vector<cplx>>& mu, int K, int D) {
    FormalSymbol out(K, D);
    for (std::size_t k = 0; k < mu.size() && static_cast<int>(k) <= K; ++k)
        for (std::size_t j = 0; j < mu[k].size(); ++j) {
            if (mu[k][j] == cplx(0.0)) continue;
            FormalSymbol p = sharp_power_harmonic(static_cast<int>(j), K, D);
            for (int i = 0; i + static_cast<int>(k) <= K; ++i) out[i + k] += p[i] * mu[k][j];
        }
    return out;
}

// ---------------------------------------------------------------- classical Birkhoff

namespace {

TaylorTable2D exp_poisson(const TaylorTable2D& chi, const TaylorTable2D& f) {
    TaylorTable2D sum = f, term = f;
    for (int m = 1; m <= f.degree() + 1; ++m) {
        term = poisson_bracket(chi, term) * cplx(1.0 / m);
        if (term.is_zero()) break;
        sum += term;
    }
    sum.clear_truncated();
    return sum;
}

}  // namespace

BirkhoffResult birkhoff_normal_form(const TaylorTable2D& f_in, int D) {
    const TaylorTable2D f = f_in.resized(std::max(D, 2));
    const double scale = std::max(1.0, f.max_abs());
    if (std::abs(f.at(0, 0)) > 1e-14 * scale || std::abs(f.at(1, 0)) > 1e-14 * scale ||
        std::abs(f.at(0, 1)) > 1e-14 * scale)
        throw Error(ErrorKind::InvalidArgument, "f must vanish to second order at 0");
    const ComplexQuadraticForm Q = ComplexQuadraticForm::from_z_coefficients(f.at(2, 0), f.at(0, 2), f.at(1, 1));
    const auto ell = ellipticity_check(Q);
    if (!ell.elliptic || !ell.range_proper) throw Error(ErrorKind::NonEllipticHessian, "Hessian is not elliptic");
    NormalFormData nf;
    try {
        nf = reduce_quadratic(Q);
    } catch (const Error&) {
        throw Error(ErrorKind::NonEllipticHessian, "Hessian admits no rotation with positive real part");
    }
    BirkhoffResult out;
    out.linear_map = mat_inv(nf.kappa_zv);
    TaylorTable2D g = linear_substitute(f, out.linear_map);
    out.harmonic_coefficient = g.at(1, 1);
    const cplx c = out.harmonic_coefficient;
    out.quadratic_reduced = g.homogeneous_part(2);
    g.set(2, 0, 0.0);  // removed exactly by the linear change (round-off only)
    g.set(0, 2, 0.0);
    for (int n = 3; n <= D; ++n) {
        TaylorTable2D N = g.homogeneous_part(n);
        for (int j = 0; 2 * j <= n; ++j)
            if (2 * j == n) N.set(j, j, 0.0);
        TaylorTable2D chi = theta_antiderivative(N) * (1.0 / c);
        out.generators.push_back(chi);
        if (!chi.is_zero()) {
            g = exp_poisson(chi, g);
            // the degree-n non-radial part cancels exactly; clear round-off
            for (int a = 0; a <= n; ++a)
                if (2 * a != n) g.set(a, n - a, 0.0);
        }
    }
    out.normal_form = g;
    out.mu0.assign(D / 2 + 1, 0.0);
    for (int j = 1; 2 * j <= D; ++j) out.mu0[j] = g.at(j, j) / ipow(c, j);
    return out;
}

std::array<cplx, 2> flow_time_one(const TaylorTable2D& chi, std::array<cplx, 2> y, int steps) {
    const TaylorTable2D dz = chi.d_z(), dw = chi.d_zbar();
    auto field = [&](const std::array<cplx, 2>& p) -> std::array<cplx, 2> {
        return {kI * dw.evaluate(p[0], p[1]), -kI * dz.evaluate(p[0], p[1])};
    };
    const double h = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
        auto k1 = field(y);
        auto k2 = field({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
        auto k3 = field({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
        auto k4 = field({y[0] + h * k3[0], y[1] + h * k3[1]});
        for (int i = 0; i < 2; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return y;
}

std::array<cplx, 2> birkhoff_transport(const BirkhoffResult& b, std::array<cplx, 2> y, int steps) {
    for (auto it = b.generators.rbegin(); it != b.generators.rend(); ++it)
        if (!it->is_zero()) y = flow_time_one(*it, y, steps);
    return mat_apply(b.linear_map, y);
}

// ---------------------------------------------------------------- Weyl bridge, quantum normal form

namespace {

FormalSymbol laplacian_exp(const FormalSymbol& f, double sgn) {
    const int K = f.order(), D = f.degree();
    FormalSymbol out(K, D);
    for (int k = 0; k <= K; ++k)
        for (const auto& e : nonzeros(f[k])) {
            double coef = 1.0;
            for (int j = 0; j <= std::min(e.a, e.b); ++j) {
                if (j > 0) coef *= 0.5 * sgn / j;
                if (k + j > K) {
                    out[K].mark_truncated();
                    break;
                }
                out[k + j].add(e.a - j, e.b - j, coef * falling(e.a, j) * falling(e.b, j) * e.v);
            }
        }
    return out;
}

}  // namespace

FormalSymbol toeplitz_to_weyl(const FormalSymbol& f) { return laplacian_exp(f, 1.0); }
FormalSymbol weyl_to_toeplitz(const FormalSymbol& f) { return laplacian_exp(f, -1.0); }

cplx QuantumNormalForm::eigenvalue(int l, double hbar, int weight) const {
    if (weight < 0) weight = max_weight;
    cplx s = 0.0;
    for (int k = 0; k <= radial.order(); ++k)
        for (int j = 0; 2 * j <= radial.degree(); ++j) {
            if (2 * (j + k) > weight) continue;
            cplx v = radial[k].at(j, j);
            if (v == cplx(0.0)) continue;
            double lg = (k + j) * std::log(hbar) + std::lgamma(l + j + 1.0) - std::lgamma(l + 1.0);
            s += v * std::exp(lg);
        }
    return s;
}

QuantumNormalForm quantum_normal_form(const MonomialSymbol& f, cplx x0, int max_weight) {
    if (max_weight < 2) throw Error(ErrorKind::InvalidArgument, "max_weight must be >= 2");
    const int W = max_weight, D = W, K = W / 2 + 1;
    TaylorTable2D t = TaylorTable2D::from_symbol(f, std::max(f.degree(), 2));
    t = translate(t, x0, std::conj(x0));
    const double scale = std::max(1.0, t.max_abs());
    if (std::abs(t.at(1, 0)) > 1e-12 * scale || std::abs(t.at(0, 1)) > 1e-12 * scale)
        throw Error(ErrorKind::InvalidArgument, "x0 is not a critical point of the symbol");
    t = t.resized(D);
    t.clear_truncated();
    const ComplexQuadraticForm Q = ComplexQuadraticForm::from_z_coefficients(t.at(2, 0), t.at(0, 2), t.at(1, 1));
    const auto ell = ellipticity_check(Q);
    if (!ell.elliptic || !ell.range_proper) throw Error(ErrorKind::NonEllipticHessian, "Hessian is not elliptic");
    const NormalFormData nf = reduce_quadratic(Q);
    const Mat2c L = mat_inv(nf.kappa_zv);

    FormalSymbol w = toeplitz_to_weyl(FormalSymbol::from_table(t, K));
    for (int k = 0; k <= K; ++k) w[k] = linear_substitute(w[k], L);
    FormalSymbol g = weyl_to_toeplitz(w).weight_truncated(W);
    g[0].set(2, 0, 0.0);
    g[0].set(0, 2, 0.0);
    const cplx c = g[0].at(1, 1);

    for (int wt = 3; wt <= W; ++wt) {
        FormalSymbol chi(K, D);
        bool any = false;
        for (int k = 0; 2 * k <= wt; ++k) {
            const int d = wt - 2 * k;
            if (d > D) continue;
            TaylorTable2D N(D);
            for (int a = 0; a <= d; ++a)
                if (2 * a != d) N.set(a, d - a, g[k].at(a, d - a));
            if (N.is_zero()) continue;
            chi[k] = theta_antiderivative(N) * (1.0 / c);
            any = true;
        }
        if (!any) continue;
        // g <- exp(ad) g with ad X = (i/hbar)[chi, X]_#
        FormalSymbol sum = g, term = g;
        for (int m = 1; m <= W; ++m) {
            FormalSymbol cm = capped_commutator(chi.reshaped(K + 1, D), term.reshaped(K + 1, D), K + 1, W + 2);
            cm[0] = TaylorTable2D(D);  // commutative at order 0
            term = (cm.div_hbar().reshaped(K, D) * (kI / static_cast<double>(m))).weight_truncated(W);
            if (term.max_abs() == 0.0) break;
            sum += term;
        }
        g = sum.weight_truncated(W);
        for (int k = 0; 2 * k <= wt; ++k) {
            const int d = wt - 2 * k;
            if (d > D) continue;
            for (int a = 0; a <= d; ++a)
                if (2 * a != d) g[k].set(a, d - a, 0.0);
        }
    }
    QuantumNormalForm q;
    q.radial = g;
    q.radial.clear_truncated();
    q.harmonic_coefficient = c;
    q.level = t.at(0, 0);
    q.max_weight = W;
    return q;
}

}  // namespace bsl
