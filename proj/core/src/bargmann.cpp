#include "bsl/bargmann.hpp"

#include <algorithm>
#include <cmath>

namespace bsl {

MonomialSymbol::MonomialSymbol(std::initializer_list<std::pair<const Key, cplx>> init) {
    for (const auto& [k, v] : init) add(k.first, k.second, v);
}

void MonomialSymbol::add(int alpha, int beta, cplx c) {
    if (alpha < 0 || beta < 0) throw Error(ErrorKind::InvalidArgument, "negative monomial exponent");
    if (c == cplx(0.0)) return;
    auto [it, inserted] = terms_.emplace(Key{alpha, beta}, c);
    if (!inserted) {
        it->second += c;
        if (it->second == cplx(0.0)) terms_.erase(it);
    }
}

void MonomialSymbol::set(int alpha, int beta, cplx c) {
    if (alpha < 0 || beta < 0) throw Error(ErrorKind::InvalidArgument, "negative monomial exponent");
    if (c == cplx(0.0))
        terms_.erase(Key{alpha, beta});
    else
        terms_[Key{alpha, beta}] = c;
}

cplx MonomialSymbol::coeff(int alpha, int beta) const {
    auto it = terms_.find(Key{alpha, beta});
    return it == terms_.end() ? cplx(0.0) : it->second;
}

int MonomialSymbol::degree() const {
    int d = 0;
    for (const auto& [k, v] : terms_) d = std::max(d, k.first + k.second);
    return d;
}

int MonomialSymbol::lower_bandwidth() const {
    int b = 0;
    for (const auto& [k, v] : terms_) b = std::max(b, k.first - k.second);
    return b;
}

int MonomialSymbol::upper_bandwidth() const {
    int b = 0;
    for (const auto& [k, v] : terms_) b = std::max(b, k.second - k.first);
    return b;
}

bool MonomialSymbol::is_radial() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.first == t.first.second; });
}

cplx MonomialSymbol::evaluate(cplx z, cplx w) const {
    cplx s = 0.0;
    for (const auto& [k, v] : terms_) s += v * ipow(z, k.first) * ipow(w, k.second);
    return s;
}

MonomialSymbol MonomialSymbol::operator+(const MonomialSymbol& o) const {
    MonomialSymbol r = *this;
    for (const auto& [k, v] : o.terms_) r.add(k.first, k.second, v);
    return r;
}

MonomialSymbol MonomialSymbol::operator*(cplx s) const {
    MonomialSymbol r;
    for (const auto& [k, v] : terms_) r.add(k.first, k.second, v * s);
    return r;
}

MonomialSymbol quadratic_pq_symbol(cplx a, cplx b, cplx c) {
    // p = (z + zbar)/sqrt2, q = (z - zbar)/(i sqrt2)
    MonomialSymbol s;
    s.add(2, 0, 0.5 * (a - b) - kI * c);
    s.add(0, 2, 0.5 * (a - b) + kI * c);
    s.add(1, 1, a + b);
    return s;
}

namespace {

// log of hbar^{(a+b)/2} (k+a)! / sqrt(k! (k+a-b)!)
double log_monomial_entry(int alpha, int beta, int k, double log_hbar) {
    double lf;
    if (alpha + beta <= 64) {
        // summing a few logs avoids cancelling two large lgamma values
        lf = 0.0;
        for (int i = 1; i <= alpha; ++i) lf += 0.5 * std::log(static_cast<double>(k + i));
        for (int i = 1; i <= beta; ++i) lf += 0.5 * std::log(static_cast<double>(k + alpha - beta + i));
    } else {
        lf = std::lgamma(k + alpha + 1.0) - 0.5 * (std::lgamma(k + 1.0) + std::lgamma(k + alpha - beta + 1.0));
    }
    return 0.5 * (alpha + beta) * log_hbar + lf;
}

constexpr double kExactInt = 9007199254740992.0;  // 2^53

// (lo+1)(lo+2)...(lo+j) as an exact double, or -1 once it leaves the exact range
double rising_exact(int lo, int j) {
    double p = 1.0;
    for (int i = 1; i <= j; ++i) {
        p *= static_cast<double>(lo + i);
        if (p >= kExactInt) return -1.0;
    }
    return p;
}

double hbar_half_power(double hbar, int m) {
    const double p = ipow(hbar, m / 2);
    return m % 2 ? p * std::sqrt(hbar) : p;
}

// Integer products while they are exact (small entries come out exactly,
// e.g. h(k+1) for |z|^2), log-gamma beyond that.
double monomial_entry(int alpha, int beta, int k, double hbar, double log_hbar) {
    const double p1 = rising_exact(k, alpha);                 // (k+a)!/k!
    const double p2 = rising_exact(k + alpha - beta, beta);   // (k+a)!/(k+a-b)!
    if (p1 > 0.0 && p2 > 0.0) {
        const double hp = hbar_half_power(hbar, alpha + beta);
        if (alpha == beta) return hp * p1;
        if (p1 * p2 < kExactInt) return hp * std::sqrt(p1 * p2);
    }
    const double lg = log_monomial_entry(alpha, beta, k, log_hbar);
    if (lg > 700.0) throw Error(ErrorKind::Overflow, "monomial matrix entry overflows double");
    return std::exp(lg);
}

constexpr long kMaxFactorialArg = 10'000'000;

void add_monomial(MatrixXc& M, int alpha, int beta, cplx c, double hbar) {
    const int n = static_cast<int>(M.rows());
    if (static_cast<long>(n) + alpha > kMaxFactorialArg)
        throw Error(ErrorKind::Overflow, "n_max + alpha outside the log-gamma safe range");
    const double lh = std::log(hbar);
    const int off = alpha - beta;
    for (int k = std::max(0, -off); k < n && k + off < n; ++k) {
        M(k + off, k) += c * monomial_entry(alpha, beta, k, hbar, lh);
    }
}

}  // namespace

ToeplitzMatrix monomial_matrix(int alpha, int beta, PlanckParameter hbar, BasisTruncation n) {
    if (alpha < 0 || beta < 0) throw Error(ErrorKind::InvalidArgument, "negative monomial exponent");
    ToeplitzMatrix T;
    T.entries = MatrixXc::Zero(n, n);
    T.hbar = hbar;
    T.lower_bandwidth = std::max(0, alpha - beta);
    T.upper_bandwidth = std::max(0, beta - alpha);
    add_monomial(T.entries, alpha, beta, 1.0, hbar);
    return T;
}

ToeplitzMatrix assemble_toeplitz(const MonomialSymbol& symbol, PlanckParameter hbar, BasisTruncation n) {
    ToeplitzMatrix T;
    T.entries = MatrixXc::Zero(n, n);
    T.hbar = hbar;
    T.lower_bandwidth = symbol.lower_bandwidth();
    T.upper_bandwidth = symbol.upper_bandwidth();
    for (const auto& [key, c] : symbol.terms()) add_monomial(T.entries, key.first, key.second, c, hbar);
    return T;
}

std::vector<cplx> radial_diagonal(const std::vector<cplx>& moments, double hbar, int n) {
    std::vector<cplx> d(n, 0.0);
    const double lh = std::log(hbar);
    for (int k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < moments.size(); ++j) {
            if (moments[j] == cplx(0.0)) continue;
            const int jj = static_cast<int>(j);
            const double p = rising_exact(k, jj);
            if (p > 0.0)
                d[k] += moments[j] * (ipow(hbar, jj) * p);
            else
                d[k] += moments[j] * std::exp(log_monomial_entry(jj, jj, k, lh));
        }
    }
    return d;
}

ToeplitzMatrix toeplitz_radial(const std::vector<double>& moments, PlanckParameter hbar, BasisTruncation n) {
    std::vector<cplx> m(moments.begin(), moments.end());
    auto d = radial_diagonal(m, hbar, n);
    ToeplitzMatrix T;
    T.entries = MatrixXc::Zero(n, n);
    T.hbar = hbar;
    for (int k = 0; k < n; ++k) T.entries(k, k) = d[k];
    return T;
}

void gauss_laguerre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    // Golub-Welsch on the Laguerre Jacobi matrix.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        J(i, i) = 2.0 * i + 1.0;
        if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = i + 1.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = es.eigenvalues()(i);
        double v = es.eigenvectors()(0, i);
        weights[i] = v * v;
    }
}

namespace {

cplx polar_rule(const std::function<cplx(cplx)>& F, double hbar, int nr, int na) {
    std::vector<double> t, w;
    gauss_laguerre(nr, t, w);
    cplx total = 0.0;
    for (int i = 0; i < nr; ++i) {
        if (w[i] == 0.0) continue;
        const double r = std::sqrt(hbar * t[i]);
        cplx ring = 0.0;
        for (int j = 0; j < na; ++j) {
            const double th = 2.0 * kPi * j / na;
            ring += F(std::polar(r, th));
        }
        total += w[i] * ring / static_cast<double>(na);
    }
    return total;
}

}  // namespace

QuadratureResult gaussian_integral(const std::function<cplx(cplx)>& F, double hbar, double tol, int max_nodes) {
    int nr = 16, na = 16;
    cplx prev = polar_rule(F, hbar, nr, na);
    double err = 0.0;
    while (true) {
        int nr2 = nr * 2, na2 = na * 2;
        cplx cur = polar_rule(F, hbar, nr2, na2);
        err = std::abs(cur - prev);
        nr = nr2;
        na = na2;
        prev = cur;
        if (err <= tol * std::max(1.0, std::abs(cur)) || nr >= max_nodes) break;
    }
    return {prev, err, nr, na};
}

QuadratureResult inner_product_oracle(const MonomialSymbol& symbol, int k, int l, PlanckParameter hbar) {
    if (k < 0 || l < 0) throw Error(ErrorKind::InvalidArgument, "negative basis index");
    const double h = hbar;
    const double norm = std::exp(-0.5 * (std::lgamma(k + 1.0) + std::lgamma(l + 1.0) + (k + l) * std::log(h)));
    auto integrand = [&](cplx z) {
        return symbol.evaluate(z) * ipow(z, k) * ipow(std::conj(z), l) * norm;
    };
    QuadratureResult r = gaussian_integral(integrand, h, 1e-12, 512);
    if (r.error_estimate > 1e-10)
        throw Error(ErrorKind::QuadratureFailed, "estimated quadrature error " + std::to_string(r.error_estimate));
    return r;
}

}  // namespace bsl
