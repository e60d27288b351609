#include "typlab/tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace typlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExactLimit = 1e9;        // largest n exact summation accepts
constexpr long double kPiL = 3.141592653589793238462643383279502884L;
constexpr long double kHalfLn2PiL = 0.918938533204672741780329736405617639L; // ln(2 pi)/2

// ln(n!) - [n ln n - n + ln(2 pi n)/2], the Stirling correction.  Small n by
// direct lgamma (the cancellation is between numbers of order 30, harmless);
// larger n by the 1/n series with R-style term counts per range.
long double stirlerr(long double n) {
    constexpr long double S0 = 1.0L / 12, S1 = 1.0L / 360, S2 = 1.0L / 1260,
                          S3 = 1.0L / 1680, S4 = 1.0L / 1188;
    if (n <= 15.0L)
        return lgammal(n + 1.0L) - ((n + 0.5L) * logl(n) - n + kHalfLn2PiL);
    const long double nn = n * n;
    if (n > 500.0L) return (S0 - S1 / nn) / n;
    if (n > 80.0L) return (S0 - (S1 - S2 / nn) / nn) / n;
    if (n > 35.0L) return (S0 - (S1 - (S2 - S3 / nn) / nn) / nn) / n;
    return (S0 - (S1 - (S2 - (S3 - S4 / nn) / nn) / nn) / nn) / n;
}

// Binomial deviance x ln(x/np) + np - x without the cancellation of the
// direct form: for x near np the series in v = (x-np)/(x+np) is used.
long double bd0(long double x, long double np) {
    if (fabsl(x - np) < 0.1L * (x + np)) {
        const long double v = (x - np) / (x + np);
        long double s = (x - np) * v;
        long double ej = 2.0L * x * v;
        const long double v2 = v * v;
        for (int j = 1;; ++j) {
            ej *= v2;
            const long double s1 = s + ej / (2 * j + 1);
            if (s1 == s) return s1;
            s = s1;
        }
    }
    return x * logl(x / np) + np - x;
}

long double log_pmf_core(long double n, long double p, long double k) {
    const long double q = 1.0L - p;
    const long double dev = stirlerr(n) - stirlerr(k) - stirlerr(n - k) -
                            bd0(k, n * p) - bd0(n - k, n * q);
    const long double lf = 0.5L * logl(n / (2.0L * kPiL * k * (n - k)));
    return dev + lf;
}

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

} // namespace

BinomialSpec::BinomialSpec(double n, double p) : n_(n), p_(p) {
    require(std::isfinite(n) && n >= 1.0, "BinomialSpec: n must be >= 1");
    if (n <= 9.007199254740992e15) // integrality checkable below 2^53
        require(n == std::floor(n), "BinomialSpec: n must be an integer");
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0,
            "BinomialSpec: p must lie in [0,1]");
}

double BinomialSpec::delta_q() const {
    return std::sqrt(p_ * (1.0 - p_) / n_);
}

double BinomialSpec::sigma_limit() const {
    const double d = delta_q();
    if (d == 0.0) return 0.0;
    return std::min(p_, 1.0 - p_) / d;
}

bool BinomialSpec::exact_summable() const { return n_ <= kExactLimit; }

double log_binomial_pmf(double n, double p, double k) {
    require(std::isfinite(k) && k == std::floor(k) && k >= 0.0 && k <= n,
            "log_binomial_pmf: k must be an integer in [0,n]");
    if (p == 0.0) return (k == 0.0) ? 0.0 : -kInf;
    if (p == 1.0) return (k == n) ? 0.0 : -kInf;
    if (k == 0.0) return static_cast<double>(n * log1pl(-(long double)p));
    if (k == n) return static_cast<double>(n * logl((long double)p));
    return static_cast<double>(log_pmf_core(n, p, k));
}

ExtProb binomial_pmf(const BinomialSpec& spec, double k) {
    // off-lattice or out-of-range counts carry no mass
    if (!(k == std::floor(k)) || k < 0.0 || k > spec.n())
        return ExtProb::zero();
    const double lv = log_binomial_pmf(spec.n(), spec.p(), k);
    return ExtProb::from_log(std::min(lv, 0.0));
}

ApproxPmf moivre_laplace_pmf(const BinomialSpec& spec, double k) {
    require(std::isfinite(k), "moivre_laplace_pmf: k must be finite");
    const double npq = spec.n() * spec.p() * (1.0 - spec.p());
    require(npq > 0.0, "moivre_laplace_pmf: degenerate p");
    const double z = (k - spec.mean()) / std::sqrt(npq);
    const double lv = -0.5 * z * z -
                      0.5 * static_cast<double>(logl(2.0L * kPiL * (long double)npq));
    return ApproxPmf{ExtProb::from_log_bound(lv), spec.n() < 100.0};
}

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSeriesCrossover = 30.0;

// ln[ phi(z)/z * (1 - 1/z^2 + 3/z^4 - 15/z^6 + ...) ] with the alternating
// series truncated at its smallest term (magnitude ~exp(-z^2/2), far below
// double noise for z >= 30).
double log_sf_series(double z) {
    const long double zl = z;
    const long double z2 = zl * zl;
    long double s = 1.0L;
    long double term = 1.0L;
    long double prev_mag = 1.0L;
    for (int k = 1; k < 200; ++k) {
        term *= -(2.0L * k - 1.0L) / z2;
        if (fabsl(term) >= prev_mag) break; // series turned divergent
        s += term;
        prev_mag = fabsl(term);
        if (prev_mag < 1e-22L * s) break;
    }
    const long double l = -0.5L * z2 - logl(zl) - kHalfLn2PiL + logl(s);
    return static_cast<double>(l);
}

} // namespace

double log_normal_sf(double z) {
    if (z < 0.0) {
        // P(Z >= z) = 1 - P(Z >= -z)
        const double other = log_normal_sf(-z);
        return (other < -1e-17) ? std::log1p(-std::exp(other)) : -std::exp(other);
    }
    if (z <= kSeriesCrossover) return std::log(0.5 * std::erfc(z / kSqrt2));
    return log_sf_series(z);
}

ExtProb gaussian_tail(double sigma) {
    require(std::isfinite(sigma) && sigma >= 0.0, "gaussian_tail: sigma must be >= 0");
    if (sigma == 0.0) return ExtProb::one();
    const double lv = 0.6931471805599453 + log_normal_sf(sigma); // ln 2 + ln sf
    return ExtProb::from_log(std::min(lv, 0.0));
}

BandEdges band_interior(double n, double center, double width, bool closed) {
    require(width >= 0.0, "band_interior: width must be >= 0");
    const double tol = 1e-12 * width;
    long long lo, hi;
    if (closed) {
        lo = static_cast<long long>(std::ceil(center - width - tol));
        hi = static_cast<long long>(std::floor(center + width + tol));
    } else {
        lo = static_cast<long long>(std::floor(center - width + tol)) + 1;
        hi = static_cast<long long>(std::ceil(center + width - tol)) - 1;
    }
    lo = std::max(lo, 0LL);
    hi = std::min(hi, static_cast<long long>(std::llround(n)));
    return BandEdges{lo, hi};
}

double log_pmf_range_sum(double n, double p, long long a, long long b) {
    const long long nn = static_cast<long long>(std::llround(n));
    a = std::max(a, 0LL);
    b = std::min(b, nn);
    if (a > b) return -kInf;
    if (p == 0.0) return (a == 0) ? 0.0 : -kInf;
    if (p == 1.0) return (b == nn) ? 0.0 : -kInf;

    long long mode = static_cast<long long>(std::floor((n + 1.0) * p));
    mode = std::clamp(mode, a, b);
    const double l0 = log_binomial_pmf(n, p, static_cast<double>(mode));
    if (l0 == -kInf) return -kInf;

    const long double pl = p, ql = 1.0L - (long double)p, nl = n;
    long double s = 1.0L;
    long double t = 1.0L;
    for (long long k = mode; k > a; --k) {
        t *= ((long double)k * ql) / ((nl - (long double)k + 1.0L) * pl);
        s += t;
        if (t < 1e-30L * s) break;
    }
    t = 1.0L;
    for (long long k = mode; k < b; ++k) {
        t *= ((nl - (long double)k) * pl) / (((long double)k + 1.0L) * ql);
        s += t;
        if (t < 1e-30L * s) break;
    }
    return l0 + static_cast<double>(logl(s));
}

TailReport two_sided_tail(const BinomialSpec& spec, double sigma) {
    require(std::isfinite(sigma) && sigma > 0.0, "two_sided_tail: sigma must be > 0");
    require(sigma <= spec.sigma_limit() * (1.0 + 1e-9),
            "two_sided_tail: sigma beyond min(p,1-p)/delta_q");

    TailReport r;
    r.n = spec.n();
    r.p = spec.p();
    r.sigma = sigma;
    r.epsilon = sigma * spec.delta_q();

    const long double nl = spec.n(), pl = spec.p(), ql = 1.0L - pl, sl = sigma;
    // the two printed forms of the bound must agree: 2e^{-2 n sigma^2 dq^2}
    // and 2e^{-2 sigma^2 p q}
    const long double dq2 = pl * ql / nl;
    const long double form1 = -2.0L * nl * sl * sl * dq2;
    const long double form2 = -2.0L * sl * sl * pl * ql;
    if (fabsl(form1 - form2) > 1e-12L * std::max(1.0L, fabsl(form2)))
        throw std::runtime_error("two_sided_tail: inconsistent bound forms");
    r.hoeffding = ExtProb::from_log_bound(
        static_cast<double>(0.693147180559945309L + form2));

    r.chebyshev = (sigma <= 1.0) ? ExtProb::one()
                                 : ExtProb::from_log(-2.0 * std::log(sigma));

    r.gaussian = gaussian_tail(sigma);

    if (spec.exact_summable()) {
        const double w = sigma * std::sqrt(spec.n() * spec.p() * (1.0 - spec.p()));
        const BandEdges in = band_interior(spec.n(), spec.mean(), w, /*closed=*/false);
        const double below = log_pmf_range_sum(spec.n(), spec.p(), 0, in.lo - 1);
        const double above = log_pmf_range_sum(spec.n(), spec.p(), in.hi + 1,
                                               static_cast<long long>(spec.n()));
        const double inside = log_pmf_range_sum(spec.n(), spec.p(), in.lo, in.hi);
        r.exact = ExtProb::from_log_pair(std::min(log_sum_exp(below, above), 0.0),
                                         std::min(inside, 0.0));
    } else {
        r.exact = r.gaussian;
        r.exact_asymptotic = true;
    }
    return r;
}

std::vector<WllnRow> wlln_table(double p, std::span<const double> ns, double epsilon) {
    require(std::isfinite(p) && p > 0.0 && p < 1.0, "wlln_table: p must lie in (0,1)");
    require(std::isfinite(epsilon) && epsilon > 0.0, "wlln_table: epsilon must be > 0");
    require(epsilon <= std::min(p, 1.0 - p) * (1.0 + 1e-9),
            "wlln_table: epsilon beyond min(p,1-p)");
    require(!ns.empty(), "wlln_table: empty N list");

    std::vector<WllnRow> rows;
    rows.reserve(ns.size());
    const double pq = p * (1.0 - p);
    for (double n : ns) {
        BinomialSpec spec(n, p); // validates n
        WllnRow row;
        row.n = n;
        row.epsilon = epsilon;
        row.hoeffding = ExtProb::from_log_bound(
            0.6931471805599453 - 2.0 * n * epsilon * epsilon);
        const double cheb = pq / (n * epsilon * epsilon);
        row.chebyshev = (cheb >= 1.0)
                            ? ExtProb::one()
                            : ExtProb::from_log(std::log(pq) - std::log(n) -
                                                2.0 * std::log(epsilon));
        row.gaussian = gaussian_tail(epsilon / spec.delta_q());
        if (spec.exact_summable()) {
            const BandEdges in =
                band_interior(n, spec.mean(), n * epsilon, /*closed=*/false);
            const double below = log_pmf_range_sum(n, p, 0, in.lo - 1);
            const double above =
                log_pmf_range_sum(n, p, in.hi + 1, static_cast<long long>(n));
            const double inside = log_pmf_range_sum(n, p, in.lo, in.hi);
            row.exact = ExtProb::from_log_pair(
                std::min(log_sum_exp(below, above), 0.0), std::min(inside, 0.0));
        } else {
            row.exact = row.gaussian;
            row.exact_asymptotic = true;
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

long double log_choose(unsigned long long a, unsigned long long b) {
    return lgammal((long double)a + 1.0L) - lgammal((long double)b + 1.0L) -
           lgammal((long double)(a - b) + 1.0L);
}

} // namespace

ExtProb hypergeometric_pmf(unsigned long long m_spade, unsigned long long m_heart,
                           unsigned long long draws, unsigned long long k) {
    require(draws <= m_spade + m_heart, "hypergeometric_pmf: draws exceed population");
    require(k <= draws, "hypergeometric_pmf: k exceeds draws");
    // outside the support the mass is zero, not an error
    if (k > m_spade || draws - k > m_heart) return ExtProb::zero();
    const long double l = log_choose(m_spade, k) + log_choose(m_heart, draws - k) -
                          log_choose(m_spade + m_heart, draws);
    double lv = static_cast<double>(l);
    if (lv > 0.0) {
        if (lv > 1e-9)
            throw std::runtime_error("hypergeometric_pmf: log mass above 0");
        lv = 0.0;
    }
    return ExtProb::from_log(lv);
}

ConfidenceInterval confidence_interval(double q, double n, double sigma,
                                       IntervalMethod method) {
    require(std::isfinite(q) && q >= 0.0 && q <= 1.0,
            "confidence_interval: q must lie in [0,1]");
    require(std::isfinite(n) && n >= 1.0, "confidence_interval: n must be >= 1");
    require(std::isfinite(sigma) && sigma > 0.0,
            "confidence_interval: sigma must be > 0");

    ConfidenceInterval ci;
    ci.method = method;
    if (method == IntervalMethod::approximate) {
        ci.center = q;
        ci.half_width = sigma * std::sqrt(q * (1.0 - q) / n);
        ci.degenerate = (q == 0.0 || q == 1.0);
    } else {
        const double s2 = sigma * sigma;
        const double denom = 1.0 + s2 / n;
        ci.center = (q + s2 / (2.0 * n)) / denom;
        ci.half_width =
            sigma * std::sqrt(q * (1.0 - q) + s2 / (4.0 * n)) / (std::sqrt(n) * denom);
    }
    ci.lo = ci.center - ci.half_width;
    ci.hi = ci.center + ci.half_width;
    if (ci.lo < 0.0 || ci.hi > 1.0) {
        ci.clipped = true;
        ci.lo = std::max(ci.lo, 0.0);
        ci.hi = std::min(ci.hi, 1.0);
    }
    return ci;
}

} // namespace typlab
