#pragma once

#include <span>
#include <vector>

#include "typlab/extprob.hpp"

namespace typlab {

// n coin throws at spade-probability p.  n is a double so the asymptotic
// regime (n ~ 1e24, beyond exact summation) stays expressible; exact paths
// require integral n <= 1e9.
class BinomialSpec {
public:
    BinomialSpec(double n, double p);

    double n() const { return n_; }
    double p() const { return p_; }
    double mean() const { return n_ * p_; }
    // delta Q = sqrt(p(1-p)/n), the relative-frequency fluctuation scale
    double delta_q() const;
    // largest sigma with sigma*delta_q <= min(p, 1-p)
    double sigma_limit() const;
    bool exact_summable() const; // integral and <= 1e9

private:
    double n_;
    double p_;
};

// P(X = k) via the saddle-point form pmf = sqrt(n/(2 pi k (n-k)))
//             * exp(stirlerr terms - deviance), carried in long double.
// Naive lgamma differences lose ~5 digits at n = 1e9 to cancellation; this
// form keeps relative error within a few 1e-14 (or a few ulps of the log
// for far-tail results whose log magnitude is large).
double log_binomial_pmf(double n, double p, double k);
ExtProb binomial_pmf(const BinomialSpec& spec, double k);

struct ApproxPmf {
    ExtProb value;
    bool regime_warning; // n < 100: outside the quoted validity regime
};

// Gaussian approximation exp(-z^2/2)/sqrt(2 pi n p q), z = (k-np)/sqrt(npq).
ApproxPmf moivre_laplace_pmf(const BinomialSpec& spec, double k);

// ln P(Z >= z) for a standard normal; direct erfc up to z = 30, then the
// divergent tail series 1 - 1/z^2 + 3/z^4 - ... truncated at its smallest
// term (crossover agreement tested to ~1e-12 relative).
double log_normal_sf(double z);

// Two-sided tail erfc(sigma/sqrt 2) as an ExtProb; sigma = 0 gives exactly 1.
ExtProb gaussian_tail(double sigma);

// Inclusive interior [lo, hi] of the band |k - center| <= width (closed) or
// |k - center| < width (open), boundary decided with 1e-12 relative
// tolerance; clamped to [0, n], lo > hi when empty.
struct BandEdges {
    long long lo;
    long long hi;
    bool empty() const { return lo > hi; }
};
BandEdges band_interior(double n, double center, double width, bool closed);

// ln sum_{k=a..b} P(X = k), anchored at the in-range mode and walked outward
// by pmf ratios; early termination once increments drop below 1e-30 of the
// running sum.  -inf when the range is empty.
double log_pmf_range_sum(double n, double p, long long a, long long b);

struct TailReport {
    double n = 0;
    double p = 0;
    double sigma = 0;
    double epsilon = 0;      // sigma * delta_q
    ExtProb exact;           // P(|Q - p| >= sigma*delta_q), boundary included
    ExtProb hoeffding;       // 2 exp(-2 sigma^2 p q), unclipped
    ExtProb chebyshev;       // min(1, 1/sigma^2)
    ExtProb gaussian;        // erfc(sigma/sqrt 2)
    bool exact_asymptotic = false; // n > 1e9: exact field carries the gaussian value
};

// Exact and bounding two-sided tails at deviation sigma fluctuation units.
// The exact field and its complement are summed independently over the two
// sides of the (open-interior / closed-tail) partition, so both are accurate
// in relative terms.
TailReport two_sided_tail(const BinomialSpec& spec, double sigma);

struct WllnRow {
    double n = 0;
    double epsilon = 0;
    ExtProb exact;
    ExtProb hoeffding;
    ExtProb chebyshev;
    ExtProb gaussian;
    bool exact_asymptotic = false;
};

// Tail table at fixed epsilon across sample sizes: the weak-law trend.
std::vector<WllnRow> wlln_table(double p, std::span<const double> ns, double epsilon);

// C(ms,k) C(mh,draws-k) / C(ms+mh,draws) via log-gamma; zero outside the
// support, error only for impossible draw counts.
ExtProb hypergeometric_pmf(unsigned long long m_spade, unsigned long long m_heart,
                           unsigned long long draws, unsigned long long k);

enum class IntervalMethod { approximate, rigorous };

struct ConfidenceInterval {
    IntervalMethod method = IntervalMethod::approximate;
    double center = 0;
    double half_width = 0;
    double lo = 0; // clipped to [0,1]
    double hi = 0;
    bool degenerate = false; // approximate method at q in {0,1}
    bool clipped = false;
};

// Frequency inversion: approximate center q +- sigma sqrt(q(1-q)/n);
// rigorous variant solves the quadratic in p exactly, staying honest at the
// edges (q = 0 gives center sigma^2/(n + sigma^2) instead of collapsing).
ConfidenceInterval confidence_interval(double q, double n, double sigma,
                                       IntervalMethod method);

} // namespace typlab
