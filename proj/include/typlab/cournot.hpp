#pragma once

#include <string>
#include <string_view>

#include "typlab/extprob.hpp"

namespace typlab {

// Count in decimal mantissa/exponent form.  The exponent is an exact
// integer, so 1e81 * 1e62 lands on exponent 143 with no rounding story.
struct DecExp {
    double mantissa = 1.0; // in [1, 10)
    long exp10 = 0;

    static DecExp from_double(double x);        // x > 0
    static DecExp parse(std::string_view text); // "1e81", "3.5e12", "250"

    friend DecExp operator*(const DecExp& a, const DecExp& b);
    double ln() const;
    double log10() const;
    std::string to_string() const;
    bool operator<(const DecExp& o) const;
    bool operator==(const DecExp& o) const;
};

// Resource bound on distinguishable trials: atoms times the age of the
// universe over the fastest tick, and the deviation scale it buys.
struct CournotBudget {
    DecExp atoms;
    DecExp time_ratio;
    DecExp n_max;                   // atoms * time_ratio
    double sigma_max = 0;           // gaussian_tail(sigma_max) = 1/n_max
    double epsilon_max_coefficient = 0; // sigma_max/2; eps_max = coeff/sqrt(N) at p = 1/2
};

// sigma_max solved by bisection on the log tail, tolerance 1e-3 relative in
// the tail probability (the bisection overshoots that comfortably).
CournotBudget budget(const DecExp& atoms, const DecExp& time_ratio);

// Hoeffding-inverted variant: 2 exp(-2 sigma^2 p q) = 1/n_max in closed form.
double sigma_max_hoeffding(const DecExp& n_max, double p);

enum class ProbabilityScale {
    ordinary,
    cosmically_negligible,          // below 1/n_max
    borel_universally_negligible,   // below 1e-1000, budget-independent
};

const char* to_string(ProbabilityScale s);

// Strict thresholds, compared in the log domain.
ProbabilityScale classify(const ExtProb& p, const CournotBudget& b);

struct RepeatResult {
    ExtProb value;         // 1 - (1-p)^trials
    bool overflow_flagged; // trials * |ln(1-p)| exceeded the double range
};

// Chance of at least one success over `trials` tries.  trials = 1 returns p
// bit-exactly; p below the complement slot's resolution routes through
// ln(trials * p) so 1e-10000 over 1e300 tries keeps its exponent.
RepeatResult repeat_probability(const ExtProb& p, double trials);

} // namespace typlab
