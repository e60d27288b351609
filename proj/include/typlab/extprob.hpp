#pragma once

#include <span>
#include <string>
#include <string_view>

namespace typlab {

// Probability with both tails kept in log form.  A plain double loses the
// complement of 1 - 1e-21 entirely and underflows below ~1e-308; here the
// value and its complement each get their own natural-log slot, so numbers
// like 1e-2174 and 1 - 1e-2174 round-trip without damage.
//
// Representation:
//   zero          lv = -inf, lc = 0
//   one           lv = 0,    lc = -inf
//   p in (0,1)    lv = ln p < 0,  lc = ln(1-p) < 0
//   bound >= 1    lv >= 0,   lc = NaN   (unclipped inequality bounds only;
//                                        complement() is undefined for these)
class ExtProb {
public:
    ExtProb() : ExtProb(zero()) {}

    static ExtProb zero();
    static ExtProb one();

    // x in [0,1]; throws std::invalid_argument otherwise.
    static ExtProb from_linear(double x);

    // log_value <= 0 (probabilities); complement slot filled via log1p/expm1.
    static ExtProb from_log(double log_value);
    static ExtProb from_log10(double log10_value);

    // Trusted raw constructor: both slots supplied by the caller, who is
    // responsible for their consistency (used by tail summations that compute
    // both sides of a partition independently).
    static ExtProb from_log_pair(double log_value, double log_complement);

    // Inequality bounds may exceed 1 (e.g. 2*exp(-2*sigma^2*p*q) at small
    // sigma); they carry no complement.
    static ExtProb from_log_bound(double log_value);

    double log_value() const { return lv_; }
    double log_complement() const { return lc_; }
    double log10_value() const;
    double log10_complement() const;
    double linear() const;            // exp(lv), underflows below ~1e-308
    double complement_linear() const; // exp(lc)

    bool is_zero() const;
    bool is_one() const;
    bool has_complement() const; // false only for bound-style values >= 1

    // Swaps the two slots; exact involution.  Throws std::domain_error on
    // bound-style values with no complement.
    ExtProb complement() const;

    // Product keeps the complement exact via 1 - pq = (1-p) + p(1-q).
    friend ExtProb operator*(const ExtProb& a, const ExtProb& b);
    ExtProb& operator*=(const ExtProb& b) { return *this = *this * b; }

    // Log-sum-exp with the largest term factored out.  The complement is
    // anchored on the complement of the largest summand:
    //   1 - sum = (1 - p_max) - sum_{i != max} p_i.
    // Throws std::runtime_error if the sum exceeds 1 by more than 1e-9
    // relative; sums within that window clamp to one.
    static ExtProb sum(std::span<const ExtProb> terms);

    // Ordering by value; among values sharing a log slot, complements break
    // the tie (larger complement = smaller value).
    bool operator==(const ExtProb& o) const;
    bool operator<(const ExtProb& o) const;
    bool operator>(const ExtProb& o) const { return o < *this; }
    bool operator<=(const ExtProb& o) const { return !(o < *this); }
    bool operator>=(const ExtProb& o) const { return !(*this < o); }

    // Decimal form of the contract: "7.69231e-24" with `digits` significant
    // digits (default 6), values above 0.999999 as "1 - 1.00000e-2174",
    // exact zero/one as "0"/"1".
    std::string to_string(int digits = 6) const;

    // Inverse of to_string; also accepts plain scientific notation with any
    // number of digits.  Throws std::invalid_argument on malformed input.
    static ExtProb parse(std::string_view text);

private:
    ExtProb(double lv, double lc) : lv_(lv), lc_(lc) {}

    double lv_;
    double lc_;
};

// Bit-level identity (distinguishes -0.0/0.0, matches NaN complements);
// used by tests that pin exact representations.
bool identical(const ExtProb& a, const ExtProb& b);

// log(exp(a) + exp(b)) with the max factored out; -inf transparent.
double log_sum_exp(double a, double b);

// log(exp(a) - exp(b)), requires a >= b; -inf when equal.
double log_diff_exp(double a, double b);

} // namespace typlab
