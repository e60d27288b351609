#include "typlab/extprob.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace typlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Saturation window for sum(): totals in (1, 1 + 1e-9] clamp to one,
// anything larger is an error.
constexpr double kSumSlackLog = 1e-9;

// ln(0.999999): values above this render through their complement.
const double kNearOneLog = std::log(0.999999);

const long double kLn10L = 2.302585092994045684017991454684364208L;

// ln(1 - exp(l)) for l <= 0, stable on both ends.
double log1m_exp(double l) {
    if (l == 0.0) return -kInf;
    if (l == -kInf) return 0.0;
    // crossover at -ln 2 keeps both log1p and expm1 in their good range
    return (l > -0.6931471805599453) ? std::log(-std::expm1(l))
                                     : std::log1p(-std::exp(l));
}

} // namespace

double log_sum_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

double log_diff_exp(double a, double b) {
    if (b == -kInf) return a;
    if (b >= a) return -kInf;
    return a + log1m_exp(b - a);
}

ExtProb ExtProb::zero() { return ExtProb(-kInf, 0.0); }
ExtProb ExtProb::one() { return ExtProb(0.0, -kInf); }

bool ExtProb::is_zero() const { return lv_ == -kInf; }
bool ExtProb::is_one() const { return lv_ == 0.0 && lc_ == -kInf; }
bool ExtProb::has_complement() const { return !std::isnan(lc_); }

ExtProb ExtProb::from_linear(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::invalid_argument("ExtProb::from_linear: value outside [0,1]");
    if (x == 0.0) return zero();
    if (x == 1.0) return one();
    return ExtProb(std::log(x), std::log1p(-x));
}

ExtProb ExtProb::from_log(double log_value) {
    if (std::isnan(log_value) || log_value > 0.0)
        throw std::invalid_argument("ExtProb::from_log: log value above 0");
    if (log_value == -kInf) return zero();
    if (log_value == 0.0) return one();
    return ExtProb(log_value, log1m_exp(log_value));
}

ExtProb ExtProb::from_log10(double log10_value) {
    return from_log(static_cast<double>(static_cast<long double>(log10_value) * kLn10L));
}

ExtProb ExtProb::from_log_pair(double log_value, double log_complement) {
    return ExtProb(log_value, log_complement);
}

ExtProb ExtProb::from_log_bound(double log_value) {
    if (std::isnan(log_value))
        throw std::invalid_argument("ExtProb::from_log_bound: NaN log value");
    if (log_value <= 0.0) return from_log(log_value);
    return ExtProb(log_value, kNaN);
}

double ExtProb::log10_value() const {
    if (lv_ == -kInf) return -kInf;
    return static_cast<double>(static_cast<long double>(lv_) / kLn10L);
}

double ExtProb::log10_complement() const {
    if (lc_ == -kInf) return -kInf;
    return static_cast<double>(static_cast<long double>(lc_) / kLn10L);
}

double ExtProb::linear() const { return std::exp(lv_); }
double ExtProb::complement_linear() const { return std::exp(lc_); }

ExtProb ExtProb::complement() const {
    if (!has_complement())
        throw std::domain_error("ExtProb::complement: undefined for bound values above 1");
    return ExtProb(lc_, lv_);
}

ExtProb operator*(const ExtProb& a, const ExtProb& b) {
    if (a.is_zero() || b.is_zero()) return ExtProb::zero();
    const double lv = a.lv_ + b.lv_;
    // 1 - pq = (1-p) + p(1-q), exact in the complement slot
    const double lc = log_sum_exp(a.lc_, a.lv_ + b.lc_);
    return ExtProb(lv, lc);
}

ExtProb ExtProb::sum(std::span<const ExtProb> terms) {
    std::size_t imax = terms.size();
    std::size_t nonzero = 0;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (!terms[i].has_complement())
            throw std::invalid_argument("ExtProb::sum: bound values above 1 not summable");
        if (terms[i].is_zero()) continue;
        ++nonzero;
        if (imax == terms.size() || terms[i].log_value() > terms[imax].log_value())
            imax = i;
    }
    if (nonzero == 0) return zero();
    if (nonzero == 1) return terms[imax]; // exact identity for a single term

    const double m = terms[imax].log_value();
    double acc_rest = 0.0; // sum of exp(lv - m) excluding the largest term
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i == imax || terms[i].is_zero()) continue;
        acc_rest += std::exp(terms[i].log_value() - m);
    }
    const double lv_total = m + std::log1p(acc_rest);
    if (lv_total > kSumSlackLog)
        throw std::runtime_error("ExtProb::sum: saturated above 1");

    // complement anchored on the largest summand
    const double cj = terms[imax].log_complement();
    const double rest = (acc_rest > 0.0) ? m + std::log(acc_rest) : -kInf;
    double lc;
    if (cj == -kInf) {
        // largest term is exactly one; anything extra is saturation
        if (rest > std::log(kSumSlackLog))
            throw std::runtime_error("ExtProb::sum: saturated above 1");
        return one();
    }
    if (rest >= cj) {
        // complement vanishes to rounding; clamp
        return ExtProb(std::min(lv_total, 0.0), -kInf);
    }
    lc = log_diff_exp(cj, rest);
    return ExtProb(std::min(lv_total, 0.0), lc);
}

bool ExtProb::operator==(const ExtProb& o) const {
    return lv_ == o.lv_ && (lc_ == o.lc_ || (std::isnan(lc_) && std::isnan(o.lc_)));
}

bool ExtProb::operator<(const ExtProb& o) const {
    if (lv_ != o.lv_) return lv_ < o.lv_;
    // equal value slots: fall back to complements, larger complement = smaller
    const double a = std::isnan(lc_) ? -kInf : lc_;
    const double b = std::isnan(o.lc_) ? -kInf : o.lc_;
    return a > b;
}

bool identical(const ExtProb& a, const ExtProb& b) {
    auto same_bits = [](double x, double y) {
        if (std::isnan(x) || std::isnan(y)) return std::isnan(x) && std::isnan(y);
        return x == y && std::signbit(x) == std::signbit(y);
    };
    return same_bits(a.log_value(), b.log_value()) &&
           same_bits(a.log_complement(), b.log_complement());
}

namespace {

// "m.ddddde[+-]XX" from a natural log, `digits` significant digits.  Done in
// long double so the mantissa survives exponents in the thousands: splitting
// lv/ln10 into integer and fractional parts costs |lv|*eps absolute, which in
// double would eat the 12th digit near e-2174.
std::string sci_from_log(double l, int digits) {
    long double l10 = static_cast<long double>(l) / kLn10L;
    long double e = std::floor(l10);
    long double frac = l10 - e;
    long double mant = std::exp(frac * kLn10L);
    // rounding to the requested digits may carry the mantissa to 10.0
    const long double scale = std::pow(10.0L, digits - 1);
    mant = std::round(mant * scale) / scale;
    if (mant >= 10.0L) {
        mant /= 10.0L;
        e += 1.0L;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*Lfe%+03d", digits - 1, mant,
                  static_cast<int>(e));
    return buf;
}

} // namespace

std::string ExtProb::to_string(int digits) const {
    if (digits < 1 || digits > 17)
        throw std::invalid_argument("ExtProb::to_string: digits outside [1,17]");
    if (is_zero()) return "0";
    if (is_one()) return "1";
    if (!has_complement()) return sci_from_log(lv_, digits); // bound >= 1
    if (lv_ > kNearOneLog) {
        // clamped sums can carry lv slightly below 0 with the complement
        // slot already drained; the only faithful decimal left is "1"
        if (lc_ == -kInf) return "1";
        return "1 - " + sci_from_log(lc_, digits);
    }
    return sci_from_log(lv_, digits);
}

namespace {

void skip_spaces(std::string_view& s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
}

// mantissa [exponent] -> natural log, long double path as in rendering
double log_from_sci(std::string_view s) {
    std::string text(s);
    std::size_t epos = text.find_first_of("eE");
    long double mant;
    long exp10 = 0;
    try {
        std::size_t used = 0;
        mant = std::stold(text.substr(0, epos), &used);
        if (used != (epos == std::string::npos ? text.size() : epos))
            throw std::invalid_argument("trailing characters");
        if (epos != std::string::npos) {
            std::size_t eused = 0;
            exp10 = std::stol(text.substr(epos + 1), &eused);
            if (eused != text.size() - epos - 1)
                throw std::invalid_argument("trailing characters");
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("ExtProb::parse: malformed number '" + text + "'");
    }
    if (mant < 0.0L)
        throw std::invalid_argument("ExtProb::parse: negative probability");
    if (mant == 0.0L) return -kInf;
    return static_cast<double>(std::log(mant) + static_cast<long double>(exp10) * kLn10L);
}

} // namespace

ExtProb ExtProb::parse(std::string_view text) {
    std::string_view s = text;
    skip_spaces(s);
    if (s.empty()) throw std::invalid_argument("ExtProb::parse: empty string");
    if (s == "0") return zero();
    if (s == "1") return one();
    if (s.front() == '1') {
        // complement form "1 - <sci>"
        std::string_view rest = s.substr(1);
        skip_spaces(rest);
        if (!rest.empty() && rest.front() == '-') {
            rest.remove_prefix(1);
            skip_spaces(rest);
            const double lc = log_from_sci(rest);
            if (lc > 0.0)
                throw std::invalid_argument("ExtProb::parse: complement above 1");
            if (lc == -kInf) return one();
            // value = 1 - c; below double resolution the slot degrades to -0
            const long double c = std::exp(static_cast<long double>(lc));
            const double lvd = (c > 1e-300L)
                                    ? std::log1p(-static_cast<double>(c))
                                    : -static_cast<double>(c);
            return ExtProb(lvd, lc);
        }
    }
    const double lv = log_from_sci(s);
    if (lv > 0.0)
        throw std::invalid_argument("ExtProb::parse: probability above 1");
    if (lv == 0.0) return one();
    if (lv == -kInf) return zero();
    return ExtProb(lv, log1m_exp(lv));
}

} // namespace typlab
