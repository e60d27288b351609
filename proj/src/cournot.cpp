#include "typlab/cournot.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "typlab/tails.hpp"

namespace typlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const long double kLn10L = 2.302585092994045684017991454684364208L;

// ln(1e-1000): the Borel universal-negligibility line
const double kBorelLog = static_cast<double>(-1000.0L * kLn10L);

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

DecExp normalized(double mantissa, long exp10) {
    require(std::isfinite(mantissa) && mantissa > 0.0,
            "DecExp: mantissa must be positive and finite");
    while (mantissa >= 10.0) {
        mantissa /= 10.0;
        ++exp10;
    }
    while (mantissa < 1.0) {
        mantissa *= 10.0;
        --exp10;
    }
    return DecExp{mantissa, exp10};
}

} // namespace

DecExp DecExp::from_double(double x) {
    return normalized(x, 0);
}

DecExp DecExp::parse(std::string_view text) {
    const std::string s(text);
    const std::size_t epos = s.find_first_of("eE");
    double mant = 0.0;
    long exp10 = 0;
    try {
        std::size_t used = 0;
        mant = std::stod(s.substr(0, epos), &used);
        if (used != (epos == std::string::npos ? s.size() : epos))
            throw std::invalid_argument("trailing characters");
        if (epos != std::string::npos) {
            std::size_t eused = 0;
            exp10 = std::stol(s.substr(epos + 1), &eused);
            if (eused != s.size() - epos - 1)
                throw std::invalid_argument("trailing characters");
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("DecExp::parse: malformed count '" + s + "'");
    }
    return normalized(mant, exp10);
}

DecExp operator*(const DecExp& a, const DecExp& b) {
    // mantissa product sits in [1,100): at most one decimal carry
    return normalized(a.mantissa * b.mantissa, a.exp10 + b.exp10);
}

double DecExp::ln() const {
    return static_cast<double>(logl((long double)mantissa) +
                               (long double)exp10 * kLn10L);
}

double DecExp::log10() const {
    return static_cast<double>(log10l((long double)mantissa) + (long double)exp10);
}

std::string DecExp::to_string() const {
    char buf[48];
    if (mantissa == 1.0) {
        std::snprintf(buf, sizeof buf, "1e%ld", exp10);
    } else {
        std::snprintf(buf, sizeof buf, "%.12ge%ld", mantissa, exp10);
    }
    return buf;
}

bool DecExp::operator<(const DecExp& o) const {
    if (exp10 != o.exp10) return exp10 < o.exp10;
    return mantissa < o.mantissa;
}

bool DecExp::operator==(const DecExp& o) const {
    return exp10 == o.exp10 && mantissa == o.mantissa;
}

CournotBudget budget(const DecExp& atoms, const DecExp& time_ratio) {
    CournotBudget b;
    b.atoms = atoms;
    b.time_ratio = time_ratio;
    b.n_max = atoms * time_ratio;

    const double target_log = -b.n_max.ln(); // ln(1/n_max)
    if (target_log >= 0.0) {
        b.sigma_max = 0.0;
    } else {
        // gaussian_tail is monotone decreasing; bisect its log against target
        double lo = 0.0;
        double hi = std::sqrt(-2.0 * target_log) + 10.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double f = gaussian_tail(mid).log_value() - target_log;
            (f > 0.0 ? lo : hi) = mid;
        }
        b.sigma_max = 0.5 * (lo + hi);
    }
    b.epsilon_max_coefficient = 0.5 * b.sigma_max;
    return b;
}

double sigma_max_hoeffding(const DecExp& n_max, double p) {
    require(std::isfinite(p) && p > 0.0 && p < 1.0,
            "sigma_max_hoeffding: p must lie in (0,1)");
    // 2 exp(-2 sigma^2 p q) = 1/n_max  =>  sigma = sqrt(ln(2 n_max)/(2 p q))
    const double l = std::log(2.0) + n_max.ln();
    if (l <= 0.0) return 0.0;
    return std::sqrt(l / (2.0 * p * (1.0 - p)));
}

const char* to_string(ProbabilityScale s) {
    switch (s) {
    case ProbabilityScale::ordinary: return "ordinary";
    case ProbabilityScale::cosmically_negligible: return "cosmically-negligible";
    case ProbabilityScale::borel_universally_negligible:
        return "borel-universally-negligible";
    }
    return "unknown";
}

ProbabilityScale classify(const ExtProb& p, const CournotBudget& b) {
    if (!p.has_complement())
        throw std::invalid_argument("classify: p must be a probability (<= 1)");
    const double lv = p.log_value();
    if (lv < kBorelLog) return ProbabilityScale::borel_universally_negligible;
    if (lv < -b.n_max.ln()) return ProbabilityScale::cosmically_negligible;
    return ProbabilityScale::ordinary;
}

RepeatResult repeat_probability(const ExtProb& p, double trials) {
    require(std::isfinite(trials) && trials >= 1.0,
            "repeat_probability: trials must be >= 1");
    if (!p.has_complement())
        throw std::invalid_argument("repeat_probability: p must be a probability (<= 1)");
    if (trials == 1.0) return {p, false}; // bit-exact identity
    if (p.is_zero()) return {ExtProb::zero(), false};
    if (p.is_one()) return {ExtProb::one(), false};

    const double lc = p.log_complement();
    const double lc_res = trials * lc;

    if (lc_res == 0.0) {
        // complement slot saturated: p (or trials*p) below its resolution;
        // work from ln(trials * p), where 1-(1-p)^T = Tp(1 - (T-1)p/2 + ...)
        // and the surviving correction is exp(x)/2 at most
        const double x = std::log(trials) + p.log_value();
        const double t = std::exp(x); // Tp, possibly a flat 0 underflow
        const double lv = x + std::log1p(-0.5 * t);
        const double lcr = (t > 0.0) ? -t : -0.0;
        return {ExtProb::from_log_pair(lv, lcr), false};
    }
    if (lc_res == -kInf) {
        // trials * |ln(1-p)| beyond double range: value indistinguishable from 1
        return {ExtProb::one(), true};
    }

    const double lv = (lc_res > -0.6931471805599453)
                          ? std::log(-std::expm1(lc_res))
                          : std::log1p(-std::exp(lc_res));
    return {ExtProb::from_log_pair(std::min(lv, 0.0), lc_res), false};
}

} // namespace typlab
