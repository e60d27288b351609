#include "typlab/ensemble.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "typlab/rng.hpp"
#include "typlab/tails.hpp"

namespace typlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kExactLimit = 1e9; // same exact-summation ceiling as tails
constexpr double kTwoPi = 6.283185307179586476925287;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double integral_n(double n, double cap, const char* msg) {
    require(std::isfinite(n) && n >= 1.0 && n <= cap, msg);
    if (n <= 9.007199254740992e15) require(n == std::floor(n), msg);
    return n;
}

// ns*ln(ps) + nh*ln(ph) with 0*ln(0) = 0
double log_product_weight(std::uint64_t ns, std::uint64_t nh, double ps, double ph) {
    double lv = 0.0;
    if (ns > 0) {
        if (ps <= 0.0) return -kInf;
        lv += static_cast<double>(ns) * std::log(ps);
    }
    if (nh > 0) {
        if (ph <= 0.0) return -kInf;
        lv += static_cast<double>(nh) * std::log(ph);
    }
    return std::min(lv, 0.0);
}

} // namespace

BranchMeasure BranchMeasure::born(const Coin& coin) {
    BranchMeasure m;
    m.kind_ = MeasureKind::born;
    m.coin_ = coin;
    m.p_spade_ = coin.p_spade();
    return m;
}

BranchMeasure BranchMeasure::counting() {
    BranchMeasure m;
    m.kind_ = MeasureKind::counting;
    m.p_spade_ = 0.5;
    return m;
}

BranchMeasure BranchMeasure::f_weighted(const Coin& coin, double f_spade,
                                        double f_heart) {
    require(std::isfinite(f_spade) && f_spade >= 0.0,
            "BranchMeasure::f_weighted: f_spade must be >= 0");
    require(std::isfinite(f_heart) && f_heart >= 0.0,
            "BranchMeasure::f_weighted: f_heart must be >= 0");
    const double mass = f_spade * coin.p_spade() + f_heart * coin.p_heart();
    require(std::abs(mass - 1.0) <= 1e-10,
            "BranchMeasure::f_weighted: f weights must normalize to unit mass");
    BranchMeasure m;
    m.kind_ = MeasureKind::f_weighted;
    m.coin_ = coin;
    m.f_spade_ = f_spade;
    m.f_heart_ = f_heart;
    m.p_spade_ = f_spade * coin.p_spade();
    return m;
}

ExtProb history_weight(const HistoryStats& stats, const BranchMeasure& m) {
    switch (m.kind()) {
    case MeasureKind::counting: {
        const double n = static_cast<double>(stats.n());
        return ExtProb::from_log(n == 0.0 ? 0.0 : -n * 0.6931471805599453);
    }
    case MeasureKind::born: {
        const Coin& c = *m.coin();
        return ExtProb::from_log(
            log_product_weight(stats.n_spade, stats.n_heart, c.p_spade(), c.p_heart()));
    }
    case MeasureKind::f_weighted: {
        const Coin& c = *m.coin();
        return ExtProb::from_log(log_product_weight(stats.n_spade, stats.n_heart,
                                                    m.f_spade() * c.p_spade(),
                                                    m.f_heart() * c.p_heart()));
    }
    }
    throw std::logic_error("history_weight: unreachable");
}

ExtProb history_weight(const History& h, const BranchMeasure& m) {
    return history_weight(history_stats(h), m);
}

FWeights fit_f(const Coin& coin, double q_target) {
    require(std::isfinite(q_target) && q_target >= 0.0 && q_target <= 1.0,
            "fit_f: q_target must lie in [0,1]");
    const double ps = coin.p_spade();
    const double ph = coin.p_heart();
    FWeights w{0.0, 0.0};
    if (q_target > 0.0) {
        require(ps > 0.0, "fit_f: q_target > 0 needs a nonzero spade amplitude");
        w.f_spade = q_target / ps;
    }
    if (q_target < 1.0) {
        require(ph > 0.0, "fit_f: q_target < 1 needs a nonzero heart amplitude");
        w.f_heart = (1.0 - q_target) / ph;
    }
    return w;
}

BranchEnsemble BranchEnsemble::enumerate(const Coin& coin, unsigned n,
                                         unsigned cap, unsigned threads) {
    require(cap >= 1 && cap <= 24, "BranchEnsemble: cap must lie in [1,24]");
    require(n >= 1 && n <= cap, "BranchEnsemble: n beyond the enumeration cap");
    threads = std::clamp(threads, 1u, 64u);

    const std::uint64_t total = std::uint64_t(1) << n;
    std::vector<std::vector<std::uint64_t>> local(
        threads, std::vector<std::uint64_t>(n + 1, 0));
    {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (total + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::uint64_t lo = t * chunk;
            const std::uint64_t hi = std::min(total, lo + chunk);
            pool.emplace_back([lo, hi, &tally = local[t]] {
                for (std::uint64_t id = lo; id < hi; ++id)
                    ++tally[static_cast<unsigned>(std::popcount(id))];
            });
        }
        for (auto& th : pool) th.join();
    }

    BranchEnsemble e;
    e.coin_ = coin;
    e.n_ = n;
    e.tally_.assign(n + 1, 0);
    for (unsigned k = 0; k <= n; ++k) // merge in count order
        for (unsigned t = 0; t < threads; ++t) e.tally_[k] += local[t][k];

    e.mass_.resize(n + 1);
    const double ps = coin.p_spade(), ph = coin.p_heart();
    for (unsigned k = 0; k <= n; ++k) {
        const double lw = log_product_weight(k, n - k, ps, ph);
        if (lw == -kInf || e.tally_[k] == 0) {
            e.mass_[k] = ExtProb::zero();
        } else {
            const double lv = std::log(static_cast<double>(e.tally_[k])) + lw;
            e.mass_[k] = ExtProb::from_log(std::min(lv, 0.0));
        }
    }
    return e;
}

unsigned BranchEnsemble::spade_count(std::uint64_t id) const {
    require(id < size(), "BranchEnsemble: branch id out of range");
    return static_cast<unsigned>(std::popcount(id));
}

double BranchEnsemble::log_amp_magnitude(std::uint64_t id) const {
    const unsigned k = spade_count(id);
    const double ma = std::abs(coin_.a()), mb = std::abs(coin_.b());
    double l = 0.0;
    if (k > 0) l += (ma > 0.0) ? k * std::log(ma) : -kInf;
    if (n_ - k > 0) l += (mb > 0.0) ? (n_ - k) * std::log(mb) : -kInf;
    return l;
}

double BranchEnsemble::amp_phase(std::uint64_t id) const {
    const unsigned k = spade_count(id);
    const double ph = k * std::arg(coin_.a()) + (n_ - k) * std::arg(coin_.b());
    return std::remainder(ph, kTwoPi);
}

ExtProb BranchEnsemble::weight(std::uint64_t id) const {
    const unsigned k = spade_count(id);
    return ExtProb::from_log(
        log_product_weight(k, n_ - k, coin_.p_spade(), coin_.p_heart()));
}

std::uint64_t BranchEnsemble::ids_with_count(unsigned k) const {
    require(k <= n_, "BranchEnsemble: spade count out of range");
    return tally_[k];
}

ExtProb BranchEnsemble::mass_at_count(unsigned k) const {
    require(k <= n_, "BranchEnsemble: spade count out of range");
    return mass_[k];
}

ExtProb BranchEnsemble::total_mass() const {
    return ExtProb::sum(std::span<const ExtProb>(mass_));
}

namespace {

void validate_band_params(double reference_p, double sigma_max) {
    if (!(std::isfinite(reference_p) && reference_p > 0.0 && reference_p < 1.0))
        throw std::invalid_argument("mangle: reference_p must lie in (0,1)");
    if (!(std::isfinite(sigma_max) && sigma_max > 0.0))
        throw std::invalid_argument("mangle: sigma_max must be > 0");
}

} // namespace

MangledEnsemble mangle(const BranchEnsemble& e, double reference_p,
                       double sigma_max, bool renormalize) {
    validate_band_params(reference_p, sigma_max);
    const double n = e.n();
    const double width = sigma_max * std::sqrt(n * reference_p * (1.0 - reference_p));
    const BandEdges band =
        band_interior(n, n * reference_p, width, /*closed=*/true);

    MangledEnsemble m;
    m.base_ = e;
    m.reference_p_ = reference_p;
    m.sigma_max_ = sigma_max;
    m.renormalized_ = renormalize;
    m.band_lo_ = band.lo;
    m.band_hi_ = band.hi;

    std::vector<ExtProb> kept;
    for (long long k = band.lo; k <= band.hi; ++k)
        kept.push_back(e.mass_at_count(static_cast<unsigned>(k)));
    m.retained_ = kept.empty() ? ExtProb::zero()
                               : ExtProb::sum(std::span<const ExtProb>(kept));
    if (m.retained_.is_zero())
        throw std::runtime_error("mangle: no branch survives the boxcar");
    return m;
}

bool MangledEnsemble::survives_count(unsigned k) const {
    return static_cast<long long>(k) >= band_lo_ &&
           static_cast<long long>(k) <= band_hi_;
}

bool MangledEnsemble::survives(std::uint64_t id) const {
    return survives_count(base_.spade_count(id));
}

double MangledEnsemble::renorm_log() const {
    return renormalized_ ? -0.5 * retained_.log_value() : 0.0;
}

double MangledEnsemble::log_amp_magnitude(std::uint64_t id) const {
    if (!survives(id)) return -kInf;
    return base_.log_amp_magnitude(id) + renorm_log();
}

ExtProb MangledEnsemble::weight(std::uint64_t id) const {
    if (!survives(id)) return ExtProb::zero();
    const double lv = base_.weight(id).log_value() + 2.0 * renorm_log();
    return ExtProb::from_log(std::min(lv, 0.0));
}

namespace {

// ln P(a <= K <= b) under Bin(n,p) through the normal limit, in logs so
// bands out at hundreds of sigmas keep their exponents.
double log_gaussian_band(double n, double p, double a, double b) {
    const double s = std::sqrt(n * p * (1.0 - p));
    const double za = (a - n * p) / s;
    const double zb = (b - n * p) / s;
    // P = sf(za) - sf(zb)
    return log_diff_exp(log_normal_sf(za), log_normal_sf(zb));
}

double log_gaussian_band_outside(double n, double p, double a, double b) {
    const double s = std::sqrt(n * p * (1.0 - p));
    const double za = (a - n * p) / s;
    const double zb = (b - n * p) / s;
    // below a plus above b
    return log_sum_exp(log_normal_sf(-za), log_normal_sf(zb));
}

} // namespace

MangleSummary mangle_aggregated(double n, double born_p, double reference_p,
                                double sigma_max) {
    validate_band_params(reference_p, sigma_max);
    integral_n(n, 1e24, "mangle_aggregated: n must be an integer >= 1");
    if (!(std::isfinite(born_p) && born_p >= 0.0 && born_p <= 1.0))
        throw std::invalid_argument("mangle_aggregated: born_p must lie in [0,1]");

    MangleSummary s;
    s.n = n;
    s.born_p = born_p;
    s.reference_p = reference_p;
    s.sigma_max = sigma_max;

    const double width =
        sigma_max * std::sqrt(n * reference_p * (1.0 - reference_p));
    const BandEdges band = band_interior(n, n * reference_p, width, /*closed=*/true);
    s.band_lo = band.lo;
    s.band_hi = band.hi;

    if (band.empty())
        throw std::runtime_error("mangle_aggregated: no branch survives the boxcar");

    if (n <= kExactLimit) {
        const double inside = log_pmf_range_sum(n, born_p, band.lo, band.hi);
        const double below = log_pmf_range_sum(n, born_p, 0, band.lo - 1);
        const double above = log_pmf_range_sum(n, born_p, band.hi + 1,
                                               static_cast<long long>(n));
        s.retained = ExtProb::from_log_pair(std::min(inside, 0.0),
                                            std::min(log_sum_exp(below, above), 0.0));
    } else {
        s.asymptotic = true;
        const double lo = static_cast<double>(band.lo) - 0.5; // continuity correction
        const double hi = static_cast<double>(band.hi) + 0.5;
        s.retained = ExtProb::from_log_pair(
            std::min(log_gaussian_band(n, born_p, lo, hi), 0.0),
            std::min(log_gaussian_band_outside(n, born_p, lo, hi), 0.0));
    }
    if (s.retained.is_zero())
        throw std::runtime_error("mangle_aggregated: no branch survives the boxcar");
    s.renorm_log = -0.5 * s.retained.log_value();
    return s;
}

TypicalitySummary typical_set(double n, const BranchMeasure& m, double epsilon,
                              std::optional<double> center) {
    integral_n(n, 1e24, "typical_set: n must be an integer >= 1");
    require(std::isfinite(epsilon) && epsilon > 0.0 && epsilon < 1.0,
            "typical_set: epsilon must lie in (0,1)");
    const double c = center.value_or(m.p_spade());
    require(std::isfinite(c) && c >= 0.0 && c <= 1.0,
            "typical_set: center must lie in [0,1]");

    TypicalitySummary t;
    t.n = n;
    t.epsilon = epsilon;
    t.center = c;

    const BandEdges band = band_interior(n, n * c, n * epsilon, /*closed=*/false);
    auto band_fraction = [&](double p) {
        if (band.empty()) return ExtProb::zero();
        if (n <= kExactLimit) {
            const double inside = log_pmf_range_sum(n, p, band.lo, band.hi);
            const double below = log_pmf_range_sum(n, p, 0, band.lo - 1);
            const double above =
                log_pmf_range_sum(n, p, band.hi + 1, static_cast<long long>(n));
            return ExtProb::from_log_pair(std::min(inside, 0.0),
                                          std::min(log_sum_exp(below, above), 0.0));
        }
        t.asymptotic = true;
        // open band: boundary counts sit in the tail; half-integer offsets
        // keep the continuity convention consistent with the closed case
        const double lo = static_cast<double>(band.lo) - 0.5;
        const double hi = static_cast<double>(band.hi) + 0.5;
        return ExtProb::from_log_pair(
            std::min(log_gaussian_band(n, p, lo, hi), 0.0),
            std::min(log_gaussian_band_outside(n, p, lo, hi), 0.0));
    };

    t.measure_fraction = band_fraction(m.p_spade());
    t.count_fraction = band_fraction(0.5);
    return t;
}

namespace {

std::uint64_t draw_binomial(Philox& g, double n, double p, bool& approx) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return static_cast<std::uint64_t>(n);

    if (n > 1e6) {
        // Box-Muller normal with continuity correction (rounding to the
        // nearest count is the correction)
        approx = true;
        const double u1 = g.next_unit();
        const double u2 = g.next_unit();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
        const double k = std::round(n * p + z * std::sqrt(n * p * (1.0 - p)));
        return static_cast<std::uint64_t>(std::clamp(k, 0.0, n));
    }

    // exact inversion anchored at the mode, expanding to whichever side
    // still carries the larger pmf
    const long long nn = static_cast<long long>(n);
    long long mode = static_cast<long long>(std::floor((n + 1.0) * p));
    mode = std::clamp(mode, 0LL, nn);
    const double lpm = log_binomial_pmf(n, p, static_cast<double>(mode));
    const double u = g.next_unit();

    const double q = 1.0 - p;
    double acc = std::exp(lpm);
    if (u <= acc) return static_cast<std::uint64_t>(mode);
    long long lo = mode, hi = mode;
    double plo = acc, phi = acc;
    while (true) {
        // candidate pmfs one step out on each side (0 when exhausted)
        const double next_lo =
            (lo > 0) ? plo * (static_cast<double>(lo) * q) /
                           ((n - static_cast<double>(lo) + 1.0) * p)
                     : 0.0;
        const double next_hi =
            (hi < nn) ? phi * ((n - static_cast<double>(hi)) * p) /
                            ((static_cast<double>(hi) + 1.0) * q)
                      : 0.0;
        if (next_lo <= 0.0 && next_hi <= 0.0)
            return static_cast<std::uint64_t>(hi); // u within rounding of 1
        long long k;
        if (next_lo >= next_hi) {
            plo = next_lo;
            k = --lo;
            acc += plo;
        } else {
            phi = next_hi;
            k = ++hi;
            acc += phi;
        }
        if (u <= acc) return static_cast<std::uint64_t>(k);
    }
}

} // namespace

SampleResult sample_histories(const Coin& /*coin*/, double n, const BranchMeasure& m,
                              std::uint64_t count, std::uint64_t seed) {
    integral_n(n, 9.007199254740992e15, "sample_histories: n must be an integer >= 1");
    require(count >= 1 && count <= 100000000ull,
            "sample_histories: count must lie in [1, 1e8]");

    SampleResult r;
    r.draws.reserve(count);
    const double p = m.p_spade();
    const std::uint64_t nn = static_cast<std::uint64_t>(n);
    for (std::uint64_t i = 0; i < count; ++i) {
        Philox g(seed, i); // stream per draw: splittable and order-free
        const std::uint64_t k = draw_binomial(g, n, p, r.gaussian_approx);
        r.draws.push_back(HistoryStats{k, nn - k});
    }
    return r;
}

} // namespace typlab
