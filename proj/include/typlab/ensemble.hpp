#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "typlab/coin.hpp"
#include "typlab/extprob.hpp"
#include "typlab/history.hpp"

namespace typlab {

enum class MeasureKind { born, counting, f_weighted };

// Weight rule for a history of coin throws:
//   born       product of |a|^2 / |b|^2 per outcome
//   counting   uniform 2^-n (every branch counts once)
//   f_weighted (f_s|a|^2)^Ns (f_h|b|^2)^Nh, with f_s|a|^2 + f_h|b|^2 = 1
class BranchMeasure {
public:
    static BranchMeasure born(const Coin& coin);
    static BranchMeasure counting();
    static BranchMeasure f_weighted(const Coin& coin, double f_spade, double f_heart);

    MeasureKind kind() const { return kind_; }
    // induced per-throw spade mass: |a|^2, 1/2, or f_s|a|^2
    double p_spade() const { return p_spade_; }
    double f_spade() const { return f_spade_; }
    double f_heart() const { return f_heart_; }
    const std::optional<Coin>& coin() const { return coin_; }

private:
    BranchMeasure() = default;
    MeasureKind kind_ = MeasureKind::counting;
    std::optional<Coin> coin_;
    double f_spade_ = 1.0;
    double f_heart_ = 1.0;
    double p_spade_ = 0.5;
};

ExtProb history_weight(const HistoryStats& stats, const BranchMeasure& m);
ExtProb history_weight(const History& h, const BranchMeasure& m);

struct FWeights {
    double f_spade;
    double f_heart;
};

// Weights that tilt the per-throw spade mass to q_target: f_s = q/|a|^2,
// f_h = (1-q)/|b|^2.  Normalization holds by construction.
FWeights fit_f(const Coin& coin, double q_target);

// Full sweep of the 2^n branch space.  Per-branch data (amplitude, weight)
// derive from the spade count = popcount of the branch index, so the sweep
// stores only the per-count tallies; workers own disjoint index ranges and
// the merge is by count order, making the result independent of the worker
// count.
class BranchEnsemble {
public:
    static constexpr unsigned kDefaultCap = 24;

    static BranchEnsemble enumerate(const Coin& coin, unsigned n,
                                    unsigned cap = kDefaultCap,
                                    unsigned threads = 1);

    unsigned n() const { return n_; }
    const Coin& coin() const { return coin_; }
    std::uint64_t size() const { return std::uint64_t(1) << n_; }

    unsigned spade_count(std::uint64_t id) const;
    // amplitude of branch id in log-magnitude / phase form
    double log_amp_magnitude(std::uint64_t id) const;
    double amp_phase(std::uint64_t id) const;
    ExtProb weight(std::uint64_t id) const; // Born |amplitude|^2

    std::uint64_t ids_with_count(unsigned k) const;
    ExtProb mass_at_count(unsigned k) const; // tally * per-branch weight
    ExtProb total_mass() const;              // should be 1 to rounding

private:
    friend class MangledEnsemble;
    BranchEnsemble() = default;
    Coin coin_ = Coin::make({1.0, 0.0}, {0.0, 0.0});
    unsigned n_ = 0;
    std::vector<std::uint64_t> tally_;   // ids per spade count
    std::vector<ExtProb> mass_;          // Born mass per spade count
};

// Boxcar projection of an ensemble: branches whose frequency deviates from
// reference_p by more than sigma_max fluctuation units are zeroed (the
// boundary survives).  Unrenormalized unless asked: the lost mass is the
// point, so the default keeps it visible.
class MangledEnsemble {
public:
    const BranchEnsemble& base() const { return base_; }
    double reference_p() const { return reference_p_; }
    double sigma_max() const { return sigma_max_; }
    bool renormalized() const { return renormalized_; }

    bool survives_count(unsigned k) const;
    bool survives(std::uint64_t id) const;
    ExtProb retained() const { return retained_; } // Born mass kept
    // ln of the 1/sqrt(retained) amplitude factor (0 when not renormalizing)
    double renorm_log() const;

    double log_amp_magnitude(std::uint64_t id) const; // -inf when zeroed
    ExtProb weight(std::uint64_t id) const;

private:
    friend MangledEnsemble mangle(const BranchEnsemble&, double, double, bool);
    BranchEnsemble base_;
    double reference_p_ = 0.5;
    double sigma_max_ = 0.0;
    bool renormalized_ = false;
    long long band_lo_ = 0;
    long long band_hi_ = 0;
    ExtProb retained_;
};

MangledEnsemble mangle(const BranchEnsemble& e, double reference_p,
                       double sigma_max, bool renormalize = false);

// Count-aggregated mangle for n beyond the materialization cap; exact band
// sums to n = 1e9, Gaussian band mass (flagged) above.
struct MangleSummary {
    double n = 0;
    double born_p = 0;
    double reference_p = 0;
    double sigma_max = 0;
    long long band_lo = 0; // surviving count range
    long long band_hi = 0;
    ExtProb retained;
    double renorm_log = 0;
    bool asymptotic = false;
};

MangleSummary mangle_aggregated(double n, double born_p, double reference_p,
                                double sigma_max);

struct TypicalitySummary {
    double n = 0;
    double epsilon = 0;
    double center = 0;
    ExtProb measure_fraction; // measure of the open band |Q - center| < eps
    ExtProb count_fraction;   // share of the 2^n histories in that band
    bool asymptotic = false;  // n > 1e9: Gaussian band masses
};

// The band boundary belongs to the tail (strict interior), so the fraction
// is exactly the complement of the inclusive two-sided tail.
TypicalitySummary typical_set(double n, const BranchMeasure& m, double epsilon,
                              std::optional<double> center = std::nullopt);

struct SampleResult {
    std::vector<HistoryStats> draws;
    bool gaussian_approx = false; // n > 1e6: normal draw + continuity correction
};

// Deterministic sampling: draw i uses Philox stream (seed, i), binomial
// inversion anchored at the mode for n <= 1e6.
SampleResult sample_histories(const Coin& coin, double n, const BranchMeasure& m,
                              std::uint64_t count, std::uint64_t seed);

} // namespace typlab
