#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace typlab {

enum class Outcome : std::uint8_t { spade = 0, heart = 1 };

// Explicit outcome sequence.  Materialization is capped at 2^20 throws; runs
// beyond that are represented by their HistoryStats counts only (every
// downstream quantity depends on the sequence through its counts anyway).
class History {
public:
    static constexpr std::size_t kMaxLength = 1u << 20;

    History() = default;
    explicit History(std::vector<Outcome> outcomes);

    // "SSHS..." over the alphabet S (spade) / H (heart)
    static History from_string(std::string_view text);
    // bit i of id set = spade at throw i; the index convention the
    // enumeration tables use
    static History from_index(std::uint64_t id, unsigned n);

    const std::vector<Outcome>& outcomes() const { return outcomes_; }
    std::size_t size() const { return outcomes_.size(); }
    std::string to_string() const;

private:
    std::vector<Outcome> outcomes_;
};

// Count summary of a run; addition under concatenation.
struct HistoryStats {
    std::uint64_t n_spade = 0;
    std::uint64_t n_heart = 0;

    std::uint64_t n() const { return n_spade + n_heart; }
    double q_spade() const; // relative frequency; throws on an empty record
    // exact reduced fraction n_spade / n
    std::pair<std::uint64_t, std::uint64_t> q_spade_ratio() const;
};

HistoryStats history_stats(const History& h);
HistoryStats compose(const HistoryStats& a, const HistoryStats& b);

} // namespace typlab
