#include "typlab/history.hpp"

#include <numeric>
#include <stdexcept>

namespace typlab {

History::History(std::vector<Outcome> outcomes) : outcomes_(std::move(outcomes)) {
    if (outcomes_.size() > kMaxLength)
        throw std::invalid_argument(
            "History: length beyond the 2^20 materialization cap");
}

History History::from_string(std::string_view text) {
    std::vector<Outcome> v;
    v.reserve(text.size());
    for (char c : text) {
        if (c == 'S')
            v.push_back(Outcome::spade);
        else if (c == 'H')
            v.push_back(Outcome::heart);
        else
            throw std::invalid_argument("History::from_string: expected only S or H");
    }
    return History(std::move(v));
}

History History::from_index(std::uint64_t id, unsigned n) {
    if (n > 63 || (n < 64 && id >= (1ull << n)))
        throw std::invalid_argument("History::from_index: id out of range for n");
    std::vector<Outcome> v;
    v.reserve(n);
    for (unsigned i = 0; i < n; ++i)
        v.push_back((id >> i) & 1u ? Outcome::spade : Outcome::heart);
    return History(std::move(v));
}

std::string History::to_string() const {
    std::string s;
    s.reserve(outcomes_.size());
    for (Outcome o : outcomes_)
        s.push_back(o == Outcome::spade ? 'S' : 'H');
    return s;
}

double HistoryStats::q_spade() const {
    if (n() == 0)
        throw std::invalid_argument("HistoryStats::q_spade: empty record");
    return static_cast<double>(n_spade) / static_cast<double>(n());
}

std::pair<std::uint64_t, std::uint64_t> HistoryStats::q_spade_ratio() const {
    if (n() == 0)
        throw std::invalid_argument("HistoryStats::q_spade_ratio: empty record");
    const std::uint64_t g = std::gcd(n_spade, n());
    return {n_spade / g, n() / g};
}

HistoryStats history_stats(const History& h) {
    HistoryStats s;
    for (Outcome o : h.outcomes())
        (o == Outcome::spade ? s.n_spade : s.n_heart)++;
    return s;
}

HistoryStats compose(const HistoryStats& a, const HistoryStats& b) {
    return HistoryStats{a.n_spade + b.n_spade, a.n_heart + b.n_heart};
}

} // namespace typlab
