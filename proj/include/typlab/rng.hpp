#pragma once

#include <array>
#include <cstdint>

namespace typlab {

// Philox4x32-10: a counter-based generator.  Output is a fixed bijection of
// (counter, key), so a (seed, stream) pair names a reproducible stream that
// can be split without coordination and replays identically everywhere.
class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    // 53-bit uniform strictly inside (0,1); safe for inversion and logs
    double next_unit();

private:
    void refill();

    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> block_;
    unsigned pos_;
};

} // namespace typlab
