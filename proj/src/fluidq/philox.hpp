#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace fluidq {

// Philox4x32-10 (Salmon et al., SC'11). Counter-based, so every
// (key, counter) pair maps to a fixed block of output and independent
// streams need nothing more than distinct keys or counter prefixes.
class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Sequential stream over Philox blocks. The 64-bit seed is the key; the
/// upper counter words pin the stream so that (seed, stream) pairs never
/// overlap.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint32_t stream_hi, std::uint32_t stream_lo)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_hi_(stream_hi),
          stream_lo_(stream_lo) {}

    std::uint32_t next_u32() {
        if (used_ == 4) refill();
        return block_[used_++];
    }

    /// Uniform on (0, 1], 53 random bits.
    double next_open_closed() {
        const std::uint64_t hi = next_u32() >> 5;  // 27 bits
        const std::uint64_t lo = next_u32() >> 6;  // 26 bits
        const std::uint64_t bits = (hi << 26) | lo;
        return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
    }

    double next_exponential(double rate) { return -std::log(next_open_closed()) / rate; }

private:
    void refill() {
        block_ = Philox4x32::generate({static_cast<std::uint32_t>(counter_),
                                       static_cast<std::uint32_t>(counter_ >> 32), stream_lo_,
                                       stream_hi_},
                                      key_);
        ++counter_;
        used_ = 0;
    }

    Philox4x32::Key key_;
    std::uint32_t stream_hi_;
    std::uint32_t stream_lo_;
    std::uint64_t counter_ = 0;
    Philox4x32::Block block_{};
    int used_ = 4;
};

}  // namespace fluidq
