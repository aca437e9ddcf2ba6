#pragma once

// Philox4x32-10 counter-based generator. A stream is identified by
// (seed, stream index); blocks are addressed by a 64-bit counter, so streams
// are independent of the order in which they are consumed.

#include <array>
#include <cmath>
#include <cstdint>

namespace levycalc {

using PhiloxBlock = std::array<std::uint32_t, 4>;

/// One Philox4x32-10 evaluation.
constexpr PhiloxBlock philox4x32(PhiloxBlock ctr, std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

    std::uint32_t next_u32() {
        if (used_ == 4) refill();
        return block_[used_++];
    }

    /// Uniform on (0, 1) with 53 random bits.
    double uniform() {
        const std::uint64_t a = next_u32() >> 5;
        const std::uint64_t b = next_u32() >> 6;
        return (static_cast<double>(a * 67108864u + b) + 0.5) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform()); }

    /// Standard normal by Box-Muller; the second variate is cached.
    double normal() {
        if (haveSpare_) {
            haveSpare_ = false;
            return spare_;
        }
        const double u = uniform();
        const double v = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u));
        const double ang = 6.283185307179586476925 * v;
        spare_ = rad * std::sin(ang);
        haveSpare_ = true;
        return rad * std::cos(ang);
    }

private:
    void refill() {
        block_ = philox4x32({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                             static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                            key_);
        ++counter_;
        used_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    PhiloxBlock block_{};
    int used_ = 4;
    bool haveSpare_ = false;
    double spare_ = 0.0;
};

}  // namespace levycalc
