#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace xyl {

// Philox4x32-10 block function (Salmon et al. 2011).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t p0 = std::uint64_t(m0) * ctr[0];
        std::uint64_t p1 = std::uint64_t(m1) * ctr[2];
        std::array<std::uint32_t, 4> next{
            std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
            std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
        ctr = next;
        key[0] += w0;
        key[1] += w1;
    }
    return ctr;
}

// Counter-based stream. A stream is addressed by (seed, a, b, c); draws within
// a stream advance a block counter. Streams with different addresses are
// independent, so work can be split without sharing state.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint32_t a = 0, std::uint32_t b = 0, std::uint32_t c = 0)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)}, a_(a), b_(b), c_(c) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (have_ == 0) {
            block_ = philox4x32({counter_, a_, b_, c_}, key_);
            ++counter_;
            have_ = 2;
        }
        --have_;
        std::size_t i = have_ == 1 ? 0 : 2;
        return (std::uint64_t(block_[i]) << 32) | block_[i + 1];
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1].
    double uniform_pos() { return double(((*this)() >> 11) + 1) * 0x1.0p-53; }

    // Unbiased integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % n;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t a_, b_, c_;
    std::uint32_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int have_ = 0;
};

}  // namespace xyl
