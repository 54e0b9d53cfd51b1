#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace knnd {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
//
// The 64-bit seed is the cipher key; the 128-bit counter is split into a
// 64-bit block index (low words) and a 64-bit stream id (high words), so
// streams with distinct (seed, stream) pairs never overlap and can be
// consumed concurrently in any order. Replicate r of an experiment uses
// stream r; resamples use substream(r, retry).
class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    // Stream id for retry t of replicate r. Replicate indices stay below
    // 2^48 so the retry count never collides with another replicate.
    static constexpr std::uint64_t substream(std::uint64_t replicate, std::uint64_t retry) noexcept {
        return replicate | (retry << 48);
    }

    std::uint64_t next_u64() noexcept {
        if (pos_ >= 4) refill();
        std::uint64_t lo = buf_[pos_++];
        std::uint64_t hi = buf_[pos_++];
        return lo | (hi << 32);
    }

    // Uniform on [0,1) with 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % bound;
    }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double next_gaussian() noexcept {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1, u2;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    // Exact Poisson draw. Means above 16 are split into chunks and summed
    // (Poisson additivity), so the product-method inversion below never
    // works with an underflowing exp(-mean).
    std::int64_t next_poisson(double mean) noexcept {
        std::int64_t total = 0;
        while (mean > 16.0) {
            total += poisson_small(16.0);
            mean -= 16.0;
        }
        return total + poisson_small(mean);
    }

private:
    std::int64_t poisson_small(double mean) noexcept {
        if (mean <= 0.0) return 0;
        const double threshold = std::exp(-mean);
        std::int64_t count = -1;
        double prod = 1.0;
        do {
            ++count;
            prod *= next_double();
        } while (prod > threshold);
        return count;
    }

    static void mul_hilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }

    void refill() noexcept {
        std::array<std::uint32_t, 4> c{static_cast<std::uint32_t>(block_),
                                       static_cast<std::uint32_t>(block_ >> 32),
                                       stream_lo_, stream_hi_};
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mul_hilo(0xD2511F53u, c[0], hi0, lo0);
            mul_hilo(0xCD9E8D57u, c[2], hi1, lo1);
            c = {hi1 ^ c[1] ^ k0, lo1, hi0 ^ c[3] ^ k1, lo0};
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_ = c;
        pos_ = 0;
        ++block_;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace knnd
