#pragma once

#include <cmath>
#include <cstdint>

namespace sklab::rng {

/// Philox4x32-10 counter-based generator. Each (seed, stream) pair yields an
/// independent sequence, so per-trial streams are reproducible regardless of
/// how trials are scheduled across threads.
class Philox {
public:
    Philox(std::uint64_t seed, std::uint64_t stream) {
        key_[0] = static_cast<std::uint32_t>(seed);
        key_[1] = static_cast<std::uint32_t>(seed >> 32);
        ctr_[2] = static_cast<std::uint32_t>(stream);
        ctr_[3] = static_cast<std::uint32_t>(stream >> 32);
    }

    std::uint32_t next_u32() {
        if (have_ == 0) {
            refill();
            have_ = 4;
        }
        return block_[4 - have_--];
    }

    /// Uniform in (0, 1): 53-bit mantissa, never exactly 0 or 1.
    double next_uniform() {
        const std::uint64_t hi = next_u32(), lo = next_u32();
        return (((hi << 21) | (lo >> 11)) + 0.5) * 0x1p-53;
    }

    /// Standard normal via Box-Muller; draws are generated in pairs.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform(), u2 = next_uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        spare_ = rad * std::sin(ang);
        has_spare_ = true;
        return rad * std::cos(ang);
    }

private:
    static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b) {
        return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
    }

    void refill() {
        std::uint32_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint32_t lo0 = 0xD2511F53u * c0;
            const std::uint32_t hi0 = mulhi(0xD2511F53u, c0);
            const std::uint32_t lo1 = 0xCD9E8D57u * c2;
            const std::uint32_t hi1 = mulhi(0xCD9E8D57u, c2);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        block_[0] = c0;
        block_[1] = c1;
        block_[2] = c2;
        block_[3] = c3;
        if (++ctr_[0] == 0 && ++ctr_[1] == 0) ++ctr_[2];
    }

    std::uint32_t key_[2] = {0, 0};
    std::uint32_t ctr_[4] = {0, 0, 0, 0};
    std::uint32_t block_[4] = {0, 0, 0, 0};
    int have_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace sklab::rng
