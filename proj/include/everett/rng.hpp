#pragma once

// Counter-based random number streams (Philox4x64-10).
//
// Each stream is the keyed bijection E_{seed,stream}(counter): the master
// seed and a stream id (particle id, tree id, ...) form the 128-bit key, and
// blocks are generated at counter 0, 1, 2, ... Streams never share state, so
// any number of particles can be sampled in any order, on any number of
// threads, with bit-identical results.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace everett {

/// The Philox4x64 10-round bijection: 128-bit key, 256-bit counter,
/// 256 bits of output per block.
struct Philox4x64 {
    static constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    static std::array<std::uint64_t, 4> block(std::array<std::uint64_t, 2> key,
                                              std::array<std::uint64_t, 4> ctr) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const unsigned __int128 p0 =
                static_cast<unsigned __int128>(kMult0) * ctr[0];
            const unsigned __int128 p1 =
                static_cast<unsigned __int128>(kMult1) * ctr[2];
            const std::uint64_t hi0 = static_cast<std::uint64_t>(p0 >> 64);
            const std::uint64_t lo0 = static_cast<std::uint64_t>(p0);
            const std::uint64_t hi1 = static_cast<std::uint64_t>(p1 >> 64);
            const std::uint64_t lo1 = static_cast<std::uint64_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }
};

/// One independent stream keyed by (seed, stream id), with inverse-CDF draws
/// for the distributions the samplers need.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{seed, stream}, counter_{0, 0, 0, 0}, index_(4) {}

    std::uint64_t next_u64() noexcept {
        if (index_ == 4) {
            buffer_ = Philox4x64::block(key_, counter_);
            if (++counter_[0] == 0 && ++counter_[1] == 0 && ++counter_[2] == 0) {
                ++counter_[3];
            }
            index_ = 0;
        }
        return buffer_[index_++];
    }

    /// Uniform draw on (0, 1]: ((x >> 11) + 1) * 2^-53, never 0.
    double uniform01() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Exponential(lambda) via inverse CDF, -ln(u)/lambda with u in (0, 1].
    double exponential(double lambda) noexcept {
        return -std::log(uniform01()) / lambda;
    }

    /// True with probability p.
    bool bernoulli(double p) noexcept { return uniform01() <= p; }

    /// Geometric draw on {1, 2, ...} with P(i) = (1-eps) eps^(i-1):
    /// the index of the first "exit" in a run of eps-biased coin flips.
    std::uint64_t geometric_from_one(double eps) {
        if (!(eps >= 0.0) || !(eps < 1.0)) {
            throw std::domain_error("geometric_from_one: eps must lie in [0, 1)");
        }
        if (eps == 0.0) {
            return 1;
        }
        const double u = uniform01();
        // u in (eps^k, eps^(k-1)] maps to index k
        const double k = std::floor(std::log(u) / std::log(eps));
        return 1 + static_cast<std::uint64_t>(k);
    }

private:
    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> counter_;
    std::array<std::uint64_t, 4> buffer_{};
    int index_;
};

} // namespace everett
