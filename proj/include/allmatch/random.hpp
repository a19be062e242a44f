#pragma once

#include <cstdint>
#include <random>

#include "errors.hpp"

namespace allmatch {

/// Deterministic random source identified by (seed, stream id).
/// Equal identifiers give equal draw sequences.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                          0x9e3779b9U};
        engine_.seed(seq);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift with
    /// rejection, so there is no modulo bias.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw domain_error("empty range for a bounded draw");
        unsigned __int128 product = static_cast<unsigned __int128>(next()) * bound;
        auto low = static_cast<std::uint64_t>(product);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                product = static_cast<unsigned __int128>(next()) * bound;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    /// True with probability num/den exactly (0 <= num <= den, den > 0).
    bool bernoulli(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

} // namespace allmatch
