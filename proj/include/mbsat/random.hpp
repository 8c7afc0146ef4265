#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mbsat {

/// Seeded pseudo-random stream.
///
/// Substreams are derived from the stream's seed (not its current state), so
/// `split("filter", 2)` yields the same sequence regardless of how many draws
/// the parent has made. `fork()` consumes one draw and is used when a fresh,
/// call-dependent stream is needed.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0);

    [[nodiscard]] std::uint64_t seed() const { return seed_; }

    [[nodiscard]] RandomStream split(std::string_view name, std::uint64_t index = 0) const;
    [[nodiscard]] RandomStream split(std::uint64_t key) const;
    [[nodiscard]] RandomStream fork();

    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);   // [lo, hi)
    double normal();                        // N(0, 1)
    double normal(double mean, double stddev);
    std::uint64_t poisson(double mean);
    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    std::uint64_t next_u64() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix64(std::uint64_t x);

} // namespace mbsat
