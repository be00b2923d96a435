#pragma once

#include <cstdint>
#include <random>

namespace mollify {

/// Seeded random stream: a mt19937_64 engine whose state is fully
/// determined by the 64-bit seed. Sub-streams are derived by mixing the
/// parent seed with the stream id through SplitMix64, so each layer (or
/// worker) can own an independent stream whose draws do not depend on
/// the order in which other streams are consumed.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    /// Independent child stream; deterministic in (seed, stream_id).
    RngStream substream(std::uint64_t stream_id) const;

    /// Standard normal draw.
    double normal();
    /// Uniform draw in [0, 1).
    double uniform();
    /// Uniform draw in [lo, hi).
    double uniform(double lo, double hi);
    /// Bernoulli draw; p = 0 never fires, p = 1 always fires.
    bool bernoulli(double p);
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

/// SplitMix64 mixing step (public for tests of stream derivation).
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace mollify
