#pragma once

#include <cstdint>
#include <limits>

namespace sbm {

/// SplitMix64 finalizer; used to derive independent stream keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key-derived random stream (xoshiro256** seeded from mix64 of the key).
///
/// A stream is identified by (seed, stream_id); two streams with different
/// keys are statistically independent, and the sequence produced by a stream
/// does not depend on which thread runs it. Satisfies
/// UniformRandomBitGenerator so it can feed <random> distributions.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on the open interval (0, 1).
    double uniform();
    double normal();
    /// Exp(1) variate.
    double exponential();
    std::uint64_t poisson(double mean);
    /// Gamma(shape, 1) for shape > 0.
    double gamma(double shape);

    /// Child stream keyed on this stream's key and `id`; does not advance this stream.
    RngStream derive(std::uint64_t id) const;

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t s_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Inverse CDF of Poisson(mean) at u in (0,1); monotone in both arguments.
std::uint64_t poisson_quantile(double mean, double u);
/// Inverse CDF of Gamma(shape, 1) at u in (0,1).
double gamma_quantile(double shape, double u);

}  // namespace sbm
