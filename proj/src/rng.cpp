#include "sbmlab/rng.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <stdexcept>

namespace sbm {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : key_(mix64(mix64(seed) ^ (stream_id * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL))) {
    std::uint64_t z = key_;
    for (auto& s : s_) {
        z = mix64(z);
        s = z;
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

RngStream::result_type RngStream::operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform() {
    // 53 random bits mapped to the centre of each cell: never 0 or 1.
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

double RngStream::exponential() { return -std::log(uniform()); }

std::uint64_t RngStream::poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    if (mean < 12.0) {
        const double limit = std::exp(-mean);
        double prod = uniform();
        std::uint64_t k = 0;
        while (prod > limit) {
            prod *= uniform();
            ++k;
        }
        return k;
    }
    // Transformed rejection with squeeze (Hormann's PTRS).
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double log_invalpha = std::log(1.1239 + 1.1328 / (b - 3.4));
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + log_invalpha - std::log(a / (us * us) + b) <= -mean + k * loglam - std::lgamma(k + 1.0))
            return static_cast<std::uint64_t>(k);
    }
}

double RngStream::gamma(double shape) {
    if (!(shape > 0.0)) throw std::domain_error("gamma shape must be positive");
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    // Marsaglia-Tsang
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

RngStream RngStream::derive(std::uint64_t id) const { return RngStream(key_, id); }

std::uint64_t poisson_quantile(double mean, double u) {
    if (!(mean > 0.0)) return 0;
    // P(N <= k) = Q(k + 1, mean); start near the normal approximation and walk.
    const double guess = std::max(0.0, std::floor(mean + std::sqrt(mean) * (u - 0.5) * 2.5));
    auto cdf = [mean](std::uint64_t k) {
        return boost::math::gamma_q(static_cast<double>(k) + 1.0, mean);
    };
    std::uint64_t k = static_cast<std::uint64_t>(guess);
    if (cdf(k) >= u) {
        while (k > 0 && cdf(k - 1) >= u) --k;
    } else {
        while (cdf(k) < u) ++k;
    }
    return k;
}

double gamma_quantile(double shape, double u) { return boost::math::gamma_p_inv(shape, u); }

}  // namespace sbm
