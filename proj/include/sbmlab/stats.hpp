#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sbm {

/// Sum / sum-of-squares accumulator. Merging in a fixed order gives
/// bit-identical results regardless of how the samples were produced.
struct Accumulator {
    std::size_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double x) {
        ++count;
        sum += x;
        sum_sq += x * x;
    }
    void merge(const Accumulator& other) {
        count += other.count;
        sum += other.sum;
        sum_sq += other.sum_sq;
    }
    double mean() const;
    /// Sample variance (n - 1 denominator).
    double variance() const;
    double stderr_of_mean() const;
};

/// sup |F_n - F| for the given samples (sorted internally).
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);
/// Two-sample sup distance between empirical CDFs.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
/// Asymptotic Kolmogorov tail P(D_n > d) with Stephens' small-sample correction.
double ks_pvalue(double d, std::size_t n);

/// Median of the values (copy).
double median(std::vector<double> values);

}  // namespace sbm
