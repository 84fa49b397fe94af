#pragma once

//! Two-sample energy statistics, a small exact rank test, and log-log fits.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fbmlt {

//! Squared-integrable sample: each row is one multivariate observation.
struct SampleMatrix {
    std::size_t dim = 0;
    std::vector<double> data; // row-major, data.size() == rows() * dim

    SampleMatrix() = default;
    SampleMatrix(std::size_t dim_, std::vector<double> data_);

    std::size_t rows() const { return dim == 0 ? 0 : data.size() / dim; }
    const double* row(std::size_t i) const { return data.data() + i * dim; }
};

//! Energy distance between two samples (V-statistic form):
//!   2 E||A - B|| - E||A - A'|| - E||B - B'||.
//! Deterministic for fixed inputs: pairwise sums use a fixed-shape tree.
double energy_distance(const SampleMatrix& a, const SampleMatrix& b);

struct EnergyTestResult {
    double statistic = 0.0;       // observed energy distance
    double p_value = 1.0;         // (1 + #{perm >= observed}) / (1 + n_permutations)
    double null_mean = 0.0;       // mean of the permutation-null statistics
    double null_std = 0.0;        // standard deviation of the permutation null
    std::size_t n_permutations = 0;
};

//! Permutation test for equality in distribution. Pools the samples once,
//! precomputes the pooled distance matrix, and relabels under seeded
//! Fisher-Yates shuffles; deterministic for a fixed seed.
EnergyTestResult energy_permutation_test(const SampleMatrix& a, const SampleMatrix& b,
                                         std::size_t n_permutations, std::uint64_t seed);

struct KendallResult {
    double tau = 0.0;     // Kendall tau-a of values against their index order
    double p_value = 1.0; // exact one-sided P(tau' <= tau) under uniform permutations
};

//! Exact one-sided test for a decreasing trend across an ordered sequence.
//! Enumerates all n! permutations; requires n <= 8.
KendallResult kendall_decreasing_test(const std::vector<double>& values);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

//! Ordinary least squares of y against x.
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

//! Least squares of log(y) against log(x); all entries must be positive.
LineFit least_squares_loglog(const std::vector<double>& x, const std::vector<double>& y);

} // namespace fbmlt
