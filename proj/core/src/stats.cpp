#include "fbmlt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fbmlt/parallel.hpp"
#include "fbmlt/rng.hpp"

namespace fbmlt {

SampleMatrix::SampleMatrix(std::size_t dim_, std::vector<double> data_)
    : dim(dim_), data(std::move(data_)) {
    if (dim == 0) throw std::domain_error("sample matrix: dim must be positive");
    if (data.size() % dim != 0) {
        throw std::domain_error("sample matrix: data length is not a multiple of dim");
    }
}

namespace {

double row_distance(const double* a, const double* b, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        const double diff = a[d] - b[d];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

//! Mean of ||rows_a[i] - rows_b[j]|| over the full index rectangle,
//! summed row-by-row with a fixed pairwise tree.
double mean_cross_distance(const SampleMatrix& a, const SampleMatrix& b) {
    const std::size_t na = a.rows(), nb = b.rows();
    std::vector<double> row(nb), row_sums(na);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < nb; ++j) row[j] = row_distance(a.row(i), b.row(j), a.dim);
        row_sums[i] = pairwise_sum(row);
    }
    return pairwise_sum(row_sums) / (static_cast<double>(na) * static_cast<double>(nb));
}

} // namespace

double energy_distance(const SampleMatrix& a, const SampleMatrix& b) {
    if (a.rows() == 0 || b.rows() == 0) throw std::domain_error("energy distance: empty sample");
    if (a.dim != b.dim) throw std::domain_error("energy distance: probe dimensions differ");
    return 2.0 * mean_cross_distance(a, b) - mean_cross_distance(a, a) -
           mean_cross_distance(b, b);
}

EnergyTestResult energy_permutation_test(const SampleMatrix& a, const SampleMatrix& b,
                                         std::size_t n_permutations, std::uint64_t seed) {
    if (a.rows() == 0 || b.rows() == 0) throw std::domain_error("energy test: empty sample");
    if (a.dim != b.dim) throw std::domain_error("energy test: probe dimensions differ");
    const std::size_t na = a.rows(), nb = b.rows(), n = na + nb;

    // pooled distance matrix, symmetric with zero diagonal
    std::vector<const double*> rows(n);
    for (std::size_t i = 0; i < na; ++i) rows[i] = a.row(i);
    for (std::size_t j = 0; j < nb; ++j) rows[na + j] = b.row(j);
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = row_distance(rows[i], rows[j], a.dim);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }

    std::vector<std::size_t> labels(n);
    std::vector<double> row(n), row_sums(n);
    const auto statistic_for = [&](const std::vector<std::size_t>& order) {
        // first na entries of `order` play sample A, the rest sample B
        double within_a = 0.0, within_b = 0.0, cross = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double* drow = dist.data() + order[i] * n;
            std::size_t filled = 0;
            const bool i_in_a = i < na;
            // cross terms accumulated from the A side only (each pair once)
            if (i_in_a) {
                for (std::size_t j = na; j < n; ++j) row[filled++] = drow[order[j]];
                row_sums[i] = pairwise_sum(row.data(), filled);
            } else {
                row_sums[i] = 0.0;
            }
        }
        cross = pairwise_sum(row_sums.data(), n) / (static_cast<double>(na) * static_cast<double>(nb));
        for (std::size_t i = 0; i < na; ++i) {
            std::size_t filled = 0;
            const double* drow = dist.data() + order[i] * n;
            for (std::size_t j = 0; j < na; ++j) row[filled++] = drow[order[j]];
            row_sums[i] = pairwise_sum(row.data(), filled);
        }
        within_a = pairwise_sum(row_sums.data(), na) / (static_cast<double>(na) * static_cast<double>(na));
        for (std::size_t i = na; i < n; ++i) {
            std::size_t filled = 0;
            const double* drow = dist.data() + order[i] * n;
            for (std::size_t j = na; j < n; ++j) row[filled++] = drow[order[j]];
            row_sums[i - na] = pairwise_sum(row.data(), filled);
        }
        within_b = pairwise_sum(row_sums.data(), nb) / (static_cast<double>(nb) * static_cast<double>(nb));
        return 2.0 * cross - within_a - within_b;
    };

    std::iota(labels.begin(), labels.end(), std::size_t{0});
    EnergyTestResult result;
    result.statistic = statistic_for(labels);
    result.n_permutations = n_permutations;

    RandomStream rng = RandomStream::for_replica(seed, 0);
    std::size_t at_least = 0;
    std::vector<double> null_stats(n_permutations);
    for (std::size_t p = 0; p < n_permutations; ++p) {
        // Fisher-Yates over the pooled labels
        for (std::size_t i = n - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.next_uniform() * static_cast<double>(i + 1));
            std::swap(labels[i], labels[std::min(j, i)]);
        }
        null_stats[p] = statistic_for(labels);
        if (null_stats[p] >= result.statistic) ++at_least;
    }
    result.p_value = (1.0 + static_cast<double>(at_least)) /
                     (1.0 + static_cast<double>(n_permutations));
    if (n_permutations > 0) {
        result.null_mean = pairwise_sum(null_stats) / static_cast<double>(n_permutations);
        double ss = 0.0;
        for (double s : null_stats) ss += (s - result.null_mean) * (s - result.null_mean);
        result.null_std = std::sqrt(ss / static_cast<double>(n_permutations));
    }
    return result;
}

namespace {

double tau_against_index(const std::vector<double>& values, const std::vector<std::size_t>& order) {
    const std::size_t n = values.size();
    long concordant_minus_discordant = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double diff = values[order[j]] - values[order[i]];
            if (diff > 0.0) ++concordant_minus_discordant;
            else if (diff < 0.0) --concordant_minus_discordant;
        }
    }
    const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
    return static_cast<double>(concordant_minus_discordant) / pairs;
}

} // namespace

KendallResult kendall_decreasing_test(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 3) throw std::domain_error("kendall test: need at least 3 values");
    if (n > 8) throw std::domain_error("kendall test: exact enumeration supports n <= 8");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    KendallResult result;
    result.tau = tau_against_index(values, order);

    // exact null: tau of values under every relabeling
    std::size_t leq = 0, total = 0;
    do {
        if (tau_against_index(values, order) <= result.tau + 1e-15) ++leq;
        ++total;
    } while (std::next_permutation(order.begin(), order.end()));
    result.p_value = static_cast<double>(leq) / static_cast<double>(total);
    return result;
}

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::domain_error("least squares: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw std::domain_error("least squares: need at least 2 points");
    const double nx = static_cast<double>(n);
    const double mean_x = pairwise_sum(x) / nx;
    const double mean_y = pairwise_sum(y) / nx;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mean_x, dy = y[i] - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw std::domain_error("least squares: degenerate abscissae (all x equal)");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_y - fit.slope * mean_x;
    fit.r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

LineFit least_squares_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::domain_error("least squares: length mismatch");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw std::domain_error("loglog fit: entries must be strictly positive");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return least_squares(lx, ly);
}

} // namespace fbmlt
