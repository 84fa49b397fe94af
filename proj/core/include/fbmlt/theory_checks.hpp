#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

#include "fbmlt/covariance.hpp"

namespace fbmlt {

//! Partition 0 = t_0 < t_1 < ... < t_m < horizon; `times` holds t_1..t_m.
struct PartitionSample {
    double horizon;
    std::vector<double> times;
    PartitionSample(double horizon_, std::vector<double> times_);
    std::size_t size() const noexcept { return times.size(); }
};

//! Worst (smallest) ratio Var(v'Y) / [(det G / prod G_ii) * (1/m) * sum v_i^2 G_ii]
//! over random positive-definite G and random v.  The bound predicts >= 1.
double check_variance_lower_bound(int dim, std::size_t trials, std::uint64_t seed);

//! (numeric, closed) for integral_R |x|^alpha e^(-a x^2) dx
//!   = a^(-(alpha+1)/2) Gamma((alpha+1)/2).
//! numeric is adaptive quadrature (error target 1e-10; throws if unmet).
std::pair<double, double> check_gaussian_moment_integral(double a, double alpha);

//! Exact value of integral_t^(t+window) s^(-H(1+2delta)) ds for sigma(s) = s^H:
//!   [(t+window)^(1-H(1+2delta)) - t^(1-H(1+2delta))] / (1-H(1+2delta)).
double sigma_integral(HurstParam h, double delta, double t, double window, double horizon);

//! Same integral by adaptive quadrature (oracle for the closed form).
double sigma_integral_quadrature(HurstParam h, double delta, double t, double window);

//! The explicit constant bounding the integral by C * window^(1-(h0+eta)(1+2delta)):
//!   max(1, T^(2 eta (1+2delta))) / ((1-(h0+eta)(1+2delta)) * T^(1-(h0+eta)(1+2delta))).
//! Valid for horizons T <= 1 (see sigma_bound_grid_check for the tested regime).
double sigma_integral_constant(double horizon, double h0, double eta, double delta);

struct GridCheckResult {
    std::size_t cells_checked;
    std::size_t violations;
    double worst_slack; // min over cells of (bound - value); >= 0 means all hold
};

//! Verify value <= constant * window^exponent over an n_t x n_w grid of
//! (t, window) in [0, T]^2 with t + window <= T, for n_delta delta values and
//! H in {h0-eta, h0, h0+eta}.
GridCheckResult sigma_bound_grid_check(double horizon, double h0, double eta,
                                       std::size_t n_t, std::size_t n_w, std::size_t n_delta);

//! Correlation matrix of the m normalized increments of a partition.
Eigen::MatrixXd increment_correlation_matrix(HurstParam h, const PartitionSample& p);

//! Determinant via pivoted LU with a symmetric-eigenvalue fallback.
double correlation_determinant(const Eigen::MatrixXd& corr);

struct DetScanResult {
    std::vector<double> h_values;
    std::vector<double> min_dets;
    std::vector<PartitionSample> partitions_at_min;
    int m = 0;
    std::size_t search_budget = 0;
    bool nonpositive_found = false; // would falsify the lower-bound claim
};

//! Minimize det(increment_correlation_matrix) over random partitions plus
//! coordinate-descent refinement, for each h on an 11-point grid spanning
//! [h_center - eta, h_center + eta].
DetScanResult determinant_scan(HurstParam h_center, double eta, int m, std::size_t budget,
                               std::uint64_t seed, double horizon);

//! Maximum over (beta, gamma) of |corr_h1 - corr_h2|, scanned over a
//! log-spaced grid covering 12 decades plus seeded random restarts and
//! pattern-search refinement.  Returns 0 exactly when h1 == h2.
double correlation_sup_difference(HurstParam h1, HurstParam h2, std::size_t budget,
                                  std::uint64_t seed);

//! Worst (most negative) value of
//!   [consecutive-increment numerator - disjoint numerator] / gamma^H
//! over random log-uniform (beta, gamma) in [1e-6, 1e6]^2; theory says >= 0.
double check_convexity_inequality(HurstParam h, std::size_t trials, std::uint64_t seed);

} // namespace fbmlt
