#include "fbmlt/theory_checks.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fbmlt/rng.hpp"

namespace fbmlt {

PartitionSample::PartitionSample(double horizon_, std::vector<double> times_)
    : horizon(horizon_), times(std::move(times_)) {
    if (!(horizon > 0.0)) throw std::domain_error("partition: horizon must be positive");
    if (times.size() < 2) throw std::domain_error("partition: need m >= 2 increments");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev)) throw std::domain_error("partition: times must be strictly increasing from 0");
        prev = t;
    }
    if (!(times.back() < horizon)) throw std::domain_error("partition: t_m must be strictly below the horizon");
}

double check_variance_lower_bound(int dim, std::size_t trials, std::uint64_t seed) {
    if (dim < 2) throw std::domain_error("variance bound: dim must be >= 2");
    RandomStream rng = RandomStream::for_replica(seed, 0);
    const auto m = static_cast<std::size_t>(dim);
    Eigen::MatrixXd a(dim, dim);
    Eigen::VectorXd v(dim);
    double worst = std::numeric_limits<double>::infinity();

    for (std::size_t trial = 0; trial < trials; ++trial) {
        double det_a = 0.0;
        do { // resample until comfortably nonsingular
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) a(i, j) = rng.next_gaussian();
            det_a = a.partialPivLu().determinant();
        } while (!(std::fabs(det_a) > 1e-150));
        const Eigen::MatrixXd gamma = a * a.transpose();
        for (int i = 0; i < dim; ++i) v(i) = rng.next_gaussian();

        const double lhs = v.dot(gamma * v);
        double diag_prod = 1.0, weighted = 0.0;
        for (int i = 0; i < dim; ++i) {
            diag_prod *= gamma(i, i);
            weighted += v(i) * v(i) * gamma(i, i);
        }
        const double rhs = (det_a * det_a / diag_prod) * weighted / static_cast<double>(m);
        worst = std::min(worst, lhs / rhs);
    }
    return worst;
}

std::pair<double, double> check_gaussian_moment_integral(double a, double alpha) {
    if (!(a > 0.0)) throw std::domain_error("gaussian moment: a must be positive");
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::domain_error("gaussian moment: alpha must lie in (0,2)");

    boost::math::quadrature::exp_sinh<double> integrator;
    double error = 0.0;
    const double half = integrator.integrate(
        [a, alpha](double x) { return std::pow(x, alpha) * std::exp(-a * x * x); },
        1e-12, &error);
    const double numeric = 2.0 * half; // even integrand
    if (!(error < 1e-10)) {
        throw std::runtime_error("gaussian moment quadrature did not converge; achieved error " +
                                 std::to_string(error));
    }
    const double closed = std::exp(-0.5 * (alpha + 1.0) * std::log(a) +
                                   std::lgamma(0.5 * (alpha + 1.0)));
    return {numeric, closed};
}

namespace {

void require_sigma_exponent(double h, double delta) {
    if (!(delta > 0.0)) throw std::domain_error("sigma integral: delta must be positive");
    if (!(h * (1.0 + 2.0 * delta) < 1.0)) {
        throw std::domain_error("sigma integral: requires H*(1+2*delta) < 1, else divergent at 0");
    }
}

} // namespace

double sigma_integral(HurstParam h, double delta, double t, double window, double horizon) {
    require_sigma_exponent(h, delta);
    if (t < 0.0 || !(window > 0.0)) throw std::domain_error("sigma integral: need t >= 0 and window > 0");
    if (t + window > horizon * (1.0 + 1e-12)) {
        throw std::domain_error("sigma integral: t + window exceeds the horizon");
    }
    const double expo = 1.0 - h.h * (1.0 + 2.0 * delta);
    return power_difference(t, window, expo) / expo;
}

double sigma_integral_quadrature(HurstParam h, double delta, double t, double window) {
    require_sigma_exponent(h, delta);
    const double q = h.h * (1.0 + 2.0 * delta);
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate([q](double s) { return std::pow(s, -q); }, t, t + window);
}

double sigma_integral_constant(double horizon, double h0, double eta, double delta) {
    if (!(horizon > 0.0)) throw std::domain_error("sigma constant: horizon must be positive");
    if (!(eta > 0.0)) throw std::domain_error("sigma constant: eta must be positive");
    require_sigma_exponent(h0 + eta, delta);
    const double one_plus = 1.0 + 2.0 * delta;
    const double expo = 1.0 - (h0 + eta) * one_plus;
    return std::max(1.0, std::pow(horizon, 2.0 * eta * one_plus)) /
           (expo * std::pow(horizon, expo));
}

GridCheckResult sigma_bound_grid_check(double horizon, double h0, double eta,
                                       std::size_t n_t, std::size_t n_w, std::size_t n_delta) {
    const double delta_cap = 0.5 * (1.0 / (h0 + eta) - 1.0); // keeps the exponent positive
    GridCheckResult result{0, 0, std::numeric_limits<double>::infinity()};
    const double h_values[3] = {h0 - eta, h0, h0 + eta};

    for (std::size_t id = 0; id < n_delta; ++id) {
        // deltas strictly inside (0, delta_cap)
        const double delta = delta_cap * (static_cast<double>(id) + 1.0) /
                             (static_cast<double>(n_delta) + 1.0);
        const double expo = 1.0 - (h0 + eta) * (1.0 + 2.0 * delta);
        const double constant = sigma_integral_constant(horizon, h0, eta, delta);
        for (std::size_t it = 0; it < n_t; ++it) {
            const double t = horizon * static_cast<double>(it) / static_cast<double>(n_t);
            for (std::size_t iw = 1; iw <= n_w; ++iw) {
                const double w = (horizon - t) * static_cast<double>(iw) / static_cast<double>(n_w);
                if (!(w > 0.0)) continue;
                const double bound = constant * std::pow(w, expo);
                for (double hv : h_values) {
                    const double value = sigma_integral(HurstParam(hv), delta, t, w, horizon);
                    const double slack = bound - value;
                    ++result.cells_checked;
                    result.worst_slack = std::min(result.worst_slack, slack);
                    if (slack < -1e-12 * bound) ++result.violations;
                }
            }
        }
    }
    return result;
}

Eigen::MatrixXd increment_correlation_matrix(HurstParam h, const PartitionSample& p) {
    const auto m = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double si = (i == 0) ? 0.0 : p.times[static_cast<std::size_t>(i) - 1];
        const double ti = p.times[static_cast<std::size_t>(i)];
        for (Eigen::Index j = i + 1; j < m; ++j) {
            const double sj = p.times[static_cast<std::size_t>(j) - 1];
            const double tj = p.times[static_cast<std::size_t>(j)];
            const double rho = disjoint_increment_correlation(h, IncrementQuad(si, ti, sj, tj));
            corr(i, j) = rho;
            corr(j, i) = rho;
        }
    }
    return corr;
}

double correlation_determinant(const Eigen::MatrixXd& corr) {
    const double det = corr.partialPivLu().determinant();
    if (std::isfinite(det) && std::fabs(det) > 1e-300) return det;
    // near-underflow pivots: fall back to the eigenvalue product
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr, Eigen::EigenvaluesOnly);
    double prod = 1.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) prod *= es.eigenvalues()(i);
    return prod;
}

namespace {

PartitionSample random_partition(RandomStream& rng, int m, double horizon) {
    std::vector<double> times(static_cast<std::size_t>(m));
    for (auto& t : times) t = horizon * rng.next_uniform() * (1.0 - 1e-9);
    std::sort(times.begin(), times.end());
    // enforce strict increase from 0 under fp ties (probability ~0)
    double prev = 0.0;
    for (auto& t : times) {
        if (t <= prev) t = prev + horizon * 1e-12;
        prev = t;
    }
    return PartitionSample(horizon, std::move(times));
}

} // namespace

DetScanResult determinant_scan(HurstParam h_center, double eta, int m, std::size_t budget,
                               std::uint64_t seed, double horizon) {
    if (m < 2 || m % 2 != 0) throw std::domain_error("determinant scan: m must be even and >= 2");
    if (!(eta > 0.0 && eta < std::min(h_center.h, 1.0 - h_center.h))) {
        throw std::domain_error("determinant scan: need 0 < eta < min(h_center, 1 - h_center)");
    }

    constexpr std::size_t n_h = 11;
    DetScanResult result;
    result.m = m;
    result.search_budget = budget;
    const std::size_t per_h = std::max<std::size_t>(budget / n_h, 16);
    const std::size_t random_draws = per_h * 4 / 5;

    for (std::size_t ih = 0; ih < n_h; ++ih) {
        const double hv = h_center.h - eta + 2.0 * eta * static_cast<double>(ih) /
                                                  static_cast<double>(n_h - 1);
        const HurstParam h(hv);
        RandomStream rng = RandomStream::for_replica(seed, ih);

        double best_det = std::numeric_limits<double>::infinity();
        PartitionSample best = random_partition(rng, m, horizon);
        std::size_t used = 0;
        while (used < random_draws) {
            PartitionSample cand = random_partition(rng, m, horizon);
            const double det = correlation_determinant(increment_correlation_matrix(h, cand));
            ++used;
            if (det < best_det) {
                best_det = det;
                best = cand;
            }
        }

        // coordinate descent on the partition points, shrinking steps
        double step = 0.25 * horizon;
        while (used < per_h && step > 1e-9 * horizon) {
            bool improved = false;
            for (std::size_t i = 0; i < best.times.size() && used < per_h; ++i) {
                for (double sign : {-1.0, 1.0}) {
                    if (used >= per_h) break;
                    std::vector<double> times = best.times;
                    const double lo = (i == 0) ? 0.0 : times[i - 1];
                    const double hi = (i + 1 == times.size()) ? horizon : times[i + 1];
                    double t = times[i] + sign * step;
                    const double margin = 1e-9 * horizon;
                    t = std::clamp(t, lo + margin, hi - margin);
                    if (!(t > lo && t < hi)) continue;
                    times[i] = t;
                    PartitionSample cand(horizon, std::move(times));
                    const double det = correlation_determinant(increment_correlation_matrix(h, cand));
                    ++used;
                    if (det < best_det) {
                        best_det = det;
                        best = cand;
                        improved = true;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }

        result.h_values.push_back(hv);
        result.min_dets.push_back(best_det);
        result.partitions_at_min.push_back(best);
        if (!(best_det > 0.0)) result.nonpositive_found = true;
    }
    return result;
}

double correlation_sup_difference(HurstParam h1, HurstParam h2, std::size_t budget,
                                  std::uint64_t seed) {
    if (h1.h == h2.h) return 0.0;

    const auto diff_at = [&](double beta, double gamma) {
        const BetaGamma bg(beta, gamma);
        return std::fabs(correlation_beta_gamma(h1, bg) - correlation_beta_gamma(h2, bg));
    };

    // log-spaced grid over 12 decades plus the beta = 0 axis (the proof's
    // compact / small-gamma / large-gamma / large-beta regimes)
    constexpr int grid_n = 49;
    const auto grid_value = [&](int idx) {
        return std::pow(10.0, -6.0 + 12.0 * static_cast<double>(idx) / (grid_n - 1));
    };
    double best = 0.0, best_beta = 0.0, best_gamma = 1.0;
    std::size_t used = 0;
    for (int ib = -1; ib < grid_n; ++ib) {
        const double beta = (ib < 0) ? 0.0 : grid_value(ib);
        for (int ig = 0; ig < grid_n; ++ig) {
            const double gamma = grid_value(ig);
            const double d = diff_at(beta, gamma);
            ++used;
            if (d > best) {
                best = d;
                best_beta = beta;
                best_gamma = gamma;
            }
        }
    }

    // seeded random restarts, log-uniform
    RandomStream rng = RandomStream::for_replica(seed, 0);
    const std::size_t restarts = (budget > used + budget / 5) ? budget - used - budget / 5 : 0;
    for (std::size_t r = 0; r < restarts; ++r) {
        const double beta = (rng.next_uniform() < 0.125)
                                ? 0.0
                                : std::pow(10.0, -6.0 + 12.0 * rng.next_uniform());
        const double gamma = std::pow(10.0, -6.0 + 12.0 * rng.next_uniform());
        const double d = diff_at(beta, gamma);
        ++used;
        if (d > best) {
            best = d;
            best_beta = beta;
            best_gamma = gamma;
        }
    }

    // pattern search (multiplicative steps) around the best point
    double factor = 2.0;
    while (used < budget && factor > 1.0 + 1e-10) {
        bool improved = false;
        const double beta_candidates[3] = {best_beta / factor, best_beta, best_beta * factor};
        const double gamma_candidates[3] = {best_gamma / factor, best_gamma, best_gamma * factor};
        for (double beta : beta_candidates) {
            for (double gamma : gamma_candidates) {
                if (used >= budget) break;
                if (!(gamma > 0.0)) continue;
                const double d = diff_at(beta, gamma);
                ++used;
                if (d > best) {
                    best = d;
                    best_beta = beta;
                    best_gamma = gamma;
                    improved = true;
                }
            }
        }
        if (!improved) factor = std::sqrt(factor);
    }
    return best;
}

double check_convexity_inequality(HurstParam h, std::size_t trials, std::uint64_t seed) {
    if (!(h.h > 0.5)) throw std::domain_error("convexity inequality: requires hurst > 0.5");
    const double p = 2.0 * h.h;
    RandomStream rng = RandomStream::for_replica(seed, 0);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < trials; ++i) {
        const double beta = std::pow(10.0, -6.0 + 12.0 * rng.next_uniform());
        const double gamma = std::pow(10.0, -6.0 + 12.0 * rng.next_uniform());
        // consecutive-minus-disjoint numerator, bracketed to dodge cancellation
        const double margin = (power_difference(gamma, 1.0, p) - 1.0 -
                               power_difference(beta + gamma, 1.0, p) +
                               power_difference(beta, 1.0, p)) /
                              std::pow(gamma, h.h);
        worst = std::min(worst, margin);
    }
    return worst;
}

} // namespace fbmlt
