#pragma once

//! Monte Carlo harness: ensembles of local-time fields, moment-scaling fits,
//! finite-dimensional convergence curves, identification and modulus proxies.

#include <cstdint>
#include <utility>
#include <vector>

#include "fbmlt/occupation.hpp"
#include "fbmlt/stats.hpp"

namespace fbmlt {

enum class EstimatorKind { kernel, fourier };

struct EstimatorConfig {
    EstimatorKind kind = EstimatorKind::kernel;
    double epsilon = 0.0;        // kernel bandwidth; 0 selects the increment-scale rule
    double fourier_cutoff = 0.0; // largest mode N (fourier only)
    double mode_spacing = 0.0;   // du (fourier only)
};

struct EnsembleConfig {
    TimeGrid grid{1.0, 256};
    std::vector<double> x_grid;
    std::vector<double> t_grid;
    EstimatorConfig estimator;
    std::size_t n_paths = 0;
    std::uint64_t master_seed = 0;
    int workers = 1;
    //! Resource guard: n_paths * (n_steps + x_grid * t_grid cells) must stay below.
    std::size_t max_cells = 1u << 31;
};

//! Sampled law of the local-time field at one Hurst value.
struct Ensemble {
    HurstParam hurst{0.5};
    EnsembleConfig config;
    std::vector<LocalTimeField> fields; // one per path, shared grids

    std::size_t n_paths() const { return fields.size(); }
};

//! Finite-dimensional probe (x_1,t_1),...,(x_k,t_k); points must be grid members.
struct ProbeSet {
    std::vector<std::pair<double, double>> points;
    std::size_t k() const { return points.size(); }

    //! Defaults {(0, T/2), (0, T), (x_off, T)}: mass concentrates near the origin.
    static ProbeSet defaults(double horizon, double x_off = 0.5);
};

//! post: deterministic for fixed master_seed and worker count; path r uses the
//! stream RandomStream::for_replica(master_seed, r).  n_paths = 0 is a valid
//! empty ensemble.  Paths regenerate on demand from the same seeds elsewhere.
Ensemble build_ensemble(HurstParam h, const EnsembleConfig& config);

//! Evaluate every member field at the probe points: one row per path.
SampleMatrix probe_matrix(const Ensemble& e, const ProbeSet& probes);

enum class LagDirection { time, space };

struct MomentScaling {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> lags;        // lags that survived (positive sample moment)
    std::vector<double> log_moments; // log E|increment|^m at those lags
    std::size_t dropped = 0;         // lags discarded for a zero sample moment
};

//! OLS of log E|increment|^m against log lag.  Time direction measures
//! E|L(0,h) - L(0,0)|^m over h in lags; space direction E|L(k,T) - L(0,T)|^m
//! over k in lags at the final grid time.  Lags must be grid members; m even.
MomentScaling moment_scaling(const Ensemble& e, int m, LagDirection direction,
                             const std::vector<double>& lags);

struct ConvergenceCurve {
    std::vector<double> h_values;
    std::vector<double> distances;     // energy distance to the center ensemble
    std::vector<double> ci_halfwidths; // 1.96 * permutation-null standard deviation
    std::vector<double> p_values;      // permutation p-value per pair
};

struct ConvergenceConfig {
    EnsembleConfig base;                        // shared grid/estimator/path count
    std::vector<std::uint64_t> ensemble_seeds;  // one per h in h_list, then the center
    std::size_t n_permutations = 200;
    std::uint64_t permutation_seed = 0;
};

//! pre: h_list sorted by |h - h_center| strictly descending; ensemble seeds
//! pairwise distinct (independent laws).  distances[i] compares h_list[i]
//! against the center ensemble at the probe points.
ConvergenceCurve convergence_curve(HurstParam h_center, const std::vector<double>& h_list,
                                   const ProbeSet& probes, const ConvergenceConfig& config);

//! Max over paths, probes, and eps of the relative discrepancy between the
//! spatial quadrature  integral g_eps(u, x) * Lhat(u, t) du  and the direct
//! time integral  integral_0^t g_eps(X_s, x) ds  (left-endpoint rule; paths
//! regenerate from the ensemble's seeds).  Denominators floor at 0.05.
//! pre: eps_list strictly decreasing; every eps >= 4 * max x-grid spacing.
double identification_check(const Ensemble& e, const ProbeSet& probes,
                            const std::vector<double>& eps_list);

struct ModulusStatistics {
    double max_time_osc = 0.0;  // max |L(x, t+h) - L(x, t)| over dyadic index lags
    double max_space_osc = 0.0; // max |L(x+k, t) - L(x, t)| over dyadic index lags
    std::vector<double> time_lags, time_osc;   // per-lag ensemble maxima
    std::vector<double> space_lags, space_osc;
};

//! Tightness proxy: per-lag maxima of field increments over dyadic index
//! spacings (1, 2, 4, ...) in each grid direction.
ModulusStatistics modulus_statistics(const Ensemble& e);

} // namespace fbmlt
