#include "fbmlt/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "fbmlt/parallel.hpp"
#include "fbmlt/rng.hpp"

namespace fbmlt {

ProbeSet ProbeSet::defaults(double horizon, double x_off) {
    if (!(horizon > 0.0)) throw std::domain_error("probe defaults: horizon must be positive");
    return ProbeSet{{{0.0, 0.5 * horizon}, {0.0, horizon}, {x_off, horizon}}};
}

namespace {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

//! Deterministic per-replica path draw; circulant when the FFT applies.
SamplePath draw_path(HurstParam h, const TimeGrid& grid, std::uint64_t master_seed,
                     std::size_t replica) {
    const std::uint64_t seed = RandomStream::replica_seed(master_seed, replica);
    if (is_power_of_two(grid.n_steps)) return generate_circulant(h, grid, seed);
    return generate_cholesky(h, grid, seed);
}

LocalTimeField estimate_field(const SamplePath& path, const EnsembleConfig& cfg) {
    const auto& est = cfg.estimator;
    if (est.kind == EstimatorKind::kernel) {
        const double eps = (est.epsilon > 0.0)
                               ? est.epsilon
                               : increment_scale_bandwidth(path.grid, path.hurst);
        return kernel_local_time(path, cfg.x_grid, cfg.t_grid, eps);
    }
    return fourier_local_time(path, cfg.x_grid, cfg.t_grid, est.fourier_cutoff,
                              est.mode_spacing);
}

void validate_budget(const EnsembleConfig& cfg) {
    const std::size_t per_path = cfg.grid.n_steps + cfg.x_grid.size() * cfg.t_grid.size();
    if (cfg.n_paths != 0 && per_path > cfg.max_cells / cfg.n_paths) {
        throw std::domain_error(
            "ensemble budget exceeded: n_paths * (n_steps + field cells) = " +
            std::to_string(cfg.n_paths) + " * " + std::to_string(per_path) + " > " +
            std::to_string(cfg.max_cells) + "; the limiting dimension is n_paths");
    }
}

} // namespace

Ensemble build_ensemble(HurstParam h, const EnsembleConfig& config) {
    if (config.x_grid.empty() || config.t_grid.empty()) {
        throw std::domain_error("ensemble: x_grid and t_grid must be non-empty");
    }
    validate_budget(config);

    Ensemble e;
    e.hurst = h;
    e.config = config;
    e.fields.resize(config.n_paths);
    if (config.n_paths == 0) return e;

    // one shared generator per ensemble: plan/factor setup is the slow part
    if (is_power_of_two(config.grid.n_steps)) {
        const CirculantGenerator gen(h, config.grid);
        parallel_for_index(config.n_paths, config.workers, [&](std::size_t r) {
            e.fields[r] = estimate_field(
                gen.generate(RandomStream::replica_seed(config.master_seed, r)), config);
        });
    } else {
        const CholeskyGenerator gen(h, config.grid);
        parallel_for_index(config.n_paths, config.workers, [&](std::size_t r) {
            e.fields[r] = estimate_field(
                gen.generate(RandomStream::replica_seed(config.master_seed, r)), config);
        });
    }
    return e;
}

SampleMatrix probe_matrix(const Ensemble& e, const ProbeSet& probes) {
    if (probes.k() == 0) throw std::domain_error("probe set must contain at least one point");
    if (e.fields.empty()) throw std::domain_error("probe matrix: empty ensemble");

    // resolve indices once on the shared grids
    std::vector<std::pair<std::size_t, std::size_t>> idx;
    idx.reserve(probes.k());
    for (const auto& [x, t] : probes.points) {
        idx.emplace_back(e.fields.front().x_index(x), e.fields.front().t_index(t));
    }
    std::vector<double> data(e.n_paths() * probes.k());
    for (std::size_t r = 0; r < e.n_paths(); ++r) {
        for (std::size_t j = 0; j < idx.size(); ++j) {
            data[r * probes.k() + j] = e.fields[r].at(idx[j].first, idx[j].second);
        }
    }
    return SampleMatrix(probes.k(), std::move(data));
}

MomentScaling moment_scaling(const Ensemble& e, int m, LagDirection direction,
                             const std::vector<double>& lags) {
    if (m < 2 || m % 2 != 0) throw std::domain_error("moment scaling: m must be even and >= 2");
    if (e.fields.empty()) throw std::domain_error("moment scaling: empty ensemble");
    if (lags.empty()) throw std::domain_error("moment scaling: no lags given");

    const LocalTimeField& front = e.fields.front();
    MomentScaling out;
    std::vector<double> samples(e.n_paths());
    for (double lag : lags) {
        if (!(lag > 0.0)) throw std::domain_error("moment scaling: lags must be positive");
        std::size_t ia = 0, ib = 0, fixed = 0;
        if (direction == LagDirection::time) {
            fixed = front.x_index(0.0);
            ib = front.t_index(lag); // increment from t = 0 where the field vanishes
        } else {
            fixed = front.t_grid.size() - 1; // final grid time
            ia = front.x_index(0.0);
            ib = front.x_index(lag);
        }
        for (std::size_t r = 0; r < e.n_paths(); ++r) {
            const LocalTimeField& f = e.fields[r];
            const double inc = (direction == LagDirection::time)
                                   ? f.at(fixed, ib)
                                   : f.at(ib, fixed) - f.at(ia, fixed);
            samples[r] = std::pow(std::fabs(inc), m);
        }
        const double moment = pairwise_sum(samples) / static_cast<double>(e.n_paths());
        if (moment > 0.0) {
            out.lags.push_back(lag);
            out.log_moments.push_back(std::log(moment));
        } else {
            ++out.dropped; // zero sample moment carries no log-log information
        }
    }
    if (out.lags.size() < 2) {
        throw std::domain_error("moment scaling: fewer than 2 usable lags (slope degenerate)");
    }
    std::vector<double> log_lags(out.lags.size());
    for (std::size_t i = 0; i < out.lags.size(); ++i) log_lags[i] = std::log(out.lags[i]);
    const LineFit fit = least_squares(log_lags, out.log_moments);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.r_squared = fit.r_squared;
    return out;
}

ConvergenceCurve convergence_curve(HurstParam h_center, const std::vector<double>& h_list,
                                   const ProbeSet& probes, const ConvergenceConfig& config) {
    if (h_list.empty()) throw std::domain_error("convergence curve: h_list is empty");
    for (std::size_t i = 1; i < h_list.size(); ++i) {
        if (!(std::fabs(h_list[i] - h_center.h) < std::fabs(h_list[i - 1] - h_center.h))) {
            throw std::domain_error(
                "convergence curve: h_list must be sorted by |h - h_center| strictly descending");
        }
    }
    if (config.ensemble_seeds.size() != h_list.size() + 1) {
        throw std::domain_error("convergence curve: need one ensemble seed per h plus the center");
    }
    if (std::set<std::uint64_t>(config.ensemble_seeds.begin(), config.ensemble_seeds.end())
            .size() != config.ensemble_seeds.size()) {
        throw std::domain_error(
            "convergence curve: ensemble seeds collide; ensembles must be independent");
    }

    EnsembleConfig center_cfg = config.base;
    center_cfg.master_seed = config.ensemble_seeds.back();
    const SampleMatrix center = probe_matrix(build_ensemble(h_center, center_cfg), probes);

    ConvergenceCurve curve;
    for (std::size_t i = 0; i < h_list.size(); ++i) {
        EnsembleConfig cfg = config.base;
        cfg.master_seed = config.ensemble_seeds[i];
        const SampleMatrix sample = probe_matrix(build_ensemble(HurstParam(h_list[i]), cfg), probes);
        const EnergyTestResult test = energy_permutation_test(
            sample, center, config.n_permutations,
            RandomStream::replica_seed(config.permutation_seed, i));
        curve.h_values.push_back(h_list[i]);
        curve.distances.push_back(test.statistic);
        curve.ci_halfwidths.push_back(1.96 * test.null_std);
        curve.p_values.push_back(test.p_value);
    }
    return curve;
}

double identification_check(const Ensemble& e, const ProbeSet& probes,
                            const std::vector<double>& eps_list) {
    if (e.fields.empty()) throw std::domain_error("identification check: empty ensemble");
    if (eps_list.empty()) throw std::domain_error("identification check: eps_list is empty");
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        if (!(eps_list[i] < eps_list[i - 1])) {
            throw std::domain_error("identification check: eps_list must be strictly decreasing");
        }
    }
    const auto& xg = e.config.x_grid;
    double max_dx = 0.0;
    for (std::size_t i = 1; i < xg.size(); ++i) max_dx = std::max(max_dx, xg[i] - xg[i - 1]);
    if (!(eps_list.back() >= 4.0 * max_dx)) {
        throw std::domain_error(
            "identification check: eps " + std::to_string(eps_list.back()) +
            " is below the spatial resolution floor 4*dx = " + std::to_string(4.0 * max_dx));
    }

    static const MollifierKernel phi;
    std::vector<std::size_t> t_idx;
    for (const auto& [x, t] : probes.points) {
        (void)x;
        t_idx.push_back(e.fields.front().t_index(t));
    }

    double worst = 0.0;
    for (std::size_t r = 0; r < e.n_paths(); ++r) {
        // the ensemble's member paths are reproducible from its seed ledger
        const SamplePath path =
            draw_path(e.hurst, e.config.grid, e.config.master_seed, r);
        const LocalTimeField& field = e.fields[r];
        for (std::size_t p = 0; p < probes.k(); ++p) {
            const double x0 = probes.points[p].first;
            const double t = probes.points[p].second;
            for (double eps : eps_list) {
                // trapezoid quadrature of g_eps against the field column
                double lhs = 0.0;
                for (std::size_t i = 1; i < xg.size(); ++i) {
                    const double f0 = phi.scaled(xg[i - 1], x0, eps) * field.at(i - 1, t_idx[p]);
                    const double f1 = phi.scaled(xg[i], x0, eps) * field.at(i, t_idx[p]);
                    lhs += 0.5 * (f0 + f1) * (xg[i] - xg[i - 1]);
                }
                const double rhs = occupation_integral(
                    path, t, [&](double u) { return phi.scaled(u, x0, eps); });
                worst = std::max(worst, std::fabs(lhs - rhs) / std::max(std::fabs(rhs), 0.05));
            }
        }
    }
    return worst;
}

ModulusStatistics modulus_statistics(const Ensemble& e) {
    if (e.fields.empty()) throw std::domain_error("modulus statistics: empty ensemble");
    const auto& xg = e.fields.front().x_grid;
    const auto& tg = e.fields.front().t_grid;

    ModulusStatistics out;
    for (std::size_t lag = 1; lag < tg.size(); lag *= 2) {
        double osc = 0.0;
        for (const auto& f : e.fields) {
            for (std::size_t ix = 0; ix < xg.size(); ++ix) {
                for (std::size_t it = 0; it + lag < tg.size(); ++it) {
                    osc = std::max(osc, std::fabs(f.at(ix, it + lag) - f.at(ix, it)));
                }
            }
        }
        out.time_lags.push_back(tg[lag] - tg[0]);
        out.time_osc.push_back(osc);
        out.max_time_osc = std::max(out.max_time_osc, osc);
    }
    for (std::size_t lag = 1; lag < xg.size(); lag *= 2) {
        double osc = 0.0;
        for (const auto& f : e.fields) {
            for (std::size_t it = 0; it < tg.size(); ++it) {
                for (std::size_t ix = 0; ix + lag < xg.size(); ++ix) {
                    osc = std::max(osc, std::fabs(f.at(ix + lag, it) - f.at(ix, it)));
                }
            }
        }
        out.space_lags.push_back(xg[lag] - xg[0]);
        out.space_osc.push_back(osc);
        out.max_space_osc = std::max(out.max_space_osc, osc);
    }
    return out;
}

} // namespace fbmlt
