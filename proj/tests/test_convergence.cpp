#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fbmlt/convergence.hpp"
#include "fbmlt/rng.hpp"

using namespace fbmlt;

namespace {

EnsembleConfig small_config() {
    EnsembleConfig cfg;
    cfg.grid = TimeGrid(1.0, 64);
    cfg.x_grid = {-0.5, 0.0, 0.5};
    cfg.t_grid = {0.5, 1.0};
    cfg.estimator.kind = EstimatorKind::kernel;
    cfg.estimator.epsilon = 0.1;
    cfg.n_paths = 20;
    cfg.master_seed = 808;
    cfg.workers = 1;
    return cfg;
}

} // namespace

TEST_CASE("convergence: probe defaults concentrate on the origin") {
    const ProbeSet probes = ProbeSet::defaults(2.0);
    REQUIRE(probes.k() == 3);
    CHECK(probes.points[0] == std::pair<double, double>{0.0, 1.0});
    CHECK(probes.points[1] == std::pair<double, double>{0.0, 2.0});
    CHECK(probes.points[2] == std::pair<double, double>{0.5, 2.0});
    CHECK_THROWS_AS(ProbeSet::defaults(0.0), std::domain_error);
}

TEST_CASE("convergence: ensemble construction is deterministic across worker counts") {
    EnsembleConfig cfg = small_config();
    const Ensemble e1 = build_ensemble(HurstParam(0.6), cfg);
    cfg.workers = 3;
    const Ensemble e2 = build_ensemble(HurstParam(0.6), cfg);
    REQUIRE(e1.n_paths() == 20);
    REQUIRE(e2.n_paths() == 20);
    for (std::size_t r = 0; r < e1.n_paths(); ++r) {
        CHECK(e1.fields[r].values == e2.fields[r].values);
    }
    // and across repeated builds
    const Ensemble e3 = build_ensemble(HurstParam(0.6), small_config());
    CHECK(e1.fields.front().values == e3.fields.front().values);
    CHECK(e1.fields.back().values == e3.fields.back().values);
}

TEST_CASE("convergence: ensemble validation") {
    EnsembleConfig cfg = small_config();
    cfg.x_grid.clear();
    CHECK_THROWS_AS((void)build_ensemble(HurstParam(0.5), cfg), std::domain_error);
    cfg = small_config();
    cfg.n_paths = static_cast<std::size_t>(1) << 40; // trips the cell budget
    CHECK_THROWS_AS((void)build_ensemble(HurstParam(0.5), cfg), std::domain_error);
    cfg = small_config();
    cfg.n_paths = 0;
    const Ensemble empty = build_ensemble(HurstParam(0.5), cfg);
    CHECK(empty.n_paths() == 0);
}

TEST_CASE("convergence: empty ensembles are rejected downstream") {
    EnsembleConfig cfg = small_config();
    cfg.n_paths = 0;
    const Ensemble empty = build_ensemble(HurstParam(0.5), cfg);
    const ProbeSet probes{{{0.0, 1.0}}};
    CHECK_THROWS_AS((void)probe_matrix(empty, probes), std::domain_error);
    CHECK_THROWS_AS((void)moment_scaling(empty, 2, LagDirection::time, {0.5, 1.0}),
                    std::domain_error);
    CHECK_THROWS_AS((void)identification_check(empty, probes, {0.5}), std::domain_error);
    CHECK_THROWS_AS((void)modulus_statistics(empty), std::domain_error);
}

TEST_CASE("convergence: probe matrix evaluates fields row by row") {
    const Ensemble e = build_ensemble(HurstParam(0.6), small_config());
    const ProbeSet probes{{{0.0, 0.5}, {0.5, 1.0}}};
    const SampleMatrix m = probe_matrix(e, probes);
    CHECK(m.dim == 2);
    CHECK(m.rows() == e.n_paths());
    const std::size_t ix = e.fields[3].x_index(0.0);
    const std::size_t it = e.fields[3].t_index(0.5);
    CHECK(m.row(3)[0] == e.fields[3].at(ix, it));
    // off-grid probes are rejected
    const ProbeSet bad{{{0.123, 1.0}}};
    CHECK_THROWS_AS((void)probe_matrix(e, bad), std::domain_error);
}

TEST_CASE("convergence: ensemble mean local time matches the closed form") {
    EnsembleConfig cfg;
    cfg.grid = TimeGrid(1.0, 1024);
    cfg.x_grid = {0.0};
    cfg.t_grid = {1.0};
    cfg.estimator.kind = EstimatorKind::kernel;
    cfg.estimator.epsilon = 0.0; // increment-scale bandwidth rule
    cfg.n_paths = 400;
    cfg.master_seed = 4242;
    const Ensemble e = build_ensemble(HurstParam(0.5), cfg);
    double sum = 0.0, sumsq = 0.0;
    for (const LocalTimeField& f : e.fields) {
        sum += f.at(0, 0);
        sumsq += f.at(0, 0) * f.at(0, 0);
    }
    const double mean = sum / 400.0;
    const double sd = std::sqrt(sumsq / 400.0 - mean * mean);
    const double target = std::sqrt(2.0 / std::acos(-1.0));
    CHECK(std::fabs(mean - target) < 3.0 * sd / std::sqrt(400.0));
}

TEST_CASE("convergence: moment scaling recovers the hurst ordering") {
    const std::vector<double> lag_steps{16, 32, 64, 128};
    std::vector<double> slopes;
    for (double hv : {0.3, 0.7}) {
        EnsembleConfig cfg;
        cfg.grid = TimeGrid(1.0, 512);
        const double dt = cfg.grid.dt();
        cfg.x_grid = {0.0};
        for (double k : lag_steps) cfg.t_grid.push_back(k * dt);
        cfg.estimator.epsilon = 0.0;
        cfg.n_paths = 300;
        cfg.master_seed = 11011;
        const Ensemble e = build_ensemble(HurstParam(hv), cfg);
        const MomentScaling ms = moment_scaling(e, 2, LagDirection::time, cfg.t_grid);
        CHECK(ms.lags.size() == lag_steps.size());
        CHECK(ms.dropped == 0);
        CHECK(ms.r_squared > 0.9);
        slopes.push_back(ms.slope);
    }
    // rougher local time in t for larger H: slope 2(1-H) decreases in H
    CHECK(slopes[0] > slopes[1]);
}

TEST_CASE("convergence: moment scaling argument validation") {
    const Ensemble e = build_ensemble(HurstParam(0.5), small_config());
    CHECK_THROWS_AS((void)moment_scaling(e, 3, LagDirection::time, {0.5, 1.0}),
                    std::domain_error); // odd m
    CHECK_THROWS_AS((void)moment_scaling(e, 0, LagDirection::time, {0.5, 1.0}),
                    std::domain_error);
    CHECK_THROWS_AS((void)moment_scaling(e, 2, LagDirection::time, {}), std::domain_error);
    CHECK_THROWS_AS((void)moment_scaling(e, 2, LagDirection::time, {0.5}),
                    std::domain_error); // single usable lag
    CHECK_THROWS_AS((void)moment_scaling(e, 2, LagDirection::time, {-0.5, 1.0}),
                    std::domain_error);
    // space direction uses the x grid: lags must be positive grid members
    CHECK_THROWS_AS((void)moment_scaling(e, 2, LagDirection::space, {0.123, 0.5}),
                    std::domain_error);
    CHECK_THROWS_AS((void)moment_scaling(e, 2, LagDirection::space, {0.5, -0.5}),
                    std::domain_error);
    EnsembleConfig wide = small_config();
    wide.x_grid = {-0.5, 0.0, 0.25, 0.5};
    const Ensemble e2 = build_ensemble(HurstParam(0.5), wide);
    CHECK_NOTHROW((void)moment_scaling(e2, 2, LagDirection::space, {0.25, 0.5}));
}

TEST_CASE("convergence: curve validation") {
    const ProbeSet probes{{{0.0, 1.0}}};
    ConvergenceConfig cfg;
    cfg.base = small_config();
    cfg.base.n_paths = 10;
    cfg.n_permutations = 20;
    cfg.permutation_seed = 5;
    // |h - center| must be strictly descending
    cfg.ensemble_seeds = {1, 2, 3};
    CHECK_THROWS_AS(
        (void)convergence_curve(HurstParam(0.5), {0.6, 0.7}, probes, cfg),
        std::domain_error);
    // seed count mismatch
    cfg.ensemble_seeds = {1, 2};
    CHECK_THROWS_AS(
        (void)convergence_curve(HurstParam(0.5), {0.7, 0.6}, probes, cfg),
        std::domain_error);
    // colliding seeds
    cfg.ensemble_seeds = {4, 4, 4};
    CHECK_THROWS_AS(
        (void)convergence_curve(HurstParam(0.5), {0.7, 0.6}, probes, cfg),
        std::domain_error);
    // empty h list
    cfg.ensemble_seeds = {1};
    CHECK_THROWS_AS((void)convergence_curve(HurstParam(0.5), {}, probes, cfg),
                    std::domain_error);
}

TEST_CASE("convergence: curve on a tiny configuration") {
    ConvergenceConfig cfg;
    cfg.base = small_config();
    cfg.base.n_paths = 100;
    cfg.base.x_grid = {0.0, 0.5};
    cfg.base.t_grid = {0.5, 1.0};
    cfg.ensemble_seeds = {101, 202, 303};
    cfg.n_permutations = 50;
    cfg.permutation_seed = 17;
    const ProbeSet probes = ProbeSet::defaults(1.0);
    const ConvergenceCurve curve =
        convergence_curve(HurstParam(0.5), {0.9, 0.7}, probes, cfg);
    REQUIRE(curve.h_values.size() == 2);
    CHECK(curve.h_values[0] == 0.9);
    CHECK(curve.distances.size() == 2);
    CHECK(curve.ci_halfwidths.size() == 2);
    CHECK(curve.p_values.size() == 2);
    for (double d : curve.distances) CHECK(std::isfinite(d));
    for (double w : curve.ci_halfwidths) CHECK(w >= 0.0);
    for (double p : curve.p_values) {
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
    }
    // H = 0.9 fields sit farther from the H = 0.5 law than H = 0.7 fields
    CHECK(curve.distances[0] > curve.distances[1]);
}

TEST_CASE("convergence: identification check validation and small run") {
    EnsembleConfig cfg;
    cfg.grid = TimeGrid(1.0, 256);
    const double dx = 0.02;
    for (int i = -100; i <= 100; ++i) cfg.x_grid.push_back(dx * i);
    cfg.t_grid = {0.5, 1.0};
    cfg.estimator.epsilon = 0.02;
    cfg.n_paths = 5;
    cfg.master_seed = 616;
    const Ensemble e = build_ensemble(HurstParam(0.5), cfg);
    const ProbeSet probes{{{0.0, 0.5}, {0.0, 1.0}}};

    CHECK_THROWS_AS((void)identification_check(e, probes, {}), std::domain_error);
    CHECK_THROWS_AS((void)identification_check(e, probes, {0.2, 0.2}), std::domain_error);
    CHECK_THROWS_AS((void)identification_check(e, probes, {0.5, 0.05}),
                    std::domain_error); // below the 4*dx resolution floor
    const double worst = identification_check(e, probes, {0.4, 0.25});
    CHECK(worst >= 0.0);
    CHECK(worst < 0.10);
}

TEST_CASE("convergence: modulus statistics on a small ensemble") {
    EnsembleConfig cfg = small_config();
    cfg.x_grid = {-0.5, -0.25, 0.0, 0.25, 0.5};
    cfg.t_grid = {0.25, 0.5, 0.75, 1.0};
    const Ensemble e = build_ensemble(HurstParam(0.5), cfg);
    const ModulusStatistics ms = modulus_statistics(e);
    CHECK(ms.max_time_osc > 0.0);
    CHECK(ms.max_space_osc > 0.0);
    // dyadic index lags 1 and 2 in time (4 grid points), 1, 2, 4 in space (5 points)
    CHECK(ms.time_lags.size() == 2);
    CHECK(ms.space_lags.size() == 3);
    CHECK(ms.time_osc.size() == ms.time_lags.size());
    CHECK(ms.space_osc.size() == ms.space_lags.size());
    for (double v : ms.time_osc) CHECK(v <= ms.max_time_osc);
    for (double v : ms.space_osc) CHECK(v <= ms.max_space_osc);
}

TEST_CASE("convergence: fourier-estimator ensembles build and evaluate") {
    EnsembleConfig cfg = small_config();
    cfg.estimator.kind = EstimatorKind::fourier;
    cfg.estimator.fourier_cutoff = 20.0;
    cfg.estimator.mode_spacing = 0.05;
    cfg.n_paths = 5;
    const Ensemble e = build_ensemble(HurstParam(0.5), cfg);
    CHECK(e.n_paths() == 5);
    const SampleMatrix m = probe_matrix(e, ProbeSet{{{0.0, 1.0}}});
    for (std::size_t r = 0; r < m.rows(); ++r) CHECK(std::isfinite(m.row(r)[0]));
}
