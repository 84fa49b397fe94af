//! Experiment runner: seeded simulation, local-time estimation, inequality
//! verification, moment-scaling fits, and convergence curves, with JSON
//! reports, CSV tables, and SVG diagnostics.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fbmlt/convergence.hpp"
#include "fbmlt/report.hpp"
#include "fbmlt/theory_checks.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

//! Configuration / IO problem detected before compute: maps to exit 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// strict config access: unknown keys rejected, every error names its field
// ---------------------------------------------------------------------------

void reject_unknown_keys(const ordered_json& obj, const std::set<std::string>& allowed,
                         const std::string& scope) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key)) {
            throw ConfigError("config: unknown key \"" + scope + key + "\"");
        }
    }
}

const ordered_json* find(const ordered_json& obj, const std::string& key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_number(const ordered_json& obj, const std::string& key, double fallback) {
    const auto* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) throw ConfigError("config: \"" + key + "\" must be a number");
    return v->get<double>();
}

std::uint64_t get_seed(const ordered_json& obj, const std::string& key, std::uint64_t fallback) {
    const auto* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer() && !v->is_number_unsigned()) {
        throw ConfigError("config: \"" + key + "\" must be an integer seed");
    }
    return v->get<std::uint64_t>();
}

std::size_t get_count(const ordered_json& obj, const std::string& key, std::size_t fallback) {
    const auto* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer() && !v->is_number_unsigned()) {
        throw ConfigError("config: \"" + key + "\" must be a non-negative integer");
    }
    const auto raw = v->get<std::int64_t>();
    if (raw < 0) throw ConfigError("config: \"" + key + "\" must be a non-negative integer");
    return static_cast<std::size_t>(raw);
}

std::string get_string(const ordered_json& obj, const std::string& key, std::string fallback) {
    const auto* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError("config: \"" + key + "\" must be a string");
    return v->get<std::string>();
}

std::vector<double> get_number_list(const ordered_json& obj, const std::string& key,
                                    std::vector<double> fallback) {
    const auto* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_array()) throw ConfigError("config: \"" + key + "\" must be an array of numbers");
    std::vector<double> out;
    for (const auto& item : *v) {
        if (!item.is_number()) {
            throw ConfigError("config: \"" + key + "\" must be an array of numbers");
        }
        out.push_back(item.get<double>());
    }
    return out;
}

//! Validated Hurst; config errors name "hurst".
fbmlt::HurstParam hurst_field(double value) {
    try {
        return fbmlt::HurstParam(value);
    } catch (const std::exception&) {
        throw ConfigError("config: \"hurst\" = " + fbmlt::format_double(value) +
                          " is invalid; hurst must lie strictly inside (0,1)");
    }
}

fbmlt::TimeGrid grid_fields(const ordered_json& cfg) {
    const double horizon = get_number(cfg, "horizon", 1.0);
    const std::size_t n_steps = get_count(cfg, "n_steps", 1024);
    try {
        return fbmlt::TimeGrid(horizon, n_steps);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: \"horizon\"/\"n_steps\": ") + e.what());
    }
}

fbmlt::EstimatorConfig estimator_fields(const ordered_json& cfg) {
    fbmlt::EstimatorConfig est;
    const auto* e = find(cfg, "estimator");
    if (!e) return est;
    if (!e->is_object()) throw ConfigError("config: \"estimator\" must be an object");
    reject_unknown_keys(*e, {"kind", "epsilon", "cutoff", "du"}, "estimator.");
    const std::string kind = get_string(*e, "kind", "kernel");
    if (kind == "kernel") {
        est.kind = fbmlt::EstimatorKind::kernel;
        est.epsilon = get_number(*e, "epsilon", 0.0);
        if (est.epsilon < 0.0) throw ConfigError("config: \"estimator.epsilon\" must be >= 0");
    } else if (kind == "fourier") {
        est.kind = fbmlt::EstimatorKind::fourier;
        est.fourier_cutoff = get_number(*e, "cutoff", 200.0);
        est.mode_spacing = get_number(*e, "du", 0.05);
        if (!(est.fourier_cutoff > 0.0)) throw ConfigError("config: \"estimator.cutoff\" must be > 0");
        if (!(est.mode_spacing > 0.0)) throw ConfigError("config: \"estimator.du\" must be > 0");
    } else {
        throw ConfigError("config: \"estimator.kind\" must be \"kernel\" or \"fourier\"");
    }
    return est;
}

//! Convert a parsed config to the deterministic report document.
fbmlt::JsonValue echo_json(const ordered_json& j) {
    using fbmlt::JsonValue;
    switch (j.type()) {
        case ordered_json::value_t::object: {
            JsonValue obj = JsonValue::object();
            for (const auto& [key, value] : j.items()) obj[key] = echo_json(value);
            return obj;
        }
        case ordered_json::value_t::array: {
            JsonValue arr = JsonValue::array();
            for (const auto& item : j) arr.push_back(echo_json(item));
            return arr;
        }
        case ordered_json::value_t::string: return JsonValue::string(j.get<std::string>());
        case ordered_json::value_t::boolean: return JsonValue::boolean(j.get<bool>());
        case ordered_json::value_t::number_integer:
            return JsonValue::integer(j.get<std::int64_t>());
        case ordered_json::value_t::number_unsigned:
            return JsonValue::unsigned_integer(j.get<std::uint64_t>());
        case ordered_json::value_t::number_float: return JsonValue::number(j.get<double>());
        default: return JsonValue();
    }
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file " + path.string());
    out << content;
    if (!out) throw ConfigError("failed writing output file " + path.string());
}

// ---------------------------------------------------------------------------
// per-command default configurations (also the documented schema examples)
// ---------------------------------------------------------------------------

const char* default_config_for(const std::string& command) {
    if (command == "simulate") {
        return R"({
  "schema_version": 1,
  "hurst": 0.7,
  "horizon": 1.0,
  "n_steps": 1024,
  "n_paths": 200,
  "seed": 20231,
  "generator": "circulant",
  "emit_paths": 3
})";
    }
    if (command == "localtime") {
        return R"({
  "schema_version": 1,
  "hurst": 0.5,
  "horizon": 1.0,
  "n_steps": 2048,
  "seed": 977,
  "estimator": {"kind": "kernel", "epsilon": 0.02},
  "x_lo": -2.0,
  "x_hi": 2.0,
  "x_step": 0.02,
  "t_points": [0.25, 0.5, 0.75, 1.0]
})";
    }
    if (command == "verify") {
        return R"({
  "schema_version": 1,
  "seed": 4242,
  "variance_dims": [2, 3, 4, 5, 6],
  "variance_trials": 20000,
  "moment_grid_points": 20,
  "convexity_hursts": [0.51, 0.75, 0.99],
  "convexity_trials": 100000,
  "sigma_horizon": 1.0,
  "sigma_h0": 0.5,
  "sigma_eta": 0.05,
  "det_hursts": [0.2, 0.5],
  "det_orders": [2, 4],
  "det_budget": 20000,
  "det_center_hursts": [0.6, 0.75],
  "det_center_eta": 0.05,
  "corr_h0": 0.75,
  "corr_offsets": [0.1, 0.05, 0.02, 0.01],
  "corr_budget": 5000
})";
    }
    if (command == "scaling") {
        return R"({
  "schema_version": 1,
  "hursts": [0.3, 0.5, 0.7],
  "horizon": 1.0,
  "n_steps": 1024,
  "n_paths": 1000,
  "moment": 2,
  "lag_steps": [16, 32, 64, 128, 256, 512],
  "seed": 7115
})";
    }
    if (command == "converge") {
        return R"({
  "schema_version": 1,
  "h_center": 0.6,
  "h_list": [0.75, 0.7, 0.65, 0.62],
  "horizon": 1.0,
  "n_steps": 256,
  "n_paths": 1500,
  "estimator": {"kind": "kernel", "epsilon": 0.02},
  "probes": [[0.0, 0.5], [0.0, 1.0], [0.5, 1.0]],
  "master_seed": 3301,
  "n_permutations": 200,
  "permutation_seed": 91,
  "null_check": true
})";
    }
    throw ConfigError("unknown command"); // unreachable: CLI restricts choices
}

// ---------------------------------------------------------------------------
// commands
// ---------------------------------------------------------------------------

struct RunContext {
    ordered_json cfg;
    fs::path out_dir;
    int workers = 1;
    bool fixed_timestamp = false;
    fbmlt::ExperimentReport report;

    void add_artifact(const std::string& name, const std::string& content) {
        write_text_file(out_dir / name, content);
        report.artifacts.push_back(name);
    }
};

void run_simulate(RunContext& ctx) {
    reject_unknown_keys(ctx.cfg,
                        {"schema_version", "hurst", "horizon", "n_steps", "n_paths", "seed",
                         "generator", "emit_paths"},
                        "");
    const auto h = hurst_field(get_number(ctx.cfg, "hurst", 0.5));
    const fbmlt::TimeGrid grid = grid_fields(ctx.cfg);
    const std::size_t n_paths = get_count(ctx.cfg, "n_paths", 100);
    const std::uint64_t seed = get_seed(ctx.cfg, "seed", 1);
    const std::string generator = get_string(ctx.cfg, "generator", "circulant");
    const std::size_t emit = std::min(get_count(ctx.cfg, "emit_paths", 1), n_paths);
    if (generator != "circulant" && generator != "cholesky") {
        throw ConfigError("config: \"generator\" must be \"circulant\" or \"cholesky\"");
    }
    if (n_paths == 0) throw ConfigError("config: \"n_paths\" must be >= 1 for simulate");

    ctx.report.master_seed = seed;
    const bool circulant = generator == "circulant";

    // moment sanity: mean of B(T)^2 against T^{2H} within 5 standard errors
    double sum_sq = 0.0, sum_quad = 0.0;
    std::vector<fbmlt::ChartSeries> series;
    for (std::size_t r = 0; r < n_paths; ++r) {
        const std::uint64_t path_seed = fbmlt::RandomStream::replica_seed(seed, r);
        const fbmlt::SamplePath path = circulant ? fbmlt::generate_circulant(h, grid, path_seed)
                                                 : fbmlt::generate_cholesky(h, grid, path_seed);
        const double end = path.values.back();
        sum_sq += end * end;
        sum_quad += end * end * end * end;
        if (r < emit) {
            std::ostringstream csv;
            fbmlt::write_path_csv(path, csv);
            ctx.add_artifact("path_" + std::to_string(r) + ".csv", csv.str());
            fbmlt::ChartSeries s;
            s.label = "path " + std::to_string(r);
            for (std::size_t i = 0; i < path.values.size(); ++i) {
                s.x.push_back(grid.dt() * static_cast<double>(i));
                s.y.push_back(path.values[i]);
            }
            series.push_back(std::move(s));
        }
    }
    const double n = static_cast<double>(n_paths);
    const double mean_sq = sum_sq / n;
    const double target = std::pow(grid.horizon, 2.0 * h.h);
    const double se = std::sqrt(std::max(sum_quad / n - mean_sq * mean_sq, 0.0) / n);
    const double tol = 5.0 * std::max(se, 1e-12);
    ctx.report.checks.push_back({"terminal_variance",
                                 "E B(T)^2 vs T^{2H}, n_paths=" + std::to_string(n_paths),
                                 mean_sq - target, tol,
                                 std::fabs(mean_sq - target) <= tol, ""});

    if (!series.empty()) {
        ctx.add_artifact("paths.svg",
                         fbmlt::svg_line_chart("sample paths, H=" + fbmlt::format_double(h.h),
                                               "t", "B(t)", series));
    }
}

void run_localtime(RunContext& ctx) {
    reject_unknown_keys(ctx.cfg,
                        {"schema_version", "hurst", "horizon", "n_steps", "seed", "estimator",
                         "x_lo", "x_hi", "x_step", "t_points"},
                        "");
    const auto h = hurst_field(get_number(ctx.cfg, "hurst", 0.5));
    const fbmlt::TimeGrid grid = grid_fields(ctx.cfg);
    const std::uint64_t seed = get_seed(ctx.cfg, "seed", 1);
    const fbmlt::EstimatorConfig est = estimator_fields(ctx.cfg);
    const double x_lo = get_number(ctx.cfg, "x_lo", -2.0);
    const double x_hi = get_number(ctx.cfg, "x_hi", 2.0);
    const double x_step = get_number(ctx.cfg, "x_step", 0.02);
    if (!(x_step > 0.0) || !(x_hi > x_lo)) {
        throw ConfigError("config: need \"x_step\" > 0 and \"x_hi\" > \"x_lo\"");
    }
    const std::vector<double> t_points =
        get_number_list(ctx.cfg, "t_points", {0.5 * grid.horizon, grid.horizon});
    for (double t : t_points) {
        if (!(t > 0.0) || t > grid.horizon) {
            throw ConfigError("config: \"t_points\" must lie in (0, horizon]");
        }
    }

    ctx.report.master_seed = seed;
    std::vector<double> x_grid;
    for (double x = x_lo; x <= x_hi + 1e-12 * std::max(1.0, std::fabs(x_hi)); x += x_step) {
        x_grid.push_back(x);
    }

    const fbmlt::SamplePath path = fbmlt::generate_circulant(h, grid, seed);
    const double eps = (est.epsilon > 0.0) ? est.epsilon
                                           : fbmlt::increment_scale_bandwidth(grid, h.h);
    const fbmlt::LocalTimeField field =
        (est.kind == fbmlt::EstimatorKind::kernel)
            ? fbmlt::kernel_local_time(path, x_grid, t_points, eps)
            : fbmlt::fourier_local_time(path, x_grid, t_points, est.fourier_cutoff,
                                        est.mode_spacing);

    // mass conservation: spatial mass of the final column vs time spent in window
    const double t_last = t_points.back();
    const fbmlt::OccupationHistogram hist =
        fbmlt::occupation_histogram(path, t_last, x_lo, x_hi, x_grid.size());
    const double in_window = t_last - hist.overflow;
    const double mass = fbmlt::trapezoid_mass(field, t_points.size() - 1);
    const double tol = 0.05 * t_last + 2.0 * eps; // edge spill is O(eps)
    ctx.report.checks.push_back({"occupation_mass",
                                 "trapezoid mass vs in-window time at t=" +
                                     fbmlt::format_double(t_last),
                                 mass - in_window, tol, std::fabs(mass - in_window) <= tol, ""});

    std::ostringstream csv;
    fbmlt::write_field_csv(field, csv);
    ctx.add_artifact("field.csv", csv.str());

    fbmlt::JsonValue meta = fbmlt::JsonValue::object();
    meta["estimator"] = fbmlt::JsonValue::string(
        est.kind == fbmlt::EstimatorKind::kernel ? "kernel" : "fourier");
    fbmlt::JsonValue params = fbmlt::JsonValue::object();
    if (est.kind == fbmlt::EstimatorKind::kernel) {
        params["epsilon"] = fbmlt::JsonValue::number(eps);
    } else {
        params["cutoff"] = fbmlt::JsonValue::number(est.fourier_cutoff);
        params["du"] = fbmlt::JsonValue::number(est.mode_spacing);
    }
    meta["params"] = std::move(params);
    meta["seed"] = fbmlt::JsonValue::unsigned_integer(seed);
    meta["hurst"] = fbmlt::JsonValue::number(h.h);
    fbmlt::JsonValue grid_meta = fbmlt::JsonValue::object();
    grid_meta["horizon"] = fbmlt::JsonValue::number(grid.horizon);
    grid_meta["n_steps"] = fbmlt::JsonValue::unsigned_integer(grid.n_steps);
    grid_meta["x_lo"] = fbmlt::JsonValue::number(x_lo);
    grid_meta["x_hi"] = fbmlt::JsonValue::number(x_hi);
    grid_meta["x_step"] = fbmlt::JsonValue::number(x_step);
    meta["grid"] = std::move(grid_meta);
    write_text_file(ctx.out_dir / "field_meta.json", meta.dump());
    ctx.report.artifacts.push_back("field_meta.json");

    std::vector<fbmlt::ChartSeries> series;
    for (std::size_t it = 0; it < t_points.size(); ++it) {
        fbmlt::ChartSeries s;
        s.label = "t = " + fbmlt::format_double(t_points[it]);
        s.x = x_grid;
        for (std::size_t ix = 0; ix < x_grid.size(); ++ix) s.y.push_back(field.at(ix, it));
        series.push_back(std::move(s));
    }
    ctx.add_artifact("field.svg",
                     fbmlt::svg_line_chart("estimated local time, H=" + fbmlt::format_double(h.h),
                                           "x", "L(x, t)", series));
}

void run_verify(RunContext& ctx) {
    reject_unknown_keys(ctx.cfg,
                        {"schema_version", "seed", "variance_dims", "variance_trials",
                         "moment_grid_points", "convexity_hursts", "convexity_trials",
                         "sigma_horizon", "sigma_h0", "sigma_eta", "det_hursts", "det_orders",
                         "det_budget", "det_center_hursts", "det_center_eta", "corr_h0",
                         "corr_offsets", "corr_budget"},
                        "");
    const std::uint64_t seed = get_seed(ctx.cfg, "seed", 4242);
    ctx.report.master_seed = seed;
    auto& checks = ctx.report.checks;

    // 1. variance lower bound
    {
        const auto dims = get_number_list(ctx.cfg, "variance_dims", {2, 3, 4, 5, 6});
        const std::size_t trials = get_count(ctx.cfg, "variance_trials", 20000);
        double worst = std::numeric_limits<double>::infinity();
        for (double d : dims) {
            worst = std::min(worst, fbmlt::check_variance_lower_bound(
                                        static_cast<int>(d), trials,
                                        fbmlt::RandomStream::replica_seed(seed, 11)));
        }
        checks.push_back({"variance_lower_bound",
                          "dims 2..6, trials=" + std::to_string(trials), worst, 1.0 - 1e-9,
                          worst >= 1.0 - 1e-9, ""});
    }

    // 2. absolute-moment integral vs closed form
    {
        const std::size_t points = get_count(ctx.cfg, "moment_grid_points", 20);
        double worst = 0.0;
        for (std::size_t i = 0; i < points; ++i) {
            const double a = 0.1 + 2.0 * static_cast<double>(i % 5);
            const double alpha = 0.15 + 0.35 * static_cast<double>(i / 5);
            const auto [numeric, closed] = fbmlt::check_gaussian_moment_integral(a, alpha);
            worst = std::max(worst, std::fabs(numeric - closed) / closed);
        }
        checks.push_back({"gaussian_moment_integral",
                          std::to_string(points) + "-point (a,alpha) grid", worst, 1e-8,
                          worst <= 1e-8, ""});
    }

    // 3. sigma-integral bound grid + quadrature agreement
    {
        const double horizon = get_number(ctx.cfg, "sigma_horizon", 1.0);
        const double h0 = get_number(ctx.cfg, "sigma_h0", 0.5);
        const double eta = get_number(ctx.cfg, "sigma_eta", 0.05);
        const auto grid_result = fbmlt::sigma_bound_grid_check(horizon, h0, eta, 20, 20, 7);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            // worst pairing H = 0.52, delta = 0.32 keeps H(1+2*delta) < 1
            const double delta = 0.05 + 0.27 * (i % 10) / 9.0;
            const double t = horizon * (i / 10) / 10.0;
            const double w = (horizon - t) * 0.5 + 1e-3;
            const auto hq = fbmlt::HurstParam(0.25 + 0.03 * (i / 10));
            const double closed = fbmlt::sigma_integral(hq, delta, t, w, horizon);
            const double quad = fbmlt::sigma_integral_quadrature(hq, delta, t, w);
            worst = std::max(worst, std::fabs(closed - quad) / std::max(closed, 1e-30));
        }
        checks.push_back({"sigma_integral_bound",
                          "T=" + fbmlt::format_double(horizon) + ", 20x20x7 grid, H0=" +
                              fbmlt::format_double(h0) + ", eta=" + fbmlt::format_double(eta) +
                              ", 100 quadrature spot checks",
                          static_cast<double>(grid_result.violations), 0.0,
                          grid_result.violations == 0 && worst <= 1e-8,
                          "worst closed-form vs quadrature mismatch = " +
                              fbmlt::format_double(worst)});
    }

    // 4. determinant lower bound and neighborhood positivity
    {
        const auto hursts = get_number_list(ctx.cfg, "det_hursts", {0.2, 0.5});
        const auto orders = get_number_list(ctx.cfg, "det_orders", {2, 4});
        const std::size_t budget = get_count(ctx.cfg, "det_budget", 20000);
        double worst_margin = std::numeric_limits<double>::infinity();
        for (double hv : hursts) {
            for (double mv : orders) {
                const int m = static_cast<int>(mv);
                // scan window tops out at hv so every point stays in H <= 1/2
                const double eta = std::min(0.05, 0.4 * hv);
                const auto scan = fbmlt::determinant_scan(
                    fbmlt::HurstParam(hv - eta), eta, m, budget,
                    fbmlt::RandomStream::replica_seed(seed, 13), 1.0);
                const double bound = std::pow(2.0, -3.0 * m);
                for (double det : scan.min_dets) worst_margin = std::min(worst_margin, det - bound);
            }
        }
        const auto centers = get_number_list(ctx.cfg, "det_center_hursts", {0.6, 0.75});
        const double eta_c = get_number(ctx.cfg, "det_center_eta", 0.05);
        double min_det = std::numeric_limits<double>::infinity();
        for (double h0 : centers) {
            const auto scan = fbmlt::determinant_scan(
                fbmlt::HurstParam(h0), eta_c, 4, budget,
                fbmlt::RandomStream::replica_seed(seed, 17), 1.0);
            for (double det : scan.min_dets) min_det = std::min(min_det, det);
        }
        checks.push_back({"determinant_lower_bound",
                          "H <= 1/2 scans vs 2^{-3m}; positivity near H0 in {0.6,0.75}, m=4",
                          worst_margin, 0.0, worst_margin >= 0.0 && min_det > 0.0,
                          "min determinant near H0 = " + fbmlt::format_double(min_det)});
    }

    // 5. correlation uniformity: sup difference decreasing in the offset
    {
        const double h0 = get_number(ctx.cfg, "corr_h0", 0.75);
        const auto offsets = get_number_list(ctx.cfg, "corr_offsets", {0.1, 0.05, 0.02, 0.01});
        const std::size_t budget = get_count(ctx.cfg, "corr_budget", 5000);
        std::vector<double> sups;
        for (double d : offsets) {
            sups.push_back(fbmlt::correlation_sup_difference(
                fbmlt::HurstParam(h0), fbmlt::HurstParam(h0 + d), budget,
                fbmlt::RandomStream::replica_seed(seed, 19)));
        }
        bool decreasing = true;
        for (std::size_t i = 1; i < sups.size(); ++i) decreasing &= sups[i] < sups[i - 1];
        std::string witness;
        for (std::size_t i = 0; i < sups.size(); ++i) {
            witness += (i ? ", " : "sup|rho_H - rho_H0| = ") + fbmlt::format_double(sups[i]);
        }
        checks.push_back({"correlation_uniformity", "H0=0.75, offsets {0.1,0.05,0.02,0.01}",
                          sups.empty() ? 0.0 : sups.back(), sups.empty() ? 0.0 : sups.front(),
                          decreasing, witness});
    }

    // 6. convexity inequality
    {
        const auto hursts = get_number_list(ctx.cfg, "convexity_hursts", {0.51, 0.75, 0.99});
        const std::size_t trials = get_count(ctx.cfg, "convexity_trials", 100000);
        double worst = std::numeric_limits<double>::infinity();
        for (double hv : hursts) {
            worst = std::min(worst, fbmlt::check_convexity_inequality(
                                        fbmlt::HurstParam(hv), trials,
                                        fbmlt::RandomStream::replica_seed(seed, 23)));
        }
        checks.push_back({"convexity_inequality",
                          "H in {0.51,0.75,0.99}, trials=" + std::to_string(trials), worst,
                          -1e-12, worst >= -1e-12, ""});
    }
}

void run_scaling(RunContext& ctx) {
    reject_unknown_keys(ctx.cfg,
                        {"schema_version", "hursts", "horizon", "n_steps", "n_paths", "moment",
                         "lag_steps", "seed"},
                        "");
    const auto hursts = get_number_list(ctx.cfg, "hursts", {0.3, 0.5, 0.7});
    if (hursts.empty()) throw ConfigError("config: \"hursts\" must be non-empty");
    const fbmlt::TimeGrid grid = grid_fields(ctx.cfg);
    const std::size_t n_paths = get_count(ctx.cfg, "n_paths", 1000);
    const int m = static_cast<int>(get_number(ctx.cfg, "moment", 2));
    const auto lag_steps = get_number_list(ctx.cfg, "lag_steps", {16, 32, 64, 128, 256, 512});
    const std::uint64_t seed = get_seed(ctx.cfg, "seed", 7115);
    if (m < 2 || m % 2 != 0) throw ConfigError("config: \"moment\" must be even and >= 2");
    ctx.report.master_seed = seed;

    std::vector<double> lags;
    for (double s : lag_steps) {
        if (!(s >= 1.0) || s > static_cast<double>(grid.n_steps)) {
            throw ConfigError("config: \"lag_steps\" must lie in [1, n_steps]");
        }
        lags.push_back(grid.dt() * s);
    }

    std::vector<fbmlt::ChartSeries> series;
    std::vector<double> slopes;
    for (std::size_t ih = 0; ih < hursts.size(); ++ih) {
        const auto h = hurst_field(hursts[ih]);
        fbmlt::EnsembleConfig cfg;
        cfg.grid = grid;
        cfg.x_grid = {0.0};
        cfg.t_grid = lags;
        cfg.estimator.kind = fbmlt::EstimatorKind::kernel;
        cfg.estimator.epsilon = 0.0; // increment-scale rule per H
        cfg.n_paths = n_paths;
        cfg.master_seed = fbmlt::RandomStream::replica_seed(seed, ih);
        cfg.workers = ctx.workers;
        const fbmlt::Ensemble e = fbmlt::build_ensemble(h, cfg);
        const fbmlt::MomentScaling fit =
            fbmlt::moment_scaling(e, m, fbmlt::LagDirection::time, lags);
        slopes.push_back(fit.slope);

        const double threshold = static_cast<double>(m) * (1.0 - h.h) - 0.3;
        ctx.report.checks.push_back(
            {"moment_slope_H=" + fbmlt::format_double(h.h),
             "m=" + std::to_string(m) + ", slope vs m(1-H)-0.3, r2=" +
                 fbmlt::format_double(fit.r_squared),
             fit.slope, threshold, fit.slope >= threshold && fit.r_squared >= 0.95, ""});

        std::ostringstream csv;
        fbmlt::write_scaling_csv(fit, csv);
        ctx.add_artifact("scaling_H" + fbmlt::format_double(h.h) + ".csv", csv.str());

        fbmlt::ChartSeries data;
        data.label = "H = " + fbmlt::format_double(h.h);
        for (std::size_t i = 0; i < fit.lags.size(); ++i) {
            data.x.push_back(std::log(fit.lags[i]));
            data.y.push_back(fit.log_moments[i]);
        }
        series.push_back(std::move(data));
        fbmlt::ChartSeries fit_line;
        fit_line.label = "fit " + fbmlt::format_double(fit.slope);
        fit_line.x = series.back().x;
        for (double lx : fit_line.x) fit_line.y.push_back(fit.intercept + fit.slope * lx);
        series.push_back(std::move(fit_line));
    }
    bool ordered = true;
    for (std::size_t i = 1; i < slopes.size(); ++i) ordered &= slopes[i] < slopes[i - 1];
    if (hursts.size() > 1) {
        ctx.report.checks.push_back({"moment_slope_ordering",
                                     "slopes strictly decreasing in H",
                                     ordered ? 1.0 : 0.0, 1.0, ordered, ""});
    }
    ctx.add_artifact("scaling.svg",
                     fbmlt::svg_line_chart("moment scaling, m=" + std::to_string(m), "log lag",
                                           "log E|increment|^m", series));
}

void run_converge(RunContext& ctx) {
    reject_unknown_keys(ctx.cfg,
                        {"schema_version", "h_center", "h_list", "horizon", "n_steps", "n_paths",
                         "estimator", "probes", "master_seed", "ensemble_seeds",
                         "n_permutations", "permutation_seed", "null_check"},
                        "");
    const auto h_center = hurst_field(get_number(ctx.cfg, "h_center", 0.6));
    const auto h_list = get_number_list(ctx.cfg, "h_list", {0.75, 0.7, 0.65, 0.62});
    for (double hv : h_list) (void)hurst_field(hv);
    const fbmlt::TimeGrid grid = grid_fields(ctx.cfg);
    const std::size_t n_paths = get_count(ctx.cfg, "n_paths", 1500);
    const std::uint64_t master_seed = get_seed(ctx.cfg, "master_seed", 3301);
    const std::size_t n_perms = get_count(ctx.cfg, "n_permutations", 200);
    const std::uint64_t perm_seed = get_seed(ctx.cfg, "permutation_seed", 91);
    const bool null_check = [&] {
        const auto* v = find(ctx.cfg, "null_check");
        if (!v) return true;
        if (!v->is_boolean()) throw ConfigError("config: \"null_check\" must be a boolean");
        return v->get<bool>();
    }();
    ctx.report.master_seed = master_seed;

    fbmlt::ProbeSet probes = fbmlt::ProbeSet::defaults(grid.horizon);
    if (const auto* p = find(ctx.cfg, "probes")) {
        if (!p->is_array() || p->empty()) {
            throw ConfigError("config: \"probes\" must be a non-empty array of [x, t] pairs");
        }
        probes.points.clear();
        for (const auto& pair : *p) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
                !pair[1].is_number()) {
                throw ConfigError("config: \"probes\" must be a non-empty array of [x, t] pairs");
            }
            probes.points.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
    }

    // ensemble seeds: explicit list or derived from the master seed
    std::vector<std::uint64_t> seeds;
    if (const auto* s = find(ctx.cfg, "ensemble_seeds")) {
        if (!s->is_array() || s->size() != h_list.size() + 1) {
            throw ConfigError("config: \"ensemble_seeds\" must list one seed per h plus the center");
        }
        for (const auto& item : *s) {
            if (!item.is_number_integer() && !item.is_number_unsigned()) {
                throw ConfigError("config: \"ensemble_seeds\" entries must be integers");
            }
            seeds.push_back(item.get<std::uint64_t>());
        }
    } else {
        for (std::size_t i = 0; i <= h_list.size(); ++i) {
            seeds.push_back(fbmlt::RandomStream::replica_seed(master_seed, i));
        }
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError(
            "config: \"ensemble_seeds\" collide; ensembles must use independent seeds");
    }

    // shared grids: exactly the probe coordinates
    fbmlt::ConvergenceConfig cc;
    cc.base.grid = grid;
    for (const auto& [x, t] : probes.points) {
        cc.base.x_grid.push_back(x);
        cc.base.t_grid.push_back(t);
    }
    std::sort(cc.base.x_grid.begin(), cc.base.x_grid.end());
    cc.base.x_grid.erase(std::unique(cc.base.x_grid.begin(), cc.base.x_grid.end()),
                         cc.base.x_grid.end());
    std::sort(cc.base.t_grid.begin(), cc.base.t_grid.end());
    cc.base.t_grid.erase(std::unique(cc.base.t_grid.begin(), cc.base.t_grid.end()),
                         cc.base.t_grid.end());
    cc.base.estimator = estimator_fields(ctx.cfg);
    cc.base.n_paths = n_paths;
    cc.base.workers = ctx.workers;
    cc.ensemble_seeds = seeds;
    cc.n_permutations = n_perms;
    cc.permutation_seed = perm_seed;

    const fbmlt::ConvergenceCurve curve =
        fbmlt::convergence_curve(h_center, h_list, probes, cc);

    const fbmlt::KendallResult trend = fbmlt::kendall_decreasing_test(curve.distances);
    ctx.report.checks.push_back({"convergence_trend",
                                 "Kendall tau one-sided decrease over |h - h_center| descending",
                                 trend.p_value, 0.05, trend.p_value < 0.05,
                                 "tau = " + fbmlt::format_double(trend.tau)});

    if (null_check) {
        fbmlt::EnsembleConfig a_cfg = cc.base, b_cfg = cc.base;
        a_cfg.master_seed = fbmlt::RandomStream::replica_seed(master_seed, 101);
        b_cfg.master_seed = fbmlt::RandomStream::replica_seed(master_seed, 202);
        const auto a = fbmlt::probe_matrix(fbmlt::build_ensemble(h_center, a_cfg), probes);
        const auto b = fbmlt::probe_matrix(fbmlt::build_ensemble(h_center, b_cfg), probes);
        const fbmlt::EnergyTestResult null_test = fbmlt::energy_permutation_test(
            a, b, n_perms, fbmlt::RandomStream::replica_seed(perm_seed, 777));
        ctx.report.checks.push_back({"self_distance_null",
                                     "same-H independent ensembles, p must be >= 0.05",
                                     null_test.p_value, 0.05, null_test.p_value >= 0.05,
                                     "statistic = " + fbmlt::format_double(null_test.statistic)});
    }

    std::ostringstream csv;
    fbmlt::write_convergence_csv(curve, csv);
    ctx.add_artifact("convergence.csv", csv.str());
    fbmlt::ChartSeries s;
    s.label = "energy distance";
    s.x = curve.h_values;
    s.y = curve.distances;
    ctx.add_artifact("convergence.svg",
                     fbmlt::svg_line_chart("convergence to H0 = " +
                                               fbmlt::format_double(h_center.h),
                                           "H", "energy distance", {s}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"local-time experiment runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir_str = "out";
    int workers = 1;
    bool fixed_timestamp = false;

    const std::vector<std::string> commands = {"simulate", "localtime", "verify", "scaling",
                                               "converge"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config path (omit for defaults)");
        sub->add_option("--out", out_dir_str, "output directory");
        sub->add_option("--workers", workers, "worker thread count");
        sub->add_flag("--fixed-timestamp", fixed_timestamp,
                      "write wall_ms = 0 for byte-stable reports");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    const auto started = std::chrono::steady_clock::now();
    RunContext ctx;
    try {
        if (config_path.empty()) {
            ctx.cfg = ordered_json::parse(default_config_for(command));
        } else {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("config: cannot open file " + config_path);
            try {
                ctx.cfg = ordered_json::parse(in);
            } catch (const std::exception& e) {
                throw ConfigError(std::string("config: parse failure: ") + e.what());
            }
        }
        if (!ctx.cfg.is_object()) throw ConfigError("config: top level must be a JSON object");
        const auto* sv = find(ctx.cfg, "schema_version");
        if (!sv || !sv->is_number_integer() || sv->get<int>() != 1) {
            throw ConfigError("config: \"schema_version\" must be the integer 1");
        }
        if (workers < 1) throw ConfigError("config: --workers must be >= 1");

        ctx.out_dir = fs::path(out_dir_str);
        std::error_code ec;
        fs::create_directories(ctx.out_dir, ec);
        if (ec) throw ConfigError("cannot create output directory " + out_dir_str);

        ctx.workers = workers;
        ctx.fixed_timestamp = fixed_timestamp;
        ctx.report.command = command;
        ctx.report.config = echo_json(ctx.cfg);

        if (command == "simulate") run_simulate(ctx);
        else if (command == "localtime") run_localtime(ctx);
        else if (command == "verify") run_verify(ctx);
        else if (command == "scaling") run_scaling(ctx);
        else run_converge(ctx);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        // precondition violations surfaced by library modules: still config-class
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    ctx.report.wall_ms = ctx.fixed_timestamp ? 0 : static_cast<std::int64_t>(elapsed.count());

    try {
        write_text_file(ctx.out_dir / "report.json", ctx.report.to_json().dump());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    for (const auto& c : ctx.report.checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  statistic="
                  << fbmlt::format_double(c.statistic) << "  threshold="
                  << fbmlt::format_double(c.threshold) << "\n";
    }
    return ctx.report.all_pass() ? 0 : 1;
}
