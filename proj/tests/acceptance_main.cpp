// Acceptance gate: one line per criterion, nonzero exit if any fail.

#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <utility>
#include <vector>

#include "fbmlt/convergence.hpp"
#include "fbmlt/path_gen.hpp"
#include "fbmlt/report.hpp"
#include "fbmlt/rng.hpp"
#include "fbmlt/stats.hpp"
#include "fbmlt/theory_checks.hpp"

namespace fs = std::filesystem;
using namespace fbmlt;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream ss;
    ss << std::setprecision(digits) << v;
    return ss.str();
}

// ---- shared builders ----------------------------------------------------

Ensemble origin_ensemble(double hurst, std::size_t n_steps, std::size_t n_paths,
                         std::uint64_t seed) {
    EnsembleConfig cfg;
    cfg.grid = TimeGrid(1.0, n_steps);
    cfg.x_grid = {0.0};
    cfg.t_grid = {1.0};
    cfg.estimator.kind = EstimatorKind::kernel;
    cfg.estimator.epsilon = 0.0; // increment-scale bandwidth rule
    cfg.n_paths = n_paths;
    cfg.master_seed = seed;
    return build_ensemble(HurstParam(hurst), cfg);
}

double local_time_mean_target(double hurst) {
    // E L^1_0 = 1 / ((1 - H) sqrt(2 pi))
    return 1.0 / ((1.0 - hurst) * std::sqrt(2.0 * std::acos(-1.0)));
}

// ---- criterion bodies ----------------------------------------------------

Outcome criterion_local_time_mean() {
    double worst = 0.0;
    std::string detail;
    std::uint64_t seed = 101;
    for (double hurst : {0.5, 0.7}) {
        const Ensemble e = origin_ensemble(hurst, 2048, 10000, seed++);
        double sum = 0.0;
        for (const LocalTimeField& f : e.fields) sum += f.at(0, 0);
        const double mean = sum / static_cast<double>(e.n_paths());
        const double rel = std::fabs(mean / local_time_mean_target(hurst) - 1.0);
        worst = std::max(worst, rel);
        detail += "H=" + fmt(hurst, 2) + " rel=" + fmt(rel) + " ";
    }
    return {worst <= 0.03, detail + "tol 0.03"};
}

Outcome criterion_occupation_formula() {
    const TimeGrid grid(1.0, 2048);
    const CirculantGenerator gen(HurstParam(0.5), grid);
    RandomStream coeffs(202);
    std::vector<std::array<double, 4>> cubics;
    for (int j = 0; j < 10; ++j) {
        cubics.push_back({2.0 * coeffs.next_uniform() - 1.0, 2.0 * coeffs.next_uniform() - 1.0,
                          2.0 * coeffs.next_uniform() - 1.0, 2.0 * coeffs.next_uniform() - 1.0});
    }
    const double x_lo = -4.0, x_hi = 4.0;
    const std::size_t n_bins = 800; // bin width 0.01
    double worst = 0.0;
    for (std::size_t r = 0; r < 100; ++r) {
        const SamplePath path = gen.generate(RandomStream::replica_seed(201, r));
        const OccupationHistogram hist = occupation_histogram(path, 1.0, x_lo, x_hi, n_bins);
        for (const auto& c : cubics) {
            const auto g = [&c](double u) {
                if (std::fabs(u) > 2.0) return 0.0;
                return c[0] + u * (c[1] + u * (c[2] + u * c[3]));
            };
            double via_hist = 0.0;
            for (std::size_t i = 0; i < n_bins; ++i) {
                const double center = x_lo + (static_cast<double>(i) + 0.5) * hist.bin_width;
                via_hist += g(center) * hist.masses[i];
            }
            const double direct = occupation_integral(path, 1.0, g);
            const double rel = std::fabs(via_hist - direct) / std::max(std::fabs(direct), 0.05);
            worst = std::max(worst, rel);
        }
    }
    return {worst <= 0.02, "max rel err " + fmt(worst) + " over 100 paths x 10 functions, tol 0.02"};
}

Outcome criterion_estimator_equivalence() {
    EnsembleConfig cfg;
    cfg.grid = TimeGrid(1.0, 2048);
    for (int i = -20; i <= 20; ++i) cfg.x_grid.push_back(0.05 * i);
    cfg.t_grid = {0.25, 0.5, 0.75, 1.0};
    cfg.n_paths = 20;
    cfg.master_seed = 301;
    cfg.estimator.kind = EstimatorKind::kernel;
    cfg.estimator.epsilon = 0.02;
    const Ensemble kernel = build_ensemble(HurstParam(0.5), cfg);
    cfg.estimator.kind = EstimatorKind::fourier;
    cfg.estimator.fourier_cutoff = 200.0;
    cfg.estimator.mode_spacing = 0.05;
    const Ensemble fourier = build_ensemble(HurstParam(0.5), cfg);

    const std::size_t cells = cfg.x_grid.size() * cfg.t_grid.size();
    double sup = 0.0, field_max = 0.0;
    for (std::size_t cell = 0; cell < cells; ++cell) {
        double mk = 0.0, mf = 0.0;
        for (std::size_t r = 0; r < cfg.n_paths; ++r) {
            mk += kernel.fields[r].values[cell];
            mf += fourier.fields[r].values[cell];
        }
        mk /= static_cast<double>(cfg.n_paths);
        mf /= static_cast<double>(cfg.n_paths);
        sup = std::max(sup, std::fabs(mk - mf));
        field_max = std::max(field_max, std::fabs(mk));
    }
    const double rel = sup / field_max;
    return {rel <= 0.05, "sup|fourier-kernel| = " + fmt(rel) + " of field max, tol 0.05"};
}

Outcome criterion_lemma_suite() {
    double worst_ratio = std::numeric_limits<double>::infinity();
    for (int dim = 2; dim <= 6; ++dim) {
        worst_ratio = std::min(worst_ratio, check_variance_lower_bound(dim, 100000, 401));
    }
    double worst_moment = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double a = 0.1 + 2.0 * (i % 5);
        const double alpha = 0.15 + 0.35 * (i / 5);
        const auto [numeric, closed] = check_gaussian_moment_integral(a, alpha);
        worst_moment = std::max(worst_moment, std::fabs(numeric - closed) / closed);
    }
    double worst_margin = std::numeric_limits<double>::infinity();
    for (double hv : {0.51, 0.75, 0.99}) {
        worst_margin =
            std::min(worst_margin, check_convexity_inequality(HurstParam(hv), 1000000, 403));
    }
    const bool pass =
        worst_ratio >= 1.0 - 1e-9 && worst_moment <= 1e-8 && worst_margin >= -1e-12;
    return {pass, "variance ratio " + fmt(worst_ratio, 12) + ", moment err " +
                      fmt(worst_moment, 3) + ", convexity margin " + fmt(worst_margin, 3)};
}

Outcome criterion_sigma_bound() {
    const GridCheckResult grid = sigma_bound_grid_check(1.0, 0.5, 0.05, 50, 50, 11);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double delta = 0.05 + 0.27 * (i % 10) / 9.0;
        const double t = (i / 10) / 10.0;
        const double w = (1.0 - t) * 0.5 + 1e-3;
        const HurstParam h(0.25 + 0.03 * (i / 10));
        const double closed = sigma_integral(h, delta, t, w, 1.0);
        const double quad = sigma_integral_quadrature(h, delta, t, w);
        worst = std::max(worst, std::fabs(closed - quad) / std::max(closed, 1e-30));
    }
    const bool pass = grid.violations == 0 && worst <= 1e-8;
    return {pass, std::to_string(grid.violations) + " violations on " +
                      std::to_string(grid.cells_checked) + " cells, quadrature err " +
                      fmt(worst, 3)};
}

Outcome criterion_determinant_bounds() {
    double worst_margin = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 601;
    for (double hv : {0.2, 0.35, 0.5}) {
        for (int m : {2, 4}) {
            const double eta = std::min(0.05, 0.4 * hv); // window tops out at hv <= 1/2
            const DetScanResult scan =
                determinant_scan(HurstParam(hv - eta), eta, m, 100000, seed++, 1.0);
            const double bound = std::pow(2.0, -3.0 * m);
            for (double det : scan.min_dets) {
                worst_margin = std::min(worst_margin, det - bound);
            }
        }
    }
    double min_det = std::numeric_limits<double>::infinity();
    for (double h0 : {0.6, 0.75}) {
        const DetScanResult scan = determinant_scan(HurstParam(h0), 0.05, 4, 100000, 602, 1.0);
        for (double det : scan.min_dets) min_det = std::min(min_det, det);
    }
    const bool pass = worst_margin >= 0.0 && min_det > 0.0;
    return {pass, "margin over 2^{-3m} " + fmt(worst_margin, 3) + ", min det near H0 " +
                      fmt(min_det, 3)};
}

Outcome criterion_correlation_uniformity() {
    std::vector<double> sups;
    for (double d : {0.10, 0.05, 0.02, 0.01}) {
        sups.push_back(correlation_sup_difference(HurstParam(0.75), HurstParam(0.75 + d),
                                                  5000, 701));
    }
    bool decreasing = true;
    std::string detail = "sups";
    for (std::size_t i = 0; i < sups.size(); ++i) {
        if (i > 0) decreasing &= sups[i] < sups[i - 1];
        detail += " " + fmt(sups[i]);
    }
    return {decreasing, detail};
}

Outcome criterion_moment_scaling() {
    const std::vector<double> lag_steps{16, 32, 64, 128, 256, 512};
    std::vector<double> slopes;
    std::string detail;
    bool pass = true;
    std::uint64_t seed = 801;
    for (double hv : {0.3, 0.5, 0.7}) {
        EnsembleConfig cfg;
        cfg.grid = TimeGrid(1.0, 2048);
        cfg.x_grid = {0.0};
        for (double k : lag_steps) cfg.t_grid.push_back(k * cfg.grid.dt());
        cfg.estimator.kind = EstimatorKind::kernel;
        cfg.estimator.epsilon = 0.0;
        cfg.n_paths = 5000;
        cfg.master_seed = seed++;
        const Ensemble e = build_ensemble(HurstParam(hv), cfg);
        const MomentScaling ms = moment_scaling(e, 2, LagDirection::time, cfg.t_grid);
        const double floor = 2.0 * (1.0 - hv) - 0.3;
        pass &= ms.slope >= floor && ms.r_squared >= 0.95;
        slopes.push_back(ms.slope);
        detail += "H=" + fmt(hv, 2) + " slope=" + fmt(ms.slope) + " r2=" + fmt(ms.r_squared) + " ";
    }
    for (std::size_t i = 1; i < slopes.size(); ++i) pass &= slopes[i] < slopes[i - 1];
    return {pass, detail};
}

Outcome criterion_headline_convergence() {
    ConvergenceConfig cfg;
    cfg.base.grid = TimeGrid(1.0, 512);
    cfg.base.x_grid = {0.0, 0.5};
    cfg.base.t_grid = {0.5, 1.0};
    cfg.base.estimator.kind = EstimatorKind::kernel;
    cfg.base.estimator.epsilon = 0.02;
    cfg.base.n_paths = 2000;
    const std::uint64_t master = 3301;
    for (std::uint64_t i = 0; i < 5; ++i) {
        cfg.ensemble_seeds.push_back(RandomStream::replica_seed(master, i));
    }
    cfg.n_permutations = 200;
    cfg.permutation_seed = 91;
    const ProbeSet probes = ProbeSet::defaults(1.0);
    const std::vector<double> h_list{0.75, 0.70, 0.65, 0.62};
    const ConvergenceCurve curve =
        convergence_curve(HurstParam(0.6), h_list, probes, cfg);
    const KendallResult trend = kendall_decreasing_test(curve.distances);

    // same-H null: independent center-law ensembles should not separate
    EnsembleConfig base = cfg.base;
    base.master_seed = RandomStream::replica_seed(master, 101);
    const Ensemble null_a = build_ensemble(HurstParam(0.6), base);
    base.master_seed = RandomStream::replica_seed(master, 202);
    const Ensemble null_b = build_ensemble(HurstParam(0.6), base);
    const EnergyTestResult null_test =
        energy_permutation_test(probe_matrix(null_a, probes), probe_matrix(null_b, probes),
                                200, RandomStream::replica_seed(91, 777));

    std::string detail = "distances";
    for (double d : curve.distances) detail += " " + fmt(d);
    detail += ", trend p=" + fmt(trend.p_value) + ", null p=" + fmt(null_test.p_value);
    return {trend.p_value < 0.05 && null_test.p_value >= 0.05, detail};
}

Outcome criterion_identification() {
    EnsembleConfig cfg;
    cfg.grid = TimeGrid(1.0, 2048);
    for (int i = -250; i <= 250; ++i) cfg.x_grid.push_back(0.01 * i);
    cfg.t_grid = {0.5, 1.0};
    cfg.n_paths = 20;
    cfg.master_seed = 1001;
    const ProbeSet probes{{{0.0, 0.5}, {0.0, 1.0}, {0.3, 1.0}, {-0.3, 1.0}}};
    const std::vector<double> eps_list{0.4, 0.25, 0.15};

    cfg.estimator.kind = EstimatorKind::kernel;
    cfg.estimator.epsilon = 0.02;
    const double kernel_worst =
        identification_check(build_ensemble(HurstParam(0.5), cfg), probes, eps_list);
    cfg.estimator.kind = EstimatorKind::fourier;
    cfg.estimator.fourier_cutoff = 200.0;
    cfg.estimator.mode_spacing = 0.05;
    const double fourier_worst =
        identification_check(build_ensemble(HurstParam(0.5), cfg), probes, eps_list);

    const bool pass = kernel_worst <= 0.03 && fourier_worst <= 0.03;
    return {pass, "kernel " + fmt(kernel_worst) + ", fourier " + fmt(fourier_worst) +
                      ", tol 0.03"};
}

// ---- criterion 11: reproducibility of the CLI default suite ---------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + FBMLT_CLI_PATH + "\" " + args;
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

Outcome criterion_reproducibility() {
    const fs::path root = fs::current_path() / "acceptance_scratch";
    fs::remove_all(root);
    fs::create_directories(root);
    std::string detail;
    bool pass = true;
    for (const std::string command :
         {"simulate", "localtime", "verify", "scaling", "converge"}) {
        const fs::path d1 = root / (command + "_w1");
        const fs::path d3 = root / (command + "_w3");
        const int c1 = run_cli(command + " --out " + d1.string() +
                               " --fixed-timestamp --workers 1 > " +
                               (root / (command + "_w1.log")).string() + " 2>&1");
        const int c3 = run_cli(command + " --out " + d3.string() +
                               " --fixed-timestamp --workers 3 > " +
                               (root / (command + "_w3.log")).string() + " 2>&1");
        bool identical = c1 == c3;
        std::size_t files = 0;
        if (identical) {
            for (const auto& entry : fs::directory_iterator(d1)) {
                const fs::path other = d3 / entry.path().filename();
                if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
                    identical = false;
                    break;
                }
                ++files;
            }
        }
        pass &= identical && c1 == 0;
        detail += command + (identical ? "=match(" : "=MISMATCH(") + std::to_string(c1) +
                  "," + std::to_string(files) + "f) ";
    }
    return {pass, detail};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"closed-form local-time mean (kernel, H in {0.5,0.7})", criterion_local_time_mean},
        {"occupation-formula consistency (histogram vs time integral)",
         criterion_occupation_formula},
        {"estimator equivalence (fourier vs kernel fields)", criterion_estimator_equivalence},
        {"lemma suite (variance, gaussian moment, convexity)", criterion_lemma_suite},
        {"sigma-integral bound and quadrature agreement", criterion_sigma_bound},
        {"determinant lower bounds and neighborhood positivity",
         criterion_determinant_bounds},
        {"correlation uniformity in the hurst offset", criterion_correlation_uniformity},
        {"moment scaling slopes and ordering", criterion_moment_scaling},
        {"headline convergence in law with same-law null", criterion_headline_convergence},
        {"identification via approximate identities", criterion_identification},
        {"reproducibility of the default suite", criterion_reproducibility},
    };

    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto started = std::chrono::steady_clock::now();
        Outcome outcome{false, ""};
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                              std::chrono::steady_clock::now() - started)
                              .count();
        std::cout << (outcome.pass ? "PASS" : "FAIL") << "  criterion " << std::setw(2)
                  << (i + 1) << "  " << criteria[i].first << "  [" << outcome.detail << "] ("
                  << secs << "s)\n"
                  << std::flush;
        all &= outcome.pass;
    }
    return all ? 0 : 1;
}
