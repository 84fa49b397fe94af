#include "fbmlt/occupation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fbmlt {

namespace {

// #{k : k*dt < t}, robust to t sitting exactly on a grid point.
std::size_t steps_before(const SamplePath& path, double t) {
    const double dt = path.grid.dt();
    if (t <= 0.0) return 0;
    const double ratio = t / dt;
    auto cut = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
    return std::min(cut, path.values.size());
}

void require_time_inside(const SamplePath& path, double t) {
    if (t > path.grid.horizon * (1.0 + 1e-12)) {
        throw std::domain_error("t exceeds the path horizon");
    }
}

void require_sorted(std::span<const double> grid, const char* which) {
    if (grid.empty()) throw std::invalid_argument(std::string(which) + " grid must be non-empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::invalid_argument(std::string(which) + " grid must be strictly increasing");
        }
    }
}

// Fills a field by walking path samples once, snapshotting columns at each
// t-grid cut; add(k, acc) accumulates sample k into the per-x running sums.
template <typename AddSample>
LocalTimeField accumulate_field(const SamplePath& path, std::span<const double> x_grid,
                                std::span<const double> t_grid, const AddSample& add) {
    require_sorted(x_grid, "x");
    require_sorted(t_grid, "t");
    require_time_inside(path, t_grid.back());

    LocalTimeField field;
    field.x_grid.assign(x_grid.begin(), x_grid.end());
    field.t_grid.assign(t_grid.begin(), t_grid.end());
    const std::size_t nx = x_grid.size();
    const std::size_t nt = t_grid.size();
    field.values.assign(nx * nt, 0.0);

    std::vector<std::size_t> cuts(nt);
    for (std::size_t it = 0; it < nt; ++it) cuts[it] = steps_before(path, t_grid[it]);

    std::vector<double> acc(nx, 0.0);
    std::size_t next_column = 0;
    const std::size_t total = cuts.back();
    for (std::size_t k = 0; k <= total; ++k) {
        while (next_column < nt && cuts[next_column] == k) {
            for (std::size_t ix = 0; ix < nx; ++ix) field.values[ix * nt + next_column] = acc[ix];
            ++next_column;
        }
        if (k == total) break;
        add(k, acc);
    }
    return field;
}

} // namespace

OccupationHistogram occupation_histogram(const SamplePath& path, double t, double x_lo,
                                         double x_hi, std::size_t n_bins) {
    require_time_inside(path, t);
    if (!(x_lo < x_hi)) throw std::invalid_argument("histogram: need x_lo < x_hi");
    if (n_bins == 0) throw std::invalid_argument("histogram: n_bins must be >= 1");

    OccupationHistogram hist{x_lo, x_hi, (x_hi - x_lo) / static_cast<double>(n_bins),
                             std::vector<double>(n_bins, 0.0), 0.0, t};
    const double dt = path.grid.dt();
    const std::size_t cut = steps_before(path, t);
    for (std::size_t k = 0; k < cut; ++k) {
        const double x = path.values[k];
        if (x < x_lo || x >= x_hi) {
            // right edge belongs to the last bin, not overflow
            if (x == x_hi) {
                hist.masses[n_bins - 1] += dt;
            } else {
                hist.overflow += dt;
            }
            continue;
        }
        auto bin = static_cast<std::size_t>((x - x_lo) / hist.bin_width);
        if (bin >= n_bins) bin = n_bins - 1;
        hist.masses[bin] += dt;
    }
    return hist;
}

double occupation_integral(const SamplePath& path, double t,
                           const std::function<double(double)>& g) {
    require_time_inside(path, t);
    const double dt = path.grid.dt();
    const std::size_t cut = steps_before(path, t);
    double acc = 0.0;
    for (std::size_t k = 0; k < cut; ++k) acc += g(path.values[k]);
    return acc * dt;
}

MollifierKernel::MollifierKernel() {
    // One-time normalization self-check: Simpson on [-1,1], 2000 panels.
    static const bool checked = [] {
        const std::size_t panels = 2000;
        const double h = 2.0 / static_cast<double>(panels);
        auto phi = [](double y) {
            const double w = 1.0 - y * y;
            return (15.0 / 16.0) * w * w;
        };
        double acc = phi(-1.0) + phi(1.0);
        for (std::size_t i = 1; i < panels; ++i) {
            acc += phi(-1.0 + h * static_cast<double>(i)) * ((i % 2 == 1) ? 4.0 : 2.0);
        }
        acc *= h / 3.0;
        if (std::fabs(acc - 1.0) > 1e-10) {
            throw std::logic_error("mollifier normalization check failed");
        }
        return true;
    }();
    (void)checked;
}

double MollifierKernel::operator()(double y) const noexcept {
    if (y <= -1.0 || y >= 1.0) return 0.0;
    const double w = 1.0 - y * y;
    return (15.0 / 16.0) * w * w;
}

double MollifierKernel::scaled(double u, double x, double eps) const noexcept {
    return (*this)((u - x) / eps) / eps;
}

std::size_t LocalTimeField::x_index(double x) const {
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        if (std::fabs(x_grid[i] - x) <= 1e-12 * std::max(1.0, std::fabs(x))) return i;
    }
    throw std::domain_error("x is not a grid point (snapping is not performed)");
}

std::size_t LocalTimeField::t_index(double t) const {
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (std::fabs(t_grid[i] - t) <= 1e-12 * std::max(1.0, std::fabs(t))) return i;
    }
    throw std::domain_error("t is not a grid point (snapping is not performed)");
}

LocalTimeField kernel_local_time(const SamplePath& path, std::span<const double> x_grid,
                                 std::span<const double> t_grid, double epsilon) {
    if (!(epsilon > 0.0)) throw std::domain_error("epsilon must be positive");
    const MollifierKernel phi;
    const double dt = path.grid.dt();
    const double weight = dt / epsilon;

    // x grid is sorted: only the window [X_k - eps, X_k + eps] can score.
    return accumulate_field(path, x_grid, t_grid, [&](std::size_t k, std::vector<double>& acc) {
        const double xk = path.values[k];
        const auto lo = std::lower_bound(x_grid.begin(), x_grid.end(), xk - epsilon);
        const auto hi = std::upper_bound(lo, x_grid.end(), xk + epsilon);
        for (auto it = lo; it != hi; ++it) {
            acc[static_cast<std::size_t>(it - x_grid.begin())] += weight * phi((xk - *it) / epsilon);
        }
    });
}

LocalTimeField fourier_local_time(const SamplePath& path, std::span<const double> x_grid,
                                  std::span<const double> t_grid, double n_cutoff, double du) {
    if (!(n_cutoff > 0.0)) throw std::domain_error("n_cutoff must be positive");
    if (!(du > 0.0)) throw std::domain_error("du must be positive");
    require_sorted(x_grid, "x");

    double max_abs_x = 0.0;
    for (double x : x_grid) max_abs_x = std::max(max_abs_x, std::fabs(x));
    const auto [mn, mx] = std::minmax_element(path.values.begin(), path.values.end());
    const double range = *mx - *mn;
    const double du_bound = M_PI / (4.0 * max_abs_x + range);
    if (du > du_bound) {
        throw std::domain_error("du violates the sanity bound pi/(4*max|x| + path range) = " +
                                std::to_string(du_bound));
    }

    // Symmetric mode sum = Dirichlet kernel:
    //   sum_{j=-J}^{J} cos(j du y) = sin((J + 1/2) du y) / sin(du y / 2).
    const auto j_max = std::floor(n_cutoff / du + 1e-9);
    const double half = 0.5 * du;
    const double top = (2.0 * j_max + 1.0) * half;
    const double flat = 2.0 * j_max + 1.0;
    const double dt = path.grid.dt();
    const double weight = dt * du / (2.0 * M_PI);

    return accumulate_field(path, x_grid, t_grid, [&](std::size_t k, std::vector<double>& acc) {
        const double xk = path.values[k];
        for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
            const double y = xk - x_grid[ix];
            const double denom = std::sin(half * y);
            const double dirichlet = (std::fabs(denom) < 1e-15) ? flat : std::sin(top * y) / denom;
            acc[ix] += weight * dirichlet;
        }
    });
}

double rectangle_increment(const LocalTimeField& field, double x, double t, double k, double h) {
    if (k == 0.0 || h == 0.0) return 0.0;
    const std::size_t ix0 = field.x_index(x);
    const std::size_t ix1 = field.x_index(x + k);
    const std::size_t it0 = field.t_index(t);
    const std::size_t it1 = field.t_index(t + h);
    return field.at(ix1, it1) - field.at(ix1, it0) - field.at(ix0, it1) + field.at(ix0, it0);
}

double default_bandwidth(const SamplePath& path) {
    const std::size_t m = path.values.size();
    double mean = 0.0;
    for (double v : path.values) mean += v;
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (double v : path.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(m);
    return 1.06 * std::sqrt(var) * std::pow(static_cast<double>(m), -0.2);
}

double increment_scale_bandwidth(const TimeGrid& grid, double hurst) {
    // c(H) makes the t = 0 term dt * phi(0) / eps reproduce the exact mean
    // occupation of the singular first step, int_0^dt (2 pi)^{-1/2} s^{-H} ds,
    // less the half-step surplus of the left rule over the remaining steps.
    const double c = (15.0 / 16.0) * std::sqrt(2.0 * std::acos(-1.0)) * 2.0 * (1.0 - hurst) /
                     (1.0 + hurst);
    return c * std::pow(grid.dt(), hurst);
}

double trapezoid_mass(const LocalTimeField& field, std::size_t t_index) {
    const std::size_t nx = field.x_grid.size();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < nx; ++i) {
        const double dx = field.x_grid[i + 1] - field.x_grid[i];
        acc += 0.5 * dx * (field.at(i, t_index) + field.at(i + 1, t_index));
    }
    return acc;
}

} // namespace fbmlt
