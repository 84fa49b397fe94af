#pragma once

#include <functional>
#include <span>
#include <vector>

#include "fbmlt/path_gen.hpp"

namespace fbmlt {

//! Time mass per spatial bin: masses[i] = dt * #{k : t_k < t, X_k in bin i}.
struct OccupationHistogram {
    double x_lo, x_hi;
    double bin_width;
    std::vector<double> masses;
    double overflow;     // mass outside [x_lo, x_hi]
    double time_horizon; // the t the histogram was taken at
};

OccupationHistogram occupation_histogram(const SamplePath& path, double t, double x_lo,
                                         double x_hi, std::size_t n_bins);

//! Left-endpoint time quadrature of g along the path: dt * sum_{t_k < t} g(X_k).
double occupation_integral(const SamplePath& path, double t,
                           const std::function<double(double)>& g);

//! C^1 bump phi(y) = (15/16)(1-y^2)^2 on [-1,1], zero outside; integral 1.
//! Construction self-checks the normalization to 1e-10 once per process.
struct MollifierKernel {
    MollifierKernel();
    double operator()(double y) const noexcept;
    //! g_eps(u, x) = phi((u-x)/eps) / eps.
    double scaled(double u, double x, double eps) const noexcept;
};

//! Estimated local time on an (x, t) grid; values stored x-major.
struct LocalTimeField {
    std::vector<double> x_grid;
    std::vector<double> t_grid;
    std::vector<double> values; // values[ix * t_grid.size() + it]

    double at(std::size_t ix, std::size_t it) const {
        return values[ix * t_grid.size() + it];
    }
    //! Index of a coordinate under exact membership (|diff| <= 1e-12 scale).
    std::size_t x_index(double x) const;
    std::size_t t_index(double t) const;
};

//! Mollified occupation density: values[x,t] = sum_{t_k < t} dt * g_eps(X_k, x).
LocalTimeField kernel_local_time(const SamplePath& path, std::span<const double> x_grid,
                                 std::span<const double> t_grid, double epsilon);

//! Truncated Fourier inversion of the occupation measure's characteristic
//! function: values[x,t] = (1/2pi) sum_{|u_j|<=N} du * sum_{t_k<t} dt cos(u_j (X_k - x)).
//! The symmetric mode sum is evaluated in closed form (Dirichlet kernel).
LocalTimeField fourier_local_time(const SamplePath& path, std::span<const double> x_grid,
                                  std::span<const double> t_grid, double n_cutoff, double du);

//! Two-parameter increment F(x+k,t+h) - F(x+k,t) - F(x,t+h) + F(x,t);
//! coordinates must be exact grid members (no snapping).
double rectangle_increment(const LocalTimeField& field, double x, double t, double k, double h);

//! Plug-in bandwidth 1.06 * std(values) * (#samples)^(-1/5) (overridable default).
double default_bandwidth(const SamplePath& path);

//! Bandwidth matched to the one-step increment scale:
//!   eps = (15/16) sqrt(2 pi) * 2 (1-H)/(1+H) * dt^H.
//! The constant makes the t = 0 atom of the left-endpoint sum carry exactly
//! the mean occupation of the singular first step (net of the half-step
//! left-rule surplus), removing the dominant small-time bias at x = 0.
double increment_scale_bandwidth(const TimeGrid& grid, double hurst);

//! Trapezoid mass of a field column over its x grid (diagnostic).
double trapezoid_mass(const LocalTimeField& field, std::size_t t_index);

} // namespace fbmlt
