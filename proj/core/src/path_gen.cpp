#include "fbmlt/path_gen.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <stdexcept>

namespace fbmlt {

namespace {

// FFTW planning is not thread-safe; execution through the new-array API is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

TimeGrid::TimeGrid(double horizon_, std::size_t n_steps_) : horizon(horizon_), n_steps(n_steps_) {
    if (!(horizon > 0.0)) throw std::domain_error("time grid: horizon must be positive");
    if (n_steps == 0) throw std::domain_error("time grid: n_steps must be positive");
}

// ---------------------------------------------------------------- Cholesky

CholeskyGenerator::CholeskyGenerator(HurstParam h, const TimeGrid& grid)
    : hurst_(h), grid_(grid) {
    const std::size_t n = grid.n_steps;
    if (n > 4096) {
        throw std::invalid_argument("cholesky generator: n_steps exceeds the 4096 factorization budget");
    }
    const double dt = grid.dt();
    Eigen::MatrixXd cov(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = static_cast<double>(i + 1) * dt;
        for (std::size_t j = 0; j <= i; ++j) {
            const double tj = static_cast<double>(j + 1) * dt;
            cov(i, j) = covariance(h, ti, tj);
            cov(j, i) = cov(i, j);
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        // R_H is positive definite in exact arithmetic; absorb round-off once.
        const double jitter = 1e-12 * cov.trace() / static_cast<double>(n);
        cov.diagonal().array() += jitter;
        llt.compute(cov);
        if (llt.info() != Eigen::Success) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
            const double pivot = es.eigenvalues().minCoeff();
            throw std::runtime_error(
                "cholesky generator: covariance not positive definite after jitter; "
                "smallest pivot bound " + std::to_string(pivot));
        }
    }
    Eigen::MatrixXd lower = llt.matrixL();
    factor_.resize(n * (n + 1) / 2);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) factor_[idx++] = lower(i, j);
    }
}

SamplePath CholeskyGenerator::generate(std::uint64_t seed) const {
    const std::size_t n = grid_.n_steps;
    RandomStream rng(seed);
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = rng.next_gaussian();

    SamplePath path{grid_, hurst_, seed, std::vector<double>(n + 1, 0.0)};
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j <= i; ++j) acc += factor_[idx++] * z[j];
        path.values[i + 1] = acc;
    }
    return path;
}

// ---------------------------------------------------------------- circulant

CirculantGenerator::CirculantGenerator(HurstParam h, const TimeGrid& grid)
    : hurst_(h), grid_(grid) {
    const std::size_t n = grid.n_steps;
    if ((n & (n - 1)) != 0) {
        throw std::invalid_argument("circulant generator: n_steps must be a power of two");
    }
    if (n == 1) {
        // Degenerate grid: a single increment; delegate to the dense sampler.
        fallback_ = std::make_unique<CholeskyGenerator>(h, grid);
        return;
    }
    const std::size_t m = 2 * n;
    const double dt = grid.dt();

    // First row of the circulant: autocovariances gamma(0..n), mirrored.
    std::vector<std::complex<double>> row(m), spectrum(m);
    for (std::size_t k = 0; k <= n; ++k) {
        row[k] = fgn_autocovariance(static_cast<long>(k), h, dt);
    }
    for (std::size_t k = 1; k < n; ++k) row[m - k] = row[k];

    {
        std::scoped_lock lk(planner_mutex());
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(m),
                                       reinterpret_cast<fftw_complex*>(row.data()),
                                       reinterpret_cast<fftw_complex*>(spectrum.data()),
                                       FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_execute(p);
        fftw_destroy_plan(p);
    }

    double lambda_max = 0.0, lambda_min = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        lambda_max = std::max(lambda_max, spectrum[j].real());
        lambda_min = std::min(lambda_min, spectrum[j].real());
    }
    if (lambda_min < -1e-8 * lambda_max) {
        // Embedding not nonnegative definite at this (h, n): exact dense route.
        fallback_ = std::make_unique<CholeskyGenerator>(h, grid);
        return;
    }

    // Fold all constants into per-mode amplitudes:
    //   y_j = amplitude_j * (a_j + i b_j),  y_{m-j} = conj(y_j),
    //   increments = Re(first n entries of unnormalized inverse DFT of y).
    // Modes 0 and n are real with weight sqrt(lambda/m); others sqrt(lambda/(2m)).
    amplitude_.resize(m);
    const double dm = static_cast<double>(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double lambda = std::max(spectrum[j].real(), 0.0);
        const double weight = (j == 0 || j == n) ? 1.0 / dm : 1.0 / (2.0 * dm);
        amplitude_[j] = std::sqrt(lambda * weight);
    }

    std::scoped_lock lk(planner_mutex());
    std::vector<std::complex<double>> dummy_in(m), dummy_out(m);
    plan_ = fftw_plan_dft_1d(static_cast<int>(m),
                             reinterpret_cast<fftw_complex*>(dummy_in.data()),
                             reinterpret_cast<fftw_complex*>(dummy_out.data()),
                             FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan_ == nullptr) {
        throw std::runtime_error("circulant generator: fftw plan creation failed");
    }
}

CirculantGenerator::~CirculantGenerator() {
    if (plan_ != nullptr) {
        std::scoped_lock lk(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
}

std::size_t CirculantGenerator::draws_per_path() const noexcept {
    return fallback_ ? fallback_->draws_per_path() : 2 * grid_.n_steps;
}

SamplePath CirculantGenerator::generate(std::uint64_t seed) const {
    if (fallback_) {
        SamplePath path = fallback_->generate(seed);
        return path;
    }
    const std::size_t n = grid_.n_steps;
    const std::size_t m = 2 * n;
    RandomStream rng(seed);

    // Fixed draw order: g0, g_n, then (a_j, b_j) for j = 1..n-1.
    std::vector<std::complex<double>> freq(m);
    freq[0] = amplitude_[0] * rng.next_gaussian();
    freq[n] = amplitude_[n] * rng.next_gaussian();
    for (std::size_t j = 1; j < n; ++j) {
        const double a = rng.next_gaussian();
        const double b = rng.next_gaussian();
        freq[j] = amplitude_[j] * std::complex<double>(a, b);
        freq[m - j] = std::conj(freq[j]);
    }

    std::vector<std::complex<double>> time_domain(m);
    fftw_execute_dft(static_cast<fftw_plan>(plan_),
                     reinterpret_cast<fftw_complex*>(freq.data()),
                     reinterpret_cast<fftw_complex*>(time_domain.data()));

    SamplePath path{grid_, hurst_, seed, std::vector<double>(n + 1, 0.0)};
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += time_domain[k].real(); // increments summed left to right
        path.values[k + 1] = acc;
    }
    return path;
}

SamplePath generate_cholesky(HurstParam h, const TimeGrid& grid, std::uint64_t seed) {
    return CholeskyGenerator(h, grid).generate(seed);
}

SamplePath generate_circulant(HurstParam h, const TimeGrid& grid, std::uint64_t seed) {
    return CirculantGenerator(h, grid).generate(seed);
}

void write_path_csv(const SamplePath& path, std::ostream& out) {
    out << "t,value\n";
    char line[80];
    const double dt = path.grid.dt();
    for (std::size_t i = 0; i < path.values.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", static_cast<double>(i) * dt,
                      path.values[i]);
        out << line;
    }
}

} // namespace fbmlt
