#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "fbmlt/covariance.hpp"
#include "fbmlt/rng.hpp"

namespace fbmlt {

//! Uniform grid t_i = i*horizon/n_steps, i = 0..n_steps.
struct TimeGrid {
    double horizon;
    std::size_t n_steps;
    TimeGrid(double horizon_, std::size_t n_steps_);
    double dt() const noexcept { return horizon / static_cast<double>(n_steps); }
};

//! Process values at grid points; values[0] == 0 always.
struct SamplePath {
    TimeGrid grid;
    double hurst;
    std::uint64_t seed;
    std::vector<double> values; // length n_steps + 1
};

//! Exact sampler: dense Cholesky factor of the value covariance R_H(t_i,t_j).
//! O(n^3) setup, O(n^2) per path; guarded to n_steps <= 4096.
class CholeskyGenerator {
public:
    CholeskyGenerator(HurstParam h, const TimeGrid& grid);
    SamplePath generate(std::uint64_t seed) const;
    double hurst() const noexcept { return hurst_; }
    const TimeGrid& grid() const noexcept { return grid_; }
    //! Gaussian draws consumed per path (fixed): n_steps.
    std::size_t draws_per_path() const noexcept { return grid_.n_steps; }

private:
    double hurst_;
    TimeGrid grid_;
    std::vector<double> factor_; // lower-triangular, row-major packed
};

//! Exact sampler: circulant embedding of the stationary increment
//! autocovariance; O(n log n) per path.  Falls back to CholeskyGenerator when
//! the embedding spectrum has a negative eigenvalue below -1e-8 * max.
class CirculantGenerator {
public:
    CirculantGenerator(HurstParam h, const TimeGrid& grid);
    ~CirculantGenerator();
    CirculantGenerator(const CirculantGenerator&) = delete;
    CirculantGenerator& operator=(const CirculantGenerator&) = delete;

    SamplePath generate(std::uint64_t seed) const;
    double hurst() const noexcept { return hurst_; }
    const TimeGrid& grid() const noexcept { return grid_; }
    bool used_cholesky_fallback() const noexcept { return fallback_ != nullptr; }
    //! Gaussian draws consumed per path (fixed): 2*n_steps (0 via fallback path).
    std::size_t draws_per_path() const noexcept;

private:
    double hurst_;
    TimeGrid grid_;
    std::vector<double> amplitude_; // sqrt(lambda_j * weight) / M, spectral scaling
    void* plan_ = nullptr;          // fftw plan, type-erased to keep fftw private
    std::unique_ptr<CholeskyGenerator> fallback_;
};

//! One-shot conveniences (construct a generator, draw one path).
SamplePath generate_cholesky(HurstParam h, const TimeGrid& grid, std::uint64_t seed);
SamplePath generate_circulant(HurstParam h, const TimeGrid& grid, std::uint64_t seed);

//! CSV dump, header "t,value", 17 significant digits per field.
void write_path_csv(const SamplePath& path, std::ostream& out);

} // namespace fbmlt
