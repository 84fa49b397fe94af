#pragma once

#include <cstdint>

namespace fbmlt {

//! Counter-style splittable PRNG built on the splitmix64 update.
//!
//! Replica streams are pure functions of (master_seed, stream_index), so a
//! Monte Carlo run partitioned across any number of workers draws exactly the
//! same numbers per replica regardless of scheduling.  The draw sequence per
//! stream is fixed: consumers document how many variates they take.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) noexcept : state_(seed) {}

    //! Derive the stream for replica `index` from a master seed.
    //! Rule (documented for reproduction): seed_r = mix64(master + GOLDEN * (index + 1))
    //! where GOLDEN = 0x9e3779b97f4a7c15 and mix64 is the splitmix64 finalizer.
    static RandomStream for_replica(std::uint64_t master_seed, std::uint64_t index) noexcept;

    //! The derived seed itself (the rule above), for consumers that seed
    //! generators rather than streams.
    static std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

    //! splitmix64 finalizer; exposed so the derivation rule is testable.
    static std::uint64_t mix64(std::uint64_t z) noexcept;

    std::uint64_t next_u64() noexcept;

    //! Uniform on (0,1): ((u >> 11) + 0.5) * 2^-53, never 0 or 1.
    double next_uniform() noexcept;

    //! Standard normal via the inverse CDF (deterministic draw count: one u64).
    double next_gaussian() noexcept;

private:
    std::uint64_t state_;
};

//! Rational approximation of the standard normal quantile (absolute error
//! below 1e-9 across (0,1); in practice near machine precision).
double inverse_normal_cdf(double p);

} // namespace fbmlt
