#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "fbmlt/covariance.hpp"
#include "fbmlt/rng.hpp"

using namespace fbmlt;

TEST_CASE("covariance: hurst parameter rejects the boundary and outside values") {
    CHECK_NOTHROW(HurstParam(0.5));
    CHECK_NOTHROW(HurstParam(1e-6));
    CHECK_THROWS_AS(HurstParam(0.0), std::domain_error);
    CHECK_THROWS_AS(HurstParam(1.0), std::domain_error);
    CHECK_THROWS_AS(HurstParam(-0.3), std::domain_error);
    CHECK_THROWS_AS(HurstParam(1.5), std::domain_error);
}

TEST_CASE("covariance: pinned values of R_H") {
    CHECK(covariance(HurstParam(0.3), 2.0, 2.0) ==
          doctest::Approx(std::pow(2.0, 0.6)).epsilon(1e-14));
    // H = 1/2 recovers min(s,t)
    CHECK(covariance(HurstParam(0.5), 1.0, 3.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(covariance(HurstParam(0.7), 0.0, 5.0) == 0.0);
    CHECK_THROWS_AS((void)covariance(HurstParam(0.5), -1.0, 2.0), std::domain_error);
}

TEST_CASE("covariance: symmetry and diagonal identities") {
    RandomStream rng(31);
    for (int i = 0; i < 10000; ++i) {
        const HurstParam h(0.02 + 0.96 * rng.next_uniform());
        const double s = 5.0 * rng.next_uniform();
        const double t = 5.0 * rng.next_uniform();
        CHECK(covariance(h, s, t) == covariance(h, t, s));
    }
    const HurstParam h(0.8);
    CHECK(covariance(h, 1.7, 1.7) == doctest::Approx(std::pow(1.7, 1.6)).epsilon(1e-14));
    CHECK(covariance(h, 0.0, 1.7) == 0.0);
}

TEST_CASE("covariance: increment moments match the double-factorial closed form") {
    CHECK(increment_moment(HurstParam(0.3), 1, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(increment_moment(HurstParam(0.5), 2, 0.0, 1.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(increment_moment(HurstParam(0.8), 2, 1.0, 2.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS((void)increment_moment(HurstParam(0.5), 0, 0.0, 1.0), std::domain_error);

    RandomStream rng(32);
    for (int i = 0; i < 2000; ++i) {
        const HurstParam h(0.05 + 0.9 * rng.next_uniform());
        const int m = 1 + static_cast<int>(rng.next_u64() % 6);
        const double s = 3.0 * rng.next_uniform();
        const double t = s + 2.0 * rng.next_uniform() + 1e-6;
        const double expected =
            double_factorial_odd(m) * std::pow(t - s, 2.0 * h.h * m);
        CHECK(increment_moment(h, m, s, t) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("covariance: odd double factorial, exact small values and log-gamma tail") {
    CHECK(double_factorial_odd(1) == 1.0);
    CHECK(double_factorial_odd(2) == 3.0);
    CHECK(double_factorial_odd(3) == 15.0);
    CHECK(double_factorial_odd(4) == 105.0);
    CHECK(double_factorial_odd(10) == 654729075.0);
    // (2*12-1)!! = 23!! = 316234143225
    CHECK(double_factorial_odd(12) == doctest::Approx(316234143225.0).epsilon(1e-12));
    CHECK_THROWS_AS((void)double_factorial_odd(0), std::domain_error);
}

TEST_CASE("covariance: power helpers") {
    CHECK(power_or_zero(0.0, 1.4) == 0.0);
    CHECK(power_or_zero(2.0, 0.6) == doctest::Approx(std::pow(2.0, 0.6)).epsilon(1e-14));
    CHECK(power_difference(3.0, 0.0, 1.5) == 0.0);
    CHECK(power_difference(0.0, 2.0, 1.5) ==
          doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-14));
    CHECK(power_difference(1.0, 1.0, 1.5) ==
          doctest::Approx(std::pow(2.0, 1.5) - 1.0).epsilon(1e-14));
    // small-increment regime where naive subtraction loses all digits
    const double d = power_difference(1.0, 1e-12, 0.8);
    CHECK(d == doctest::Approx(0.8e-12).epsilon(1e-9));
    CHECK_THROWS_AS((void)power_difference(-1.0, 1.0, 0.5), std::domain_error);
}

TEST_CASE("covariance: fgn autocovariance") {
    const HurstParam half(0.5);
    const double dt = 0.25;
    CHECK(fgn_autocovariance(0, half, dt) == doctest::Approx(dt).epsilon(1e-14));
    for (long k : {1L, 2L, 5L}) {
        CHECK(std::fabs(fgn_autocovariance(k, half, dt)) < 1e-14);
        // even in the lag
        CHECK(fgn_autocovariance(k, HurstParam(0.7), dt) ==
              fgn_autocovariance(-k, HurstParam(0.7), dt));
    }
    // H > 1/2: positive lag-1 correlation; H < 1/2: negative
    CHECK(fgn_autocovariance(1, HurstParam(0.75), 1.0) > 0.0);
    CHECK(fgn_autocovariance(1, HurstParam(0.25), 1.0) < 0.0);
}

TEST_CASE("covariance: disjoint increment correlation, pinned values") {
    // Brownian increments are independent
    CHECK(std::fabs(disjoint_increment_correlation(HurstParam(0.5),
                                                   IncrementQuad(0, 1, 2, 3))) < 1e-14);
    // consecutive unit increments at H = 3/4: (2^1.5 - 2)/2 = sqrt(2) - 1
    CHECK(disjoint_increment_correlation(HurstParam(0.75), IncrementQuad(0, 1, 1, 2)) ==
          doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
    const double far = disjoint_increment_correlation(HurstParam(0.75), IncrementQuad(0, 1, 10, 11));
    CHECK(far > 0.0);
    CHECK(far < std::sqrt(2.0) - 1.0);
}

TEST_CASE("covariance: increment quad rejects degenerate and overlapping intervals") {
    CHECK_THROWS_AS(IncrementQuad(0, 0, 1, 2), std::domain_error); // t = s
    CHECK_THROWS_AS(IncrementQuad(0, 1, 2, 2), std::domain_error); // v = u
    CHECK_THROWS_AS(IncrementQuad(0, 2, 1, 3), std::domain_error); // overlap
    CHECK_THROWS_AS(IncrementQuad(-1, 1, 2, 3), std::domain_error);
    CHECK_THROWS_AS(BetaGamma(-0.1, 1.0), std::domain_error);
    CHECK_THROWS_AS(BetaGamma(0.0, 0.0), std::domain_error);
}

TEST_CASE("covariance: beta-gamma form, pinned values") {
    CHECK(correlation_beta_gamma(HurstParam(0.75), BetaGamma(0.0, 1.0)) ==
          doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-14));
    CHECK(std::fabs(correlation_beta_gamma(HurstParam(0.5), BetaGamma(0.0, 2.0))) < 1e-14);
    const HurstParam h(0.9);
    const double gapped = correlation_beta_gamma(h, BetaGamma(3.0, 0.5));
    const double adjacent = correlation_beta_gamma(h, BetaGamma(0.0, 0.5));
    CHECK(gapped > 0.0);
    CHECK(gapped < adjacent);
}

TEST_CASE("covariance: correlations stay inside [-1,1]") {
    RandomStream rng(33);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const HurstParam h(0.02 + 0.96 * rng.next_uniform());
        const double s = 2.0 * rng.next_uniform();
        const double t = s + 1e-6 + rng.next_uniform();
        const double u = t + rng.next_uniform();
        const double v = u + 1e-6 + rng.next_uniform();
        worst = std::max(worst,
                         std::fabs(disjoint_increment_correlation(h, IncrementQuad(s, t, u, v))));
    }
    CHECK(worst <= 1.0 + 1e-12);
}

TEST_CASE("covariance: gap beta = 0 maximizes the correlation for H > 1/2") {
    RandomStream rng(34);
    for (int i = 0; i < 10000; ++i) {
        const HurstParam h(0.5 + 1e-3 + (0.5 - 2e-3) * rng.next_uniform());
        const double beta = 1e-6 + 4.0 * rng.next_uniform();
        const double gamma = std::pow(10.0, -4.0 + 8.0 * rng.next_uniform());
        CHECK(correlation_beta_gamma(h, BetaGamma(beta, gamma)) <=
              correlation_beta_gamma(h, BetaGamma(0.0, gamma)) + 1e-12);
    }
}

TEST_CASE("covariance: quad and beta-gamma coordinates agree") {
    RandomStream rng(35);
    for (int i = 0; i < 10000; ++i) {
        const HurstParam h(0.02 + 0.96 * rng.next_uniform());
        const double s = 2.0 * rng.next_uniform();
        const double len = 1e-3 + rng.next_uniform();
        const double gap = rng.next_uniform();
        const double len2 = 1e-3 + rng.next_uniform();
        const IncrementQuad q(s, s + len, s + len + gap, s + len + gap + len2);
        const BetaGamma bg(gap / len, len2 / len);
        CHECK(std::fabs(disjoint_increment_correlation(h, q) - correlation_beta_gamma(h, bg)) <=
              1e-10);
    }
}
