#include "fbmlt/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace fbmlt {

HurstParam::HurstParam(double value) : h(value) {
    if (!(value > 0.0 && value < 1.0)) {
        throw std::domain_error("hurst must lie strictly inside (0,1)");
    }
}

IncrementQuad::IncrementQuad(double s_, double t_, double u_, double v_)
    : s(s_), t(t_), u(u_), v(v_) {
    if (s < 0.0) throw std::domain_error("increment quad: s must be nonnegative");
    if (!(s < t)) throw std::domain_error("increment quad: need s < t (degenerate first increment)");
    if (!(t <= u)) throw std::domain_error("increment quad: need t <= u (increments must not overlap)");
    if (!(u < v)) throw std::domain_error("increment quad: need u < v (degenerate second increment)");
}

BetaGamma::BetaGamma(double beta_, double gamma_) : beta(beta_), gamma(gamma_) {
    if (beta < 0.0) throw std::domain_error("beta must be nonnegative");
    if (!(gamma > 0.0)) throw std::domain_error("gamma must be positive");
}

double power_or_zero(double x, double p) {
    if (x < 0.0) throw std::domain_error("power_or_zero: negative base");
    if (x == 0.0) return 0.0; // limit of x^p for p > 0
    return std::pow(x, p);
}

double power_difference(double x, double g, double p) {
    if (x < 0.0 || g < 0.0) throw std::domain_error("power_difference: negative argument");
    if (g == 0.0) return 0.0;
    if (x == 0.0) return power_or_zero(g, p);
    // (x+g)^p - x^p = x^p expm1(p log1p(g/x)): no cancellation for g << x.
    return std::pow(x, p) * std::expm1(p * std::log1p(g / x));
}

double covariance(HurstParam h, double s, double t) {
    if (s < 0.0 || t < 0.0) throw std::domain_error("covariance: time must be nonnegative");
    const double p = 2.0 * h.h;
    return 0.5 * (power_or_zero(t, p) + power_or_zero(s, p) - power_or_zero(std::fabs(t - s), p));
}

double double_factorial_odd(int m) {
    if (m < 1) throw std::domain_error("double_factorial_odd: m must be >= 1");
    if (m <= 10) {
        double acc = 1.0;
        for (int j = 3; j <= 2 * m - 1; j += 2) acc *= j;
        return acc;
    }
    // (2m-1)!! = (2m)! / (2^m m!) via log-gamma
    return std::exp(std::lgamma(2.0 * m + 1.0) - m * std::log(2.0) - std::lgamma(m + 1.0));
}

double increment_moment(HurstParam h, int m, double s, double t) {
    if (m < 1) throw std::domain_error("increment_moment: m must be >= 1");
    if (s < 0.0 || t < 0.0) throw std::domain_error("increment_moment: time must be nonnegative");
    return double_factorial_odd(m) * power_or_zero(std::fabs(t - s), 2.0 * h.h * m);
}

double fgn_autocovariance(long k, HurstParam h, double dt) {
    if (!(dt > 0.0)) throw std::domain_error("fgn_autocovariance: dt must be positive");
    const double p = 2.0 * h.h;
    const double ak = std::fabs(static_cast<double>(k));
    const double core = 0.5 * (power_or_zero(ak + 1.0, p) + power_or_zero(std::fabs(ak - 1.0), p) -
                               2.0 * power_or_zero(ak, p));
    return core * std::pow(dt, p);
}

double disjoint_increment_correlation(HurstParam h, const IncrementQuad& q) {
    const double p = 2.0 * h.h;
    const double len1 = q.t - q.s;
    const double len2 = q.v - q.u;
    // 2*Cov = [(v-s)^2H - (v-t)^2H] - [(u-s)^2H - (u-t)^2H], each bracket stable
    const double num = power_difference(q.v - q.t, len1, p) - power_difference(q.u - q.t, len1, p);
    return num / (2.0 * power_or_zero(len1, h.h) * power_or_zero(len2, h.h));
}

double correlation_beta_gamma(HurstParam h, const BetaGamma& bg) {
    const double p = 2.0 * h.h;
    const double num =
        power_difference(bg.beta + bg.gamma, 1.0, p) - power_difference(bg.beta, 1.0, p);
    return num / (2.0 * std::pow(bg.gamma, h.h));
}

} // namespace fbmlt
