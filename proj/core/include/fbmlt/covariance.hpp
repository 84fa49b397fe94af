#pragma once

namespace fbmlt {

//! Hurst exponent constrained to the open interval (0,1).
struct HurstParam {
    double h;
    explicit HurstParam(double value);
    operator double() const noexcept { return h; }
};

//! Two disjoint increments (s,t] and (u,v] with 0 <= s < t <= u < v.
struct IncrementQuad {
    double s, t, u, v;
    IncrementQuad(double s_, double t_, double u_, double v_);
};

//! Scale-free coordinates of an increment pair: the gap is beta*(t-s) and the
//! second increment's length gamma*(t-s).
struct BetaGamma {
    double beta, gamma;
    BetaGamma(double beta_, double gamma_);
};

//! x^p, with the 0^p limit pinned to 0 for p > 0 (avoids pow domain quirks).
double power_or_zero(double x, double p);

//! (x+g)^p - x^p evaluated without cancellation (expm1/log1p form).
double power_difference(double x, double g, double p);

//! R_H(s,t) = ((t^2H + s^2H - |t-s|^2H)) / 2.
double covariance(HurstParam h, double s, double t);

//! E (B_t - B_s)^{2m} = (2m-1)!! |t-s|^{2Hm}.
double increment_moment(HurstParam h, int m, double s, double t);

//! Autocovariance of unit-lag increments on a dt-grid:
//! gamma_H(k) = ((|k+1|^2H + |k-1|^2H - 2|k|^2H)) / 2 * dt^2H.
double fgn_autocovariance(long k, HurstParam h, double dt);

//! Correlation of the increments over (s,t] and (u,v].
double disjoint_increment_correlation(HurstParam h, const IncrementQuad& q);

//! Same correlation in (beta, gamma) coordinates:
//! ((beta^2H - (1+beta)^2H - (beta+gamma)^2H + (1+beta+gamma)^2H)) / (2 gamma^H).
double correlation_beta_gamma(HurstParam h, const BetaGamma& bg);

//! (2m-1)!! with an exact integer path for m <= 10 and log-gamma above.
double double_factorial_odd(int m);

} // namespace fbmlt
