#include "levalarm/time_reversal.hpp"

#include "levalarm/errors.hpp"
#include "levalarm/numeric.hpp"

#include <array>
#include <cmath>

namespace levalarm {

namespace {

using cd = std::complex<double>;

// Poles and residues of the [9/10] Pade approximant of e^z, which is what
// the classic five-term Zakian table tabulates (to about 8 digits).
constexpr std::array<double, 5> kAlphaRe = {12.837677077810870259, 12.226131484162150028,
                                            10.934303430600009741, 8.7764346400826086482,
                                            5.2254533673443613233};
constexpr std::array<double, 5> kAlphaIm = {1.6660625841623013001, 5.0127192636768644557,
                                            8.4096729960030916516, 11.921853898301213686,
                                            15.729529045639258587};
constexpr std::array<double, 5> kKRe = {-36902.046880025550911, 61276.999705851505925,
                                        -28916.572270324232037, 4655.3608463981735449,
                                        -118.74140189989652249};
constexpr std::array<double, 5> kKIm = {196990.46352900364041, -95408.598907324025715,
                                        18169.185100096441871, -1.9017730305830139168,
                                        -141.30369232172346815};

void check_reversed(const ReversedSpec& r) { validate(r.base); }

// x / (1 - e^{-x}) for complex x, with the removable singularity at 0.
cd x_over_one_minus_exp(cd x) {
    if (std::abs(x) < 1e-6) return 1.0 + x / 2.0 + x * x / 12.0;
    return x / (1.0 - std::exp(-x));
}

}  // namespace

double reversed_drift(double x, const ReversedSpec& r) {
    check_reversed(r);
    const double c = r.base.c;
    const double mu = r.base.mu;
    require(x > c, "reversed drift needs x > c");
    const double w = x - c;
    const double z = mu * w;
    if (std::fabs(z) < 1e-4) return 1.0 / w + mu * z / 3.0;
    // mu coth(mu w) = |mu| (1 + e^{-2|mu| w}) / (1 - e^{-2|mu| w})
    const double a = std::fabs(mu);
    const double e = std::exp(-2.0 * a * w);
    return a * (1.0 + e) / -std::expm1(-2.0 * a * w);
}

double reversed_speed_density(double v, const ReversedSpec& r) {
    check_reversed(r);
    const DiffusionSpec& s = r.base;
    require(v > s.c, "reversed speed density needs v > c");
    const double log_m = std::log(2.0) + 2.0 * s.mu * v;
    if (s.mu < 0.0) return std::exp(2.0 * log_scale_gap(s.c, v, s) + log_m);
    const double g = -std::expm1(-2.0 * s.mu * (v - s.c));
    return g * g * std::exp(log_m);
}

double reversed_entrance_density_lebesgue(double t, double v, const ReversedSpec& r) {
    check_reversed(r);
    const DiffusionSpec& s = r.base;
    require(t > 0.0, "entrance density needs t > 0");
    require(v > s.c, "entrance density needs v > c");
    const double w = v - s.c;
    const double a = std::fabs(s.mu);
    // sinh(mu w)/mu = e^{|mu| w} (1 - e^{-2|mu| w}) / (2|mu|)
    const double log_sinh_ratio = a * w + std::log(-std::expm1(-2.0 * a * w)) - std::log(2.0 * a);
    const double e = -0.5 * a * a * t - w * w / (2.0 * t) + log_sinh_ratio;
    return 2.0 * kInvSqrt2Pi / std::sqrt(t) * (w / t) * std::exp(e);
}

double reversed_entrance_density(double t, double v, const ReversedSpec& r) {
    return reversed_entrance_density_lebesgue(t, v, r) / reversed_speed_density(v, r);
}

std::complex<double> time_to_default_laplace(std::complex<double> s, double alpha,
                                             const ReversedSpec& r) {
    check_reversed(r);
    const double c = r.base.c;
    require(alpha > c, "time_to_default_laplace needs alpha > c");
    const double a = std::fabs(r.base.mu);
    const double d = alpha - c;
    const cd k = std::sqrt(2.0 * s + a * a);
    // sinh(a d)/a * k/sinh(k d)
    //   = (1 - e^{-2ad}) / (2ad) * [2kd / (1 - e^{-2kd})] * e^{(a - k) d}
    // with Re k >= 0, so no exponential here can overflow.
    const double real_part = -std::expm1(-2.0 * a * d) / (2.0 * a * d);
    return real_part * x_over_one_minus_exp(2.0 * k * d) * std::exp((a - k) * d);
}

double time_to_default_laplace(double s, double alpha, const ReversedSpec& r) {
    require(s > 0.0, "time_to_default_laplace needs s > 0");
    return time_to_default_laplace(cd(s, 0.0), alpha, r).real();
}

double zakian_invert(const LaplaceEvaluator& f, double t, double shift) {
    require(t > 0.0, "zakian_invert needs t > 0");
    require(std::isfinite(shift), "zakian_invert needs a finite shift");
    double acc = 0.0;
    for (std::size_t i = 0; i < kAlphaRe.size(); ++i) {
        const cd node(kAlphaRe[i] / t - shift, kAlphaIm[i] / t);
        const cd val = f(node);
        if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) {
            throw ConvergenceError("Laplace transform is not finite at a Zakian node");
        }
        acc += (cd(kKRe[i], kKIm[i]) * val).real();
    }
    return std::exp(-shift * t) * 2.0 / t * acc;
}

double time_to_default_decay_rate(double alpha, const ReversedSpec& r) {
    check_reversed(r);
    const double d = alpha - r.base.c;
    require(d > 0.0, "decay rate needs alpha > c");
    const double mu = r.base.mu;
    return 0.5 * (mu * mu + kPi * kPi / (d * d));
}

TimeToDefaultCurve time_to_default_density(double alpha, const ReversedSpec& r,
                                           const std::vector<double>& grid, double damping) {
    require(damping >= 0.0 && damping < 1.0, "damping must lie in [0, 1)");
    TimeToDefaultCurve out;
    out.shift = damping * time_to_default_decay_rate(alpha, r);
    out.curve.kind = CurveKind::density;
    out.curve.grid = grid;
    out.curve.values.resize(grid.size());
    const LaplaceEvaluator f = [&](cd s) { return time_to_default_laplace(s, alpha, r); };
    // Each point is independent, so evaluation order cannot change the values.
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = zakian_invert(f, grid[i], out.shift);
        if (v < out.min_before_clip) out.min_before_clip = v;
        out.curve.values[i] = v < 0.0 ? 0.0 : v;
    }
    return out;
}

}  // namespace levalarm
