#include "levalarm/diffusion.hpp"

#include "levalarm/errors.hpp"
#include "levalarm/numeric.hpp"

#include <cmath>
#include <limits>

namespace levalarm {

void validate(const DiffusionSpec& spec, double mu_min) {
    require(std::isfinite(spec.mu) && std::isfinite(spec.c) && std::isfinite(spec.y),
            "diffusion parameters must be finite");
    require(std::fabs(spec.mu) >= mu_min, "|mu| is below the admissible minimum");
    require(spec.c < spec.y, "killing level c must lie below the start y");
}

double scale(double x, const DiffusionSpec& spec) {
    require(!std::isnan(x) && x != -std::numeric_limits<double>::infinity(),
            "scale: argument must be finite or +inf");
    require(std::fabs(spec.mu) >= kMuMin, "|mu| is below the admissible minimum");
    // -expm1 keeps full precision for small mu x; at x = +inf it yields 1/(2mu) or +inf.
    return -std::expm1(-2.0 * spec.mu * x) / (2.0 * spec.mu);
}

double log_scale_gap(double a, double b, const DiffusionSpec& spec) {
    require(a < b, "log_scale_gap needs a < b");
    const double mu = spec.mu;
    require(std::fabs(mu) >= kMuMin, "|mu| is below the admissible minimum");
    const double w = b - a;
    // mu > 0: e^{-2mu a}(1 - e^{-2mu w})/(2mu); factor out the larger exponential.
    if (mu > 0.0) return -2.0 * mu * a + std::log(-std::expm1(-2.0 * mu * w)) - std::log(2.0 * mu);
    // mu < 0: e^{-2mu b}(1 - e^{2mu w})/(-2mu).
    if (std::isinf(b)) return std::numeric_limits<double>::infinity();
    return -2.0 * mu * b + std::log(-std::expm1(2.0 * mu * w)) - std::log(-2.0 * mu);
}

double scale_diff(double a, double b, const DiffusionSpec& spec) {
    if (a == b) return 0.0;
    if (a > b) return -scale_diff(b, a, spec);
    return std::exp(log_scale_gap(a, b, spec));
}

double scale_ratio(double x, double a, double b, const DiffusionSpec& spec) {
    require(a < b && x >= a && x <= b, "scale_ratio needs a <= x <= b with a < b");
    if (x == a) return 0.0;
    if (x == b) return 1.0;
    return std::exp(log_scale_gap(a, x, spec) - log_scale_gap(a, b, spec));
}

double speed_density(double v, const DiffusionSpec& spec) { return 2.0 * std::exp(2.0 * spec.mu * v); }

namespace {

void check_transition_args(double t, double u, double v, const DiffusionSpec& spec) {
    require(t > 0.0, "transition density needs t > 0");
    require(u > spec.c && v > spec.c, "transition density needs u, v > c");
}

// log of (e^{-(u-v)^2/2t} - e^{-(u+v-2c)^2/2t}) written as
// -(u-v)^2/2t + log(-expm1(-2(u-c)(v-c)/t)).
double log_image_term(double t, double u, double v, double c) {
    const double d = u - v;
    return -d * d / (2.0 * t) + std::log(-std::expm1(-2.0 * (u - c) * (v - c) / t));
}

}  // namespace

double log_transition_density(double t, double u, double v, const DiffusionSpec& spec) {
    check_transition_args(t, u, v, spec);
    const double mu = spec.mu;
    return -mu * (u + v) - 0.5 * mu * mu * t + log_image_term(t, u, v, spec.c) -
           std::log(2.0 * std::sqrt(2.0 * kPi * t));
}

double transition_density(double t, double u, double v, const DiffusionSpec& spec) {
    return std::exp(log_transition_density(t, u, v, spec));
}

double transition_density_lebesgue(double t, double u, double v, const DiffusionSpec& spec) {
    check_transition_args(t, u, v, spec);
    const double mu = spec.mu;
    // p(t;u,v) * 2e^{2mu v}: the speed density folds into the exponent.
    const double e = mu * (v - u) - 0.5 * mu * mu * t + log_image_term(t, u, v, spec.c);
    return std::exp(e) / std::sqrt(2.0 * kPi * t);
}

double first_passage_density(double t, const DiffusionSpec& spec) {
    require(t >= 0.0, "first passage density needs t >= 0");
    if (t == 0.0) return 0.0;
    const double a = spec.y - spec.c;
    const double z = a + spec.mu * t;
    return a / std::sqrt(2.0 * kPi * t * t * t) * std::exp(-z * z / (2.0 * t));
}

double first_passage_cdf(double t, const DiffusionSpec& spec) {
    require(t >= 0.0, "first passage cdf needs t >= 0");
    const double a = spec.y - spec.c;
    const double mu = spec.mu;
    if (t == 0.0) return 0.0;
    if (std::isinf(t)) return mu < 0.0 ? 1.0 : std::exp(-2.0 * mu * a);
    const double st = std::sqrt(t);
    // The e^{-2mu a} factor can overflow for mu < 0 while Phi underflows; combine in logs.
    const double first = norm_cdf((-a - mu * t) / st);
    const double second = std::exp(-2.0 * mu * a + log_norm_cdf((-a + mu * t) / st));
    const double p = first + second;
    return p > 1.0 ? 1.0 : p;
}

double escape_probability(const DiffusionSpec& spec) {
    if (spec.mu <= 0.0) return 0.0;
    return -std::expm1(-2.0 * spec.mu * (spec.y - spec.c));
}

double spatial_upper_limit(double t, double u, const DiffusionSpec& spec) {
    return u + 12.0 * std::sqrt(t) + std::fabs(spec.mu) * t;
}

}  // namespace levalarm
