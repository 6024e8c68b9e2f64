#pragma once

#include "levalarm/diffusion.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace levalarm {

// The killed process run backwards from its killing time: a diffusion on
// (c, inf) entering from c with generator 1/2 f'' + mu coth(mu (x - c)) f'.
struct ReversedSpec {
    DiffusionSpec base;
};

double reversed_drift(double x, const ReversedSpec& r);

// Density of the reversed speed measure w.r.t. Lebesgue measure:
//   mu < 0: (s(v) - s(c))^2 m'(v)
//   mu > 0: (1 - e^{-2mu(v-c)})^2 m'(v)
double reversed_speed_density(double v, const ReversedSpec& r);

// Entrance law from c, w.r.t. the reversed speed measure.
double reversed_entrance_density(double t, double v, const ReversedSpec& r);

// Entrance law from c as a Lebesgue density,
//   2/sqrt(2 pi t) e^{-mu^2 t/2} (w/t) e^{-w^2/2t} sinh(mu w)/mu,  w = v - c.
// It does not depend on the sign of mu.
double reversed_entrance_density_lebesgue(double t, double v, const ReversedSpec& r);

using LaplaceEvaluator = std::function<std::complex<double>(std::complex<double>)>;

// E[exp(-s (T_c - lambda_alpha))]
//   = sinh(mu d) k / (mu sinh(k d)),  k = sqrt(2s + mu^2),  d = alpha - c.
// The complex overload is the analytic continuation; it is finite away from
// the poles s = -(mu^2 + n^2 pi^2 / d^2)/2.
std::complex<double> time_to_default_laplace(std::complex<double> s, double alpha,
                                             const ReversedSpec& r);
double time_to_default_laplace(double s, double alpha, const ReversedSpec& r);

// Five-term Zakian inversion, f(t) = (2/t) sum Re(K_i F(a_i/t)).
// With shift > 0 the transform is inverted as e^{-shift t} Z[F(. - shift)](t),
// which is exact algebra and keeps the argument a_i t small relative to the
// decay rate of the damped target.
double zakian_invert(const LaplaceEvaluator& f, double t, double shift = 0.0);

// Decay rate of the slowest mode of T_c - lambda_alpha: (mu^2 + pi^2/d^2)/2.
double time_to_default_decay_rate(double alpha, const ReversedSpec& r);

struct TimeToDefaultCurve {
    DensityCurve curve;
    double min_before_clip = 0.0;  // most negative raw value, 0 if none
    double shift = 0.0;            // damping used for the inversion
};

// For mu > 0 the curve is the law given T_c < inf; multiply by
// first_passage_cdf(inf) for the unconditional defective density.
// The inversion is damped by damping * time_to_default_decay_rate.
TimeToDefaultCurve time_to_default_density(double alpha, const ReversedSpec& r,
                                           const std::vector<double>& grid,
                                           double damping = 0.8);

}  // namespace levalarm
