#pragma once

#include <vector>

namespace levalarm {

inline constexpr double kMuMin = 1e-8;

// X_t = y + mu t + B_t on (c, inf), killed at c.
struct DiffusionSpec {
    double mu = 0.0;
    double c = 0.0;
    double y = 0.0;
};

void validate(const DiffusionSpec& spec, double mu_min = kMuMin);

enum class CurveKind { density, cdf };

struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> values;
    CurveKind kind = CurveKind::density;
};

// s(x) = (1 - e^{-2 mu x}) / (2 mu). x = +inf is allowed.
double scale(double x, const DiffusionSpec& spec);

// s(b) - s(a), signed.
double scale_diff(double a, double b, const DiffusionSpec& spec);

// log(s(b) - s(a)) for a < b, with b = +inf allowed. Finite whenever the
// gap is, even when e^{-2 mu a} itself is not representable.
double log_scale_gap(double a, double b, const DiffusionSpec& spec);

// (s(x) - s(a)) / (s(b) - s(a)) for a <= x <= b.
double scale_ratio(double x, double a, double b, const DiffusionSpec& spec);

// m'(v) = 2 e^{2 mu v}
double speed_density(double v, const DiffusionSpec& spec);

// Density of the killed process w.r.t. the speed measure; symmetric in (u, v).
double transition_density(double t, double u, double v, const DiffusionSpec& spec);
double log_transition_density(double t, double u, double v, const DiffusionSpec& spec);

// P_u(X_t in dv, t < T_c) / dv
double transition_density_lebesgue(double t, double u, double v, const DiffusionSpec& spec);

// Density of T_c under P_y (defective when mu > 0).
double first_passage_density(double t, const DiffusionSpec& spec);

// P_y(T_c < t); t = +inf gives the total killing probability.
double first_passage_cdf(double t, const DiffusionSpec& spec);

// P_y(X drifts to +inf before reaching c).
double escape_probability(const DiffusionSpec& spec);

// Upper truncation point for spatial integrals started at u.
double spatial_upper_limit(double t, double u, const DiffusionSpec& spec);

}  // namespace levalarm
