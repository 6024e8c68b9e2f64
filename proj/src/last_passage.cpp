#include "levalarm/last_passage.hpp"

#include "levalarm/errors.hpp"
#include "levalarm/numeric.hpp"

#include <cmath>
#include <limits>

namespace levalarm {

namespace {

void check_query(const AlarmQuery& q) {
    validate(q.spec);
    require(q.alpha > q.spec.c, "alarm level must lie above the killing level");
}

// Substituting t = u^2 removes the t^{-1/2} singularity at alpha = y.
double lp_density_substituted(double u, const AlarmQuery& q, double log_gap) {
    const DiffusionSpec& s = q.spec;
    if (u == 0.0) {
        if (q.alpha != s.y) return 0.0;
        return std::exp(-2.0 * s.mu * s.y - log_gap) / std::sqrt(2.0 * kPi);
    }
    return 2.0 * u * std::exp(log_transition_density(u * u, s.y, q.alpha, s) - log_gap);
}

double lp_interval_finite(double t0, double t1, const AlarmQuery& q, double log_gap) {
    auto f = [&](double u) { return lp_density_substituted(u, q, log_gap); };
    return integrate(f, std::sqrt(t0), std::sqrt(t1));
}

}  // namespace

double lp_density(double t, const AlarmQuery& q) {
    check_query(q);
    require(t > 0.0, "lp_density needs t > 0");
    return std::exp(log_transition_density(t, q.spec.y, q.alpha, q.spec) -
                    log_scale_gap(q.spec.c, q.alpha, q.spec));
}

double lp_atom(const AlarmQuery& q) {
    check_query(q);
    const DiffusionSpec& s = q.spec;
    if (q.alpha > s.y) return 1.0 - scale_ratio(s.y, s.c, q.alpha, s);
    if (s.mu < 0.0) return 0.0;
    return -std::expm1(-2.0 * s.mu * (s.y - q.alpha));
}

double lp_interval(double t0, double t1, const AlarmQuery& q) {
    check_query(q);
    require(t0 >= 0.0 && t1 >= t0, "lp_interval needs 0 <= t0 <= t1");
    if (t0 == t1) return 0.0;
    const double log_gap = log_scale_gap(q.spec.c, q.alpha, q.spec);
    if (std::isfinite(t1)) return lp_interval_finite(t0, t1, q, log_gap);

    // Tail: integrate doubling chunks until their mass is negligible. The
    // density decays at rate mu^2/2 once t exceeds the travel time to alpha.
    const double mu2 = q.spec.mu * q.spec.mu;
    const double dist = std::fabs(q.alpha - q.spec.y);
    const double settle = std::max(1.0, 2.0 * dist / std::fabs(q.spec.mu) + 60.0 / mu2);
    double lo = t0;
    double hi = std::max(t0 + 1.0, 1.0);
    double total = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double part = lp_interval_finite(lo, hi, q, log_gap);
        total += part;
        if (hi > settle && part < 1e-14) break;
        lo = hi;
        hi *= 2.0;
    }
    return total;
}

double lp_within(double t, const AlarmQuery& q) {
    return lp_atom(q) + lp_interval(0.0, t, q);
}

double q_joint_prob(double t, const AlarmQuery& q) {
    check_query(q);
    require(t > 0.0, "q_joint_prob needs t > 0");
    const DiffusionSpec& s = q.spec;
    const double log_gap = log_scale_gap(s.c, q.alpha, s);
    auto f = [&](double z) {
        if (z <= s.c || z >= q.alpha) return 0.0;
        const double w = std::exp(log_scale_gap(z, q.alpha, s) - log_gap);
        return w * transition_density_lebesgue(t, s.y, z, s);
    };
    return integrate(f, s.c, q.alpha);
}

double occupancy_prob(double t, const AlarmQuery& q) {
    check_query(q);
    require(t > 0.0, "occupancy_prob needs t > 0");
    const DiffusionSpec& s = q.spec;
    auto f = [&](double z) {
        if (z <= s.c) return 0.0;
        return transition_density_lebesgue(t, s.y, z, s);
    };
    return integrate(f, s.c, q.alpha);
}

DensityCurve lp_density_curve(const AlarmQuery& q, const std::vector<double>& grid) {
    DensityCurve out;
    out.kind = CurveKind::density;
    out.grid = grid;
    out.values.reserve(grid.size());
    for (double t : grid) out.values.push_back(lp_density(t, q));
    return out;
}

}  // namespace levalarm
