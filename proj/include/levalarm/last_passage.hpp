#pragma once

#include "levalarm/diffusion.hpp"

#include <vector>

namespace levalarm {

struct AlarmQuery {
    double alpha = 0.0;
    DiffusionSpec spec;
};

// P_y(lambda_alpha in dt, lambda_alpha > 0) / dt. For alpha > y this is the
// continuous part only.
double lp_density(double t, const AlarmQuery& q);

// P_y(lambda_alpha = 0). For mu > 0 and alpha <= y this is the probability of
// never coming back down to alpha.
double lp_atom(const AlarmQuery& q);

// P_y(lambda_alpha in [t0, t1], lambda_alpha > 0); t1 may be +inf.
double lp_interval(double t0, double t1, const AlarmQuery& q);

// lp_atom + lp_interval(0, t)
double lp_within(double t, const AlarmQuery& q);

// P_y(Q_t = lambda_alpha, X_t in (c, alpha)): below alpha at t and never back.
double q_joint_prob(double t, const AlarmQuery& q);

// P_y(X_t in (c, alpha))
double occupancy_prob(double t, const AlarmQuery& q);

DensityCurve lp_density_curve(const AlarmQuery& q, const std::vector<double>& grid);

}  // namespace levalarm
