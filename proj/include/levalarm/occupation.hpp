#pragma once

#include "levalarm/diffusion.hpp"

#include <vector>

namespace levalarm {

enum class SearchMode {
    global,      // best coarse-grid point over [c, y]
    local_climb  // hill-climb on the grid from initial_alpha
};

struct OptimizerConfig {
    double gamma = 0.4;
    double q = 0.3;
    double horizon_t = 1.0;
    int coarse_grid_n = 400;
    double refine_tol = 1e-6;
    SearchMode mode = SearchMode::global;
    double initial_alpha = 0.0;  // local_climb only
};

void validate(const OptimizerConfig& cfg);

// E_y[exp(-q A_inf); T_c < inf], A_inf = time spent below alpha before killing.
double occupation_laplace(double alpha, const DiffusionSpec& spec, double q);

struct ObjectiveValue {
    double total = 0.0;
    double alarm_term = 0.0;     // q_joint_prob(t) + first_passage_cdf(t)
    double distress_term = 0.0;  // occupation_laplace
};

ObjectiveValue objective(double alpha, const DiffusionSpec& spec, const OptimizerConfig& cfg);

struct OptimizeResult {
    double alpha_star = 0.0;
    ObjectiveValue value;
};

OptimizeResult optimize_alpha(const DiffusionSpec& spec, const OptimizerConfig& cfg);

struct SweepPoint {
    double gamma = 0.0;
    OptimizeResult result;
};

std::vector<SweepPoint> gamma_sweep(const DiffusionSpec& spec, const OptimizerConfig& cfg,
                                    const std::vector<double>& gammas);

}  // namespace levalarm
