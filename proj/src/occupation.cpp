#include "levalarm/occupation.hpp"

#include "levalarm/errors.hpp"
#include "levalarm/last_passage.hpp"

#include <cmath>

namespace levalarm {

void validate(const OptimizerConfig& cfg) {
    require(cfg.gamma >= 0.0 && cfg.gamma <= 1.0, "gamma must lie in [0, 1]");
    require(cfg.q > 0.0, "discount rate q must be positive");
    require(cfg.horizon_t > 0.0, "horizon must be positive");
    require(cfg.coarse_grid_n >= 100, "coarse grid needs at least 100 points");
    require(cfg.refine_tol > 0.0, "refine tolerance must be positive");
}

double occupation_laplace(double alpha, const DiffusionSpec& spec, double q) {
    validate(spec);
    require(q > 0.0, "occupation_laplace needs q > 0");
    require(alpha >= spec.c && alpha <= spec.y, "occupation_laplace needs c <= alpha <= y");
    const double mu = spec.mu;
    const double k = std::sqrt(mu * mu + 2.0 * q);
    const double d = alpha - spec.c;
    // cosh(kd) +- (mu/k) sinh(kd) = e^{kd} [(1 + e^{-2kd}) +- (mu/k)(1 - e^{-2kd})] / 2
    const double e = std::exp(-2.0 * k * d);
    if (mu < 0.0) {
        const double den = 0.5 * ((1.0 + e) - (mu / k) * (1.0 - e));
        return std::exp(-mu * d - k * d) / den;
    }
    // e^{-2mu y} / e^{-mu(alpha + c)} = e^{-2mu(y - c)} e^{mu d}
    const double den = 0.5 * ((1.0 + e) + (mu / k) * (1.0 - e));
    return std::exp(-2.0 * mu * (spec.y - spec.c) + mu * d - k * d) / den;
}

ObjectiveValue objective(double alpha, const DiffusionSpec& spec, const OptimizerConfig& cfg) {
    validate(cfg);
    validate(spec);
    require(alpha >= spec.c && alpha <= spec.y, "objective needs c <= alpha <= y");
    ObjectiveValue v;
    const double qj = alpha > spec.c ? q_joint_prob(cfg.horizon_t, {alpha, spec}) : 0.0;
    v.alarm_term = qj + first_passage_cdf(cfg.horizon_t, spec);
    v.distress_term = occupation_laplace(alpha, spec, cfg.q);
    v.total = cfg.gamma * v.alarm_term + (1.0 - cfg.gamma) * v.distress_term;
    return v;
}

namespace {

constexpr double kTie = 1e-12;

struct Sample {
    double x;
    ObjectiveValue v;
};

Sample golden_section(const DiffusionSpec& spec, const OptimizerConfig& cfg, double lo, double hi) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    ObjectiveValue f1 = objective(x1, spec, cfg);
    ObjectiveValue f2 = objective(x2, spec, cfg);
    while (b - a > cfg.refine_tol) {
        if (f1.total >= f2.total) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = objective(x1, spec, cfg);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = objective(x2, spec, cfg);
        }
    }
    return f1.total >= f2.total ? Sample{x1, f1} : Sample{x2, f2};
}

}  // namespace

OptimizeResult optimize_alpha(const DiffusionSpec& spec, const OptimizerConfig& cfg) {
    validate(cfg);
    validate(spec);
    const int n = cfg.coarse_grid_n;
    const double lo = spec.c, hi = spec.y;
    std::vector<Sample> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double x = (i + 1 == n) ? hi : lo + (hi - lo) * i / (n - 1);
        grid[static_cast<std::size_t>(i)] = {x, objective(x, spec, cfg)};
    }

    std::size_t best = 0;
    if (cfg.mode == SearchMode::global) {
        // Index-ordered scan; a later point must win by more than kTie.
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (grid[i].v.total > grid[best].v.total + kTie) best = i;
    } else {
        require(cfg.initial_alpha >= lo && cfg.initial_alpha <= hi,
                "initial alpha must lie in [c, y]");
        double pos = (cfg.initial_alpha - lo) / (hi - lo) * (n - 1);
        best = static_cast<std::size_t>(std::lround(pos));
        for (;;) {
            std::size_t next = best;
            if (best > 0 && grid[best - 1].v.total > grid[next].v.total + kTie) next = best - 1;
            if (best + 1 < grid.size() && grid[best + 1].v.total > grid[next].v.total + kTie)
                next = best + 1;
            if (next == best) break;
            best = next;
        }
    }

    const double a = grid[best > 0 ? best - 1 : 0].x;
    const double b = grid[best + 1 < grid.size() ? best + 1 : best].x;
    Sample pick = grid[best];
    const Sample refined = golden_section(spec, cfg, a, b);
    if (refined.v.total > pick.v.total + kTie) pick = refined;
    return {pick.x, pick.v};
}

std::vector<SweepPoint> gamma_sweep(const DiffusionSpec& spec, const OptimizerConfig& cfg,
                                    const std::vector<double>& gammas) {
    std::vector<SweepPoint> out;
    out.reserve(gammas.size());
    for (double g : gammas) {
        OptimizerConfig c = cfg;
        c.gamma = g;
        out.push_back({g, optimize_alpha(spec, c)});
    }
    return out;
}

}  // namespace levalarm
