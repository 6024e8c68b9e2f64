#pragma once

#include "levalarm/calibration.hpp"
#include "levalarm/diffusion.hpp"
#include "levalarm/occupation.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace levalarm {

enum class StrategyMode { no_change, creditors, shareholders };

const char* strategy_name(StrategyMode m);
StrategyMode parse_strategy(const char* name);

// Every step that starts with R <= R*, (nu, sigma) move by (d_nu, d_sigma);
// the moves accumulate.
struct StrategySpec {
    StrategyMode mode = StrategyMode::no_change;
    double d_nu = 0.0;
    double d_sigma = 0.0;
    bool keep_excess_drift_nonnegative = false;  // clamp nu >= r
    bool keep_sigma_positive = false;            // clamp sigma >= kSigmaFloor
};

inline constexpr double kSigmaFloor = 1e-12;

void validate(const StrategySpec& s);

struct SimConfig {
    std::size_t n_paths = 50000;
    double dt = 1.0 / 252.0;
    double horizon = 1.0;
    std::uint64_t seed = 20131231;
    unsigned threads = 0;  // 0: LEVALARM_THREADS or hardware concurrency
};

void validate(const SimConfig& cfg);

// Stream tags of the counter layout documented in rng.hpp.
inline constexpr std::uint32_t kStreamStrategy = 1;
inline constexpr std::uint32_t kStreamTerminal = 2;
inline constexpr std::uint32_t kStreamOracle = 3;

struct StrategyResult {
    double insolvency_prob = 0.0;
    double insolvency_se = 0.0;
    double time_above_frac = 0.0;
};

// Exact log-normal steps for A with D growing at r, so ln(A/D) moves by
// (nu_k - r) dt + sigma_k sqrt(dt) Z. Insolvency is checked on the grid only.
StrategyResult simulate_strategy(const FirmModel& model, double rstar, const StrategySpec& strat,
                                 const SimConfig& cfg);

struct ProbabilityEstimate {
    double p = 0.0;
    double se = 0.0;
};

// Fraction of paths with A_1 < D_0 e^r.
ProbabilityEstimate default_probability(const FirmModel& model, const SimConfig& cfg);
// Phi(c - mu)
double default_probability_analytic(const FirmModel& model);

struct RstarSearchOptions {
    std::size_t grid_n = 91;
    double long_horizon = 30.0;
};

struct RstarSearchResult {
    double rstar_opt = 0.0;
    double objective = 0.0;
    double insolvency_prob = 0.0;
    double time_above_frac = 0.0;
    std::vector<double> grid;
    std::vector<double> values;
};

// Grid search over R in [1, R0] of a path estimate of the alarm objective:
//   term 1: insolvent by t, or below R at t and then insolvent (within the
//           long horizon) without coming back above R;
//   term 2: mean over all paths of 1{insolvent within the long horizon} e^{-q A},
//           A = time spent at or below R before insolvency.
// Every grid point reuses the same random numbers.
RstarSearchResult optimize_rstar_by_simulation(const FirmModel& model, const StrategySpec& strat,
                                               const SimConfig& cfg, const OptimizerConfig& opt,
                                               const RstarSearchOptions& search = {});

struct OracleOptions {
    double level = 0.0;  // alarm level in X coordinates
    bool bridge = true;  // continuous-monitoring correction for killing and for visits to the level
    double log_escape_tol = 0.0;
};

struct OracleSample {
    double kill_time = -1.0;        // -1: alive at the horizon
    double last_visit_time = -1.0;  // last crossing of the level, -1: never
    double occupation_below = 0.0;  // time at or below the level before killing
    bool escaped = false;
};

// Euler paths of X = y + mu t + B absorbed at c.
std::vector<OracleSample> oracle_paths(const DiffusionSpec& spec, const SimConfig& cfg,
                                       const OracleOptions& opt);

double pairwise_sum(const double* v, std::size_t n);

}  // namespace levalarm
