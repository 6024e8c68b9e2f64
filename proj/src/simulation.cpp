#include "levalarm/simulation.hpp"

#include "levalarm/errors.hpp"
#include "levalarm/kernels.hpp"
#include "levalarm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>

namespace levalarm {

const char* strategy_name(StrategyMode m) {
    switch (m) {
        case StrategyMode::creditors: return "creditors";
        case StrategyMode::shareholders: return "shareholders";
        default: return "no_change";
    }
}

StrategyMode parse_strategy(const char* name) {
    const std::string s = name;
    if (s == "no_change" || s == "no-change") return StrategyMode::no_change;
    if (s == "creditors") return StrategyMode::creditors;
    if (s == "shareholders") return StrategyMode::shareholders;
    throw InputError("unknown strategy '" + s + "'");
}

void validate(const StrategySpec& s) {
    require(std::isfinite(s.d_nu) && std::isfinite(s.d_sigma), "strategy steps must be finite");
    if (s.mode == StrategyMode::no_change)
        require(s.d_nu == 0.0 && s.d_sigma == 0.0, "no_change strategy cannot adjust parameters");
}

void validate(const SimConfig& cfg) {
    require(cfg.n_paths >= 1, "need at least one path");
    require(cfg.dt > 0.0 && cfg.dt <= cfg.horizon, "need 0 < dt <= horizon");
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

namespace {

unsigned thread_count(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LEVALARM_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Paths are generated in fixed chunks; each chunk writes only its own slots,
// so the output does not depend on how chunks are spread over threads.
std::vector<kernels::PathStats> run_all(const kernels::PathParams& p, std::size_t n, unsigned threads) {
    std::vector<kernels::PathStats> out(n);
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    const unsigned nt = std::min<std::size_t>(thread_count(threads), chunks);
    auto work = [&](unsigned tid) {
        for (std::size_t c = tid; c < chunks; c += nt) {
            const std::size_t lo = c * kChunk;
            const std::size_t len = std::min(kChunk, n - lo);
            kernels::run_paths(p, lo, len, out.data() + lo);
        }
    };
    if (nt <= 1) {
        work(0);
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
    return out;
}

std::uint32_t step_count(double horizon, double dt) {
    const double n = std::round(horizon / dt);
    require(n >= 0.0 && n < 4294967295.0, "step count out of range");
    return static_cast<std::uint32_t>(n);
}

kernels::PathParams strategy_params(const FirmModel& m, double rstar, const StrategySpec& s,
                                    const SimConfig& cfg) {
    kernels::PathParams p;
    p.x0 = std::log(m.R0);
    p.level = std::log(rstar);
    p.drift = m.nu - m.r;
    p.vol = m.sigma;
    p.d_drift = s.d_nu;
    p.d_vol = s.d_sigma;
    if (s.keep_excess_drift_nonnegative) p.drift_floor = 0.0;
    if (s.keep_sigma_positive) p.vol_floor = kSigmaFloor;
    p.dt = cfg.dt;
    p.seed = cfg.seed;
    p.stream = kStreamStrategy;
    return p;
}

double mean_of(std::vector<double>& v) { return pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size()); }

}  // namespace

StrategyResult simulate_strategy(const FirmModel& model, double rstar, const StrategySpec& strat,
                                 const SimConfig& cfg) {
    validate(cfg);
    validate(strat);
    require(rstar >= 1.0, "R* must be at least 1");
    kernels::PathParams p = strategy_params(model, rstar, strat, cfg);
    p.n_steps = step_count(cfg.horizon, cfg.dt);
    p.primary_steps = p.n_steps;
    const auto stats = run_all(p, cfg.n_paths, cfg.threads);
    std::vector<double> ins(stats.size()), above(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) {
        ins[i] = stats[i].kill_step > 0.0 ? 1.0 : 0.0;
        above[i] = stats[i].steps_above_primary / static_cast<double>(p.n_steps);
    }
    StrategyResult r;
    r.insolvency_prob = mean_of(ins);
    r.insolvency_se = std::sqrt(r.insolvency_prob * (1.0 - r.insolvency_prob) / static_cast<double>(cfg.n_paths));
    r.time_above_frac = mean_of(above);
    return r;
}

ProbabilityEstimate default_probability(const FirmModel& model, const SimConfig& cfg) {
    validate(cfg);
    require(cfg.horizon == 1.0, "default probability is defined for a one-year horizon");
    // ln(A_1 / (D_0 e^r)) = ln R_0 + (nu - r) + sigma W_1; one normal per path is exact.
    std::vector<double> z(cfg.n_paths);
    kernels::fill_normals(cfg.seed, kStreamTerminal, 0, 0, cfg.n_paths, z.data(), kernels::active_isa());
    const double x0 = std::log(model.R0);
    std::vector<double> hit(cfg.n_paths);
    for (std::size_t i = 0; i < z.size(); ++i)
        hit[i] = (x0 + (model.nu - model.r) + model.sigma * z[i]) < 0.0 ? 1.0 : 0.0;
    ProbabilityEstimate e;
    e.p = mean_of(hit);
    e.se = std::sqrt(e.p * (1.0 - e.p) / static_cast<double>(cfg.n_paths));
    return e;
}

double default_probability_analytic(const FirmModel& model) {
    return norm_cdf(model.spec.c - model.spec.mu);
}

RstarSearchResult optimize_rstar_by_simulation(const FirmModel& model, const StrategySpec& strat,
                                               const SimConfig& cfg, const OptimizerConfig& opt,
                                               const RstarSearchOptions& search) {
    validate(cfg);
    validate(strat);
    validate(opt);
    require(search.grid_n >= 2, "R grid needs at least two points");
    require(search.long_horizon >= opt.horizon_t, "long horizon must cover t");
    RstarSearchResult res;
    const std::uint32_t primary = step_count(opt.horizon_t, cfg.dt);
    const std::uint32_t total = step_count(search.long_horizon, cfg.dt);
    require(primary >= 1, "t must span at least one step");
    const std::size_t n = cfg.n_paths;
    std::vector<double> t1(n), t2(n), ins(n), above(n);
    std::size_t best = 0;
    double best_ins = 0.0, best_above = 0.0;
    for (std::size_t g = 0; g < search.grid_n; ++g) {
        const double R = (g + 1 == search.grid_n)
                             ? model.R0
                             : 1.0 + (model.R0 - 1.0) * static_cast<double>(g) / static_cast<double>(search.grid_n - 1);
        kernels::PathParams p = strategy_params(model, R, strat, cfg);
        p.n_steps = total;
        p.primary_steps = primary;
        const auto stats = run_all(p, n, cfg.threads);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = stats[i];
            const bool killed = s.kill_step > 0.0;
            const bool by_t = killed && s.kill_step <= primary;
            const bool stays_down = s.below_at_primary > 0.0 && s.revisit_after_primary == 0.0 && killed;
            t1[i] = (by_t || stays_down) ? 1.0 : 0.0;
            t2[i] = killed ? std::exp(-opt.q * cfg.dt * s.steps_below) : 0.0;
            ins[i] = by_t ? 1.0 : 0.0;
            above[i] = s.steps_above_primary / static_cast<double>(primary);
        }
        const double v = opt.gamma * mean_of(t1) + (1.0 - opt.gamma) * mean_of(t2);
        res.grid.push_back(R);
        res.values.push_back(v);
        if (g == 0 || v > res.values[best]) {
            best = g;
            best_ins = mean_of(ins);
            best_above = mean_of(above);
        }
    }
    res.rstar_opt = res.grid[best];
    res.objective = res.values[best];
    res.insolvency_prob = best_ins;
    res.time_above_frac = best_above;
    return res;
}

std::vector<OracleSample> oracle_paths(const DiffusionSpec& spec, const SimConfig& cfg,
                                       const OracleOptions& opt) {
    validate(spec);
    require(cfg.n_paths >= 1 && cfg.dt > 0.0 && cfg.horizon >= 0.0, "invalid oracle configuration");
    kernels::PathParams p;
    p.x0 = spec.y - spec.c;
    p.level = opt.level - spec.c;
    p.drift = spec.mu;
    p.vol = 1.0;
    p.dt = cfg.dt;
    p.n_steps = step_count(cfg.horizon, cfg.dt);
    p.primary_steps = p.n_steps;
    p.bridge = opt.bridge;
    p.level_bridge = opt.bridge;
    p.log_escape_tol = opt.log_escape_tol;
    p.seed = cfg.seed;
    p.stream = kStreamOracle;
    const auto stats = run_all(p, cfg.n_paths, cfg.threads);
    std::vector<OracleSample> out(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const auto& s = stats[i];
        OracleSample& o = out[i];
        o.kill_time = s.kill_step > 0.0 ? s.kill_step * cfg.dt : -1.0;
        o.last_visit_time = s.last_cross_step > 0.0 ? s.last_cross_step * cfg.dt : -1.0;
        o.occupation_below = s.steps_below * cfg.dt;
        o.escaped = s.escaped > 0.0;
    }
    return out;
}

}  // namespace levalarm
