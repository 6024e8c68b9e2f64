#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace levalarm::kernels {

enum class Isa { scalar, avx2 };

// Best instruction set available on this CPU, unless overridden.
Isa active_isa();
bool isa_supported(Isa isa);
// Pin a variant (tests, benchmarks); reset_isa() restores auto-detection.
void force_isa(Isa isa);
void reset_isa();
const char* isa_name(Isa isa);

// Natural log for positive normal doubles. Both variants apply the same
// operations in the same order, so results agree bit for bit.
double log_positive(double x);

// Inverse standard normal CDF (Wichura AS241) for u in (0, 1).
double inverse_normal(double u);

// z[i] = inverse_normal(first uniform of counter (step, first_path + i, ., stream)).
void fill_normals(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                  std::uint64_t first_path, std::size_t count, double* z, Isa isa);

// One path of x_{k} = x_{k-1} + drift_k dt + vol_k sqrt(dt) Z_k, killed when
// x <= 0. At the start of each step spent at or below `level`, drift and vol
// are moved by (d_drift, d_vol) and clamped from below by the floors.
struct PathParams {
    double x0 = 1.0;
    double level = 0.5;
    double drift = 0.0;
    double vol = 1.0;
    double d_drift = 0.0;
    double d_vol = 0.0;
    double drift_floor = -std::numeric_limits<double>::infinity();
    double vol_floor = -std::numeric_limits<double>::infinity();
    double dt = 1.0 / 252.0;
    std::uint32_t n_steps = 252;
    std::uint32_t primary_steps = 252;
    // Kill inside a step with the Brownian-bridge crossing probability.
    bool bridge = false;
    // Record a visit to `level` inside a step that starts and ends at or below
    // it, with probability exp(-2 (level - x0)(level - x1) / (vol^2 dt)).
    bool level_bridge = false;
    // Stop a path above `level` with positive drift once its chance of ever
    // returning, exp(-2 drift (x - level) / vol^2), falls below exp(log_escape_tol).
    // Zero disables the test.
    double log_escape_tol = 0.0;
    std::uint64_t seed = 1;
    std::uint32_t stream = 0;
};

// Step counts are stored as doubles (exact below 2^53).
struct PathStats {
    double kill_step = -1.0;           // step index of killing, -1 if alive at the end
    double last_cross_step = -1.0;     // last step at which x moved across `level`
    double steps_above_primary = 0.0;  // steps k <= primary_steps ending alive above level
    double steps_below = 0.0;          // steps started at or below level while alive
    double below_at_primary = 0.0;     // 1 if alive and at or below level after primary_steps
    double revisit_after_primary = 0.0;  // 1 if it came back above level after that
    double escaped = 0.0;              // 1 if stopped by the escape test
};

void run_paths(const PathParams& p, std::uint64_t first_path, std::size_t count, PathStats* out,
               Isa isa);

inline void run_paths(const PathParams& p, std::uint64_t first_path, std::size_t count,
                      PathStats* out) {
    run_paths(p, first_path, count, out, active_isa());
}

namespace detail {
void fill_normals_scalar(std::uint64_t, std::uint32_t, std::uint32_t, std::uint64_t, std::size_t,
                         double*);
void run_paths_scalar(const PathParams&, std::uint64_t, std::size_t, PathStats*);
#if defined(LEVALARM_HAVE_AVX2)
double log_positive_avx2_lane(double x);
double inverse_normal_avx2_lane(double u);
void fill_normals_avx2(std::uint64_t, std::uint32_t, std::uint32_t, std::uint64_t, std::size_t,
                       double*);
void run_paths_avx2(const PathParams&, std::uint64_t, std::size_t, PathStats*);
#endif
}  // namespace detail

}  // namespace levalarm::kernels
