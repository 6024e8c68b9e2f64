#include "levalarm/kernels.hpp"

#include "levalarm/errors.hpp"

#include <atomic>

namespace levalarm::kernels {

namespace {

// -1: auto-detect. Otherwise the forced Isa value.
std::atomic<int> g_forced{-1};

bool cpu_has_avx2() {
#if defined(LEVALARM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

}  // namespace

bool isa_supported(Isa isa) {
    if (isa == Isa::scalar) return true;
    static const bool avx2 = cpu_has_avx2();
    return avx2;
}

Isa active_isa() {
    const int f = g_forced.load(std::memory_order_relaxed);
    if (f >= 0) return static_cast<Isa>(f);
    return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

void force_isa(Isa isa) {
    require(isa_supported(isa), "requested instruction set is not available");
    g_forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() { g_forced.store(-1, std::memory_order_relaxed); }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void fill_normals(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                  std::uint64_t first_path, std::size_t count, double* z, Isa isa) {
#if defined(LEVALARM_HAVE_AVX2)
    if (isa == Isa::avx2 && isa_supported(Isa::avx2)) {
        detail::fill_normals_avx2(seed, stream, step, first_path, count, z);
        return;
    }
#endif
    (void)isa;
    detail::fill_normals_scalar(seed, stream, step, first_path, count, z);
}

void run_paths(const PathParams& p, std::uint64_t first_path, std::size_t count, PathStats* out,
               Isa isa) {
    require(p.dt > 0.0, "path step must be positive");
#if defined(LEVALARM_HAVE_AVX2)
    if (isa == Isa::avx2 && isa_supported(Isa::avx2)) {
        detail::run_paths_avx2(p, first_path, count, out);
        return;
    }
#endif
    (void)isa;
    detail::run_paths_scalar(p, first_path, count, out);
}

}  // namespace levalarm::kernels
