// Compiled with -mavx2 only (no FMA) and -ffp-contract=off; see CMakeLists.txt.
#include "kernels_common.hpp"
#include "levalarm/kernels.hpp"
#include "levalarm/rng.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace levalarm::kernels::detail {

namespace {

struct alignas(32) Lanes {
    double v[4];
};

inline __m256d set1(double x) { return _mm256_set1_pd(x); }

// Philox4x32-10 on four independent counters. Each 64-bit lane carries one
// 32-bit word in its low half.
struct Philox4 {
    __m256i c0, c1, c2, c3;
};

inline Philox4 philox_avx2(Philox4 c, std::uint32_t k0, std::uint32_t k1) {
    const __m256i m0 = _mm256_set1_epi64x(kPhiloxM0);
    const __m256i m1 = _mm256_set1_epi64x(kPhiloxM1);
    const __m256i lo_mask = _mm256_set1_epi64x(0xFFFFFFFFll);
    for (int round = 0; round < 10; ++round) {
        const __m256i p0 = _mm256_mul_epu32(c.c0, m0);
        const __m256i p1 = _mm256_mul_epu32(c.c2, m1);
        const __m256i hi0 = _mm256_srli_epi64(p0, 32);
        const __m256i lo0 = _mm256_and_si256(p0, lo_mask);
        const __m256i hi1 = _mm256_srli_epi64(p1, 32);
        const __m256i lo1 = _mm256_and_si256(p1, lo_mask);
        const __m256i key0 = _mm256_set1_epi64x(k0);
        const __m256i key1 = _mm256_set1_epi64x(k1);
        c = {_mm256_xor_si256(_mm256_xor_si256(hi1, c.c1), key0), lo1,
             _mm256_xor_si256(_mm256_xor_si256(hi0, c.c3), key1), lo0};
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return c;
}

inline __m256d uniform_avx2(__m256i hi, __m256i lo) {
    const __m256i m = _mm256_or_si256(_mm256_slli_epi64(hi, 20), _mm256_srli_epi64(lo, 12));
    const __m256i bits = _mm256_or_si256(m, _mm256_set1_epi64x(0x3FF0000000000000ll));
    return _mm256_add_pd(_mm256_sub_pd(_mm256_castsi256_pd(bits), set1(1.0)), set1(0x1p-53));
}

inline __m256d log_avx2(__m256d x) {
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i ebits =
        _mm256_or_si256(_mm256_srli_epi64(bits, 52), _mm256_set1_epi64x(0x4330000000000000ll));
    const __m256i mbits =
        _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                        _mm256_set1_epi64x(0x3FF0000000000000ll));
    const __m256d e = _mm256_castsi256_pd(ebits);
    __m256d m = _mm256_castsi256_pd(mbits);
    __m256d k = _mm256_sub_pd(_mm256_sub_pd(e, set1(4503599627370496.0)), set1(1023.0));
    const __m256d big = _mm256_cmp_pd(m, set1(kSqrt2), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, set1(0.5)), big);
    k = _mm256_blendv_pd(k, _mm256_add_pd(k, set1(1.0)), big);
    const __m256d f = _mm256_sub_pd(m, set1(1.0));
    const __m256d s = _mm256_div_pd(f, _mm256_add_pd(set1(2.0), f));
    const __m256d z = _mm256_mul_pd(s, s);
    const __m256d w = _mm256_mul_pd(z, z);
    const __m256d t1 = _mm256_mul_pd(
        w, _mm256_add_pd(set1(kLg2),
                         _mm256_mul_pd(w, _mm256_add_pd(set1(kLg4), _mm256_mul_pd(w, set1(kLg6))))));
    const __m256d t2 = _mm256_mul_pd(
        z, _mm256_add_pd(
               set1(kLg1),
               _mm256_mul_pd(
                   w, _mm256_add_pd(set1(kLg3),
                                    _mm256_mul_pd(w, _mm256_add_pd(set1(kLg5),
                                                                   _mm256_mul_pd(w, set1(kLg7))))))));
    const __m256d R = _mm256_add_pd(t2, t1);
    const __m256d hfsq = _mm256_mul_pd(_mm256_mul_pd(set1(0.5), f), f);
    const __m256d inner = _mm256_add_pd(_mm256_mul_pd(s, _mm256_add_pd(hfsq, R)),
                                        _mm256_mul_pd(k, set1(kLn2Lo)));
    return _mm256_sub_pd(_mm256_mul_pd(k, set1(kLn2Hi)),
                         _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f));
}

inline __m256d horner7(const double* c, __m256d r) {
    __m256d p = set1(c[7]);
    for (int i = 6; i >= 0; --i) p = _mm256_add_pd(_mm256_mul_pd(p, r), set1(c[i]));
    return p;
}

inline __m256d inverse_normal_avx2(__m256d u) {
    const __m256d q = _mm256_sub_pd(u, set1(0.5));
    const __m256d sign_mask = set1(-0.0);
    const __m256d absq = _mm256_andnot_pd(sign_mask, q);
    const __m256d central = _mm256_cmp_pd(absq, set1(kSplit1), _CMP_LE_OQ);

    const __m256d rc = _mm256_sub_pd(set1(kConst1), _mm256_mul_pd(q, q));
    const __m256d zc = _mm256_div_pd(_mm256_mul_pd(q, horner7(kA, rc)), horner7(kB, rc));

    if (_mm256_movemask_pd(central) == 0xF) return zc;

    const __m256d neg = _mm256_cmp_pd(q, _mm256_setzero_pd(), _CMP_LT_OQ);
    __m256d r = _mm256_blendv_pd(_mm256_sub_pd(set1(1.0), u), u, neg);
    // Central lanes hold values the tail branch never sees; keep log in range.
    r = _mm256_blendv_pd(r, set1(0.5), central);
    r = _mm256_sqrt_pd(_mm256_sub_pd(_mm256_setzero_pd(), log_avx2(r)));
    const __m256d near = _mm256_cmp_pd(r, set1(kSplit2), _CMP_LE_OQ);
    const __m256d r1 = _mm256_sub_pd(r, set1(kConst2));
    const __m256d r2 = _mm256_sub_pd(r, set1(kSplit2));
    const __m256d z1 = _mm256_div_pd(horner7(kC, r1), horner7(kD, r1));
    const __m256d z2 = _mm256_div_pd(horner7(kE, r2), horner7(kF, r2));
    __m256d zt = _mm256_blendv_pd(z2, z1, near);
    zt = _mm256_blendv_pd(zt, _mm256_xor_pd(zt, sign_mask), neg);
    return _mm256_blendv_pd(zt, zc, central);
}

inline Philox4 counters(std::uint32_t step, std::uint64_t path0, std::uint32_t stream) {
    Philox4 c;
    c.c0 = _mm256_set1_epi64x(step);
    const std::uint64_t p[4] = {path0, path0 + 1, path0 + 2, path0 + 3};
    c.c1 = _mm256_set_epi64x(static_cast<std::uint32_t>(p[3]), static_cast<std::uint32_t>(p[2]),
                             static_cast<std::uint32_t>(p[1]), static_cast<std::uint32_t>(p[0]));
    c.c2 = _mm256_set_epi64x(static_cast<std::uint32_t>(p[3] >> 32), static_cast<std::uint32_t>(p[2] >> 32),
                             static_cast<std::uint32_t>(p[1] >> 32), static_cast<std::uint32_t>(p[0] >> 32));
    c.c3 = _mm256_set1_epi64x(stream);
    return c;
}

inline bool any(__m256d m) { return _mm256_movemask_pd(m) != 0; }

}  // namespace

double log_positive_avx2_lane(double x) {
    Lanes out;
    _mm256_store_pd(out.v, log_avx2(set1(x)));
    return out.v[0];
}

double inverse_normal_avx2_lane(double u) {
    Lanes out;
    _mm256_store_pd(out.v, inverse_normal_avx2(set1(u)));
    return out.v[0];
}

void fill_normals_avx2(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                       std::uint64_t first_path, std::size_t count, double* z) {
    const PhiloxKey key = philox_key(seed);
    for (std::size_t i = 0; i < count; i += 4) {
        const Philox4 w = philox_avx2(counters(step, first_path + i, stream), key[0], key[1]);
        Lanes out;
        _mm256_store_pd(out.v, inverse_normal_avx2(uniform_avx2(w.c0, w.c1)));
        for (std::size_t j = 0; j < 4 && i + j < count; ++j) z[i + j] = out.v[j];
    }
}

void run_paths_avx2(const PathParams& p, std::uint64_t first_path, std::size_t count,
                    PathStats* out) {
    const PhiloxKey key = philox_key(p.seed);
    const __m256d sqdt = set1(std::sqrt(p.dt));
    const __m256d dt = set1(p.dt);
    const __m256d level = set1(p.level);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = set1(1.0);
    const __m256d d_drift = set1(p.d_drift);
    const __m256d d_vol = set1(p.d_vol);
    const __m256d drift_floor = set1(p.drift_floor);
    const __m256d vol_floor = set1(p.vol_floor);
    const __m256d escape_tol = set1(p.log_escape_tol);
    const bool escape = p.log_escape_tol < 0.0;
    const __m256d all = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));

    for (std::size_t base = 0; base < count; base += 4) {
        __m256d x = set1(p.x0);
        __m256d drift = set1(p.drift);
        __m256d vol = set1(p.vol);
        __m256d above = _mm256_cmp_pd(x, level, _CMP_GT_OQ);
        __m256d active = all;
        __m256d kill = set1(-1.0), cross = set1(-1.0), n_above = zero, n_below = zero;
        __m256d below_t = zero, revisit = zero, escaped = zero;

        constexpr std::uint32_t kBatch = 32;
        __m256d zbuf[kBatch];
        __m256d lubuf[kBatch];
        __m256d lvbuf[kBatch];
        for (std::uint32_t k = 1; k <= p.n_steps && any(active); ++k) {
            // Draws do not depend on the path state; generating a batch up
            // front lets independent Philox rounds overlap.
            const std::uint32_t slot = (k - 1) % kBatch;
            if (slot == 0) {
                const std::uint32_t last = std::min(p.n_steps, k + kBatch - 1);
                for (std::uint32_t j = k; j <= last; ++j) {
                    const Philox4 w = philox_avx2(counters(j, first_path + base, p.stream), key[0], key[1]);
                    zbuf[j - k] = inverse_normal_avx2(uniform_avx2(w.c0, w.c1));
                    if (p.bridge) lubuf[j - k] = log_avx2(uniform_avx2(w.c2, w.c3));
                    if (p.level_bridge) {
                        const Philox4 a =
                            philox_avx2(counters(j, first_path + base, p.stream | kAuxStream), key[0], key[1]);
                        lvbuf[j - k] = log_avx2(uniform_avx2(a.c0, a.c1));
                    }
                }
            }
            const __m256d kd = set1(static_cast<double>(k));
            const __m256d below = _mm256_and_pd(active, _mm256_cmp_pd(x, level, _CMP_LE_OQ));
            n_below = _mm256_add_pd(n_below, _mm256_and_pd(below, one));
            drift = _mm256_blendv_pd(drift, _mm256_max_pd(_mm256_add_pd(drift, d_drift), drift_floor), below);
            vol = _mm256_blendv_pd(vol, _mm256_max_pd(_mm256_add_pd(vol, d_vol), vol_floor), below);

            const __m256d z = zbuf[slot];
            const __m256d xprev = x;
            const __m256d inc = _mm256_add_pd(_mm256_mul_pd(drift, dt), _mm256_mul_pd(_mm256_mul_pd(vol, sqdt), z));
            x = _mm256_blendv_pd(x, _mm256_add_pd(x, inc), active);

            __m256d killed = _mm256_and_pd(active, _mm256_cmp_pd(x, zero, _CMP_NGT_UQ));
            if (p.bridge) {
                const __m256d num = _mm256_mul_pd(_mm256_mul_pd(set1(-2.0), xprev), x);
                const __m256d den = _mm256_mul_pd(_mm256_mul_pd(vol, vol), dt);
                const __m256d thr = _mm256_div_pd(num, den);
                const __m256d lu = lubuf[slot];
                const __m256d hit = _mm256_cmp_pd(lu, thr, _CMP_LT_OQ);
                killed = _mm256_or_pd(killed, _mm256_andnot_pd(killed, _mm256_and_pd(active, hit)));
            }
            const __m256d survive = _mm256_andnot_pd(killed, active);
            const __m256d now_above = _mm256_and_pd(survive, _mm256_cmp_pd(x, level, _CMP_GT_OQ));
            const __m256d flipped = _mm256_and_pd(active, _mm256_xor_pd(now_above, above));
            cross = _mm256_blendv_pd(cross, kd, flipped);
            if (p.level_bridge) {
                const __m256d stay = _mm256_andnot_pd(now_above, _mm256_andnot_pd(above, survive));
                const __m256d gap0 = _mm256_sub_pd(level, xprev), gap1 = _mm256_sub_pd(level, x);
                const __m256d num = _mm256_mul_pd(_mm256_mul_pd(set1(-2.0), gap0), gap1);
                const __m256d thr = _mm256_div_pd(num, _mm256_mul_pd(_mm256_mul_pd(vol, vol), dt));
                const __m256d visit = _mm256_and_pd(stay, _mm256_cmp_pd(lvbuf[slot], thr, _CMP_LT_OQ));
                cross = _mm256_blendv_pd(cross, kd, visit);
            }
            if (k > p.primary_steps)
                revisit = _mm256_blendv_pd(revisit, one, _mm256_andnot_pd(above, now_above));
            above = _mm256_blendv_pd(above, now_above, active);
            if (k <= p.primary_steps) n_above = _mm256_add_pd(n_above, _mm256_and_pd(now_above, one));
            kill = _mm256_blendv_pd(kill, kd, killed);
            if (k == p.primary_steps)
                below_t = _mm256_blendv_pd(below_t, one, _mm256_andnot_pd(now_above, survive));
            active = survive;
            if (escape) {
                const __m256d num = _mm256_mul_pd(_mm256_mul_pd(set1(-2.0), drift), _mm256_sub_pd(x, level));
                const __m256d e = _mm256_div_pd(num, _mm256_mul_pd(vol, vol));
                const __m256d gone = _mm256_and_pd(
                    _mm256_and_pd(now_above, _mm256_cmp_pd(drift, zero, _CMP_GT_OQ)),
                    _mm256_cmp_pd(e, escape_tol, _CMP_LT_OQ));
                escaped = _mm256_blendv_pd(escaped, one, gone);
                active = _mm256_andnot_pd(gone, active);
            }
        }

        Lanes lk, lc, la, lb, lt, lr, le;
        _mm256_store_pd(lk.v, kill);
        _mm256_store_pd(lc.v, cross);
        _mm256_store_pd(la.v, n_above);
        _mm256_store_pd(lb.v, n_below);
        _mm256_store_pd(lt.v, below_t);
        _mm256_store_pd(lr.v, revisit);
        _mm256_store_pd(le.v, escaped);
        for (std::size_t j = 0; j < 4 && base + j < count; ++j) {
            PathStats& s = out[base + j];
            s.kill_step = lk.v[j];
            s.last_cross_step = lc.v[j];
            s.steps_above_primary = la.v[j];
            s.steps_below = lb.v[j];
            s.below_at_primary = lt.v[j];
            s.revisit_after_primary = lr.v[j];
            s.escaped = le.v[j];
        }
    }
}

}  // namespace levalarm::kernels::detail
