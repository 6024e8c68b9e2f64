#include "kernels_common.hpp"
#include "levalarm/kernels.hpp"
#include "levalarm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace levalarm::kernels {

using namespace detail;

double log_positive(double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    const std::uint64_t ebits = (bits >> 52) | 0x4330000000000000ull;
    const std::uint64_t mbits = (bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull;
    double e, m;
    std::memcpy(&e, &ebits, sizeof e);
    std::memcpy(&m, &mbits, sizeof m);
    double k = (e - 4503599627370496.0) - 1023.0;
    if (m > kSqrt2) {
        m = m * 0.5;
        k = k + 1.0;
    }
    const double f = m - 1.0;
    const double s = f / (2.0 + f);
    const double z = s * s;
    const double w = z * z;
    const double t1 = w * (kLg2 + w * (kLg4 + w * kLg6));
    const double t2 = z * (kLg1 + w * (kLg3 + w * (kLg5 + w * kLg7)));
    const double R = t2 + t1;
    const double hfsq = 0.5 * f * f;
    return k * kLn2Hi - ((hfsq - (s * (hfsq + R) + k * kLn2Lo)) - f);
}

namespace {

double horner7(const double* c, double r) {
    double p = c[7];
    for (int i = 6; i >= 0; --i) p = p * r + c[i];
    return p;
}

}  // namespace

double inverse_normal(double u) {
    const double q = u - 0.5;
    if (std::fabs(q) <= kSplit1) {
        const double r = kConst1 - q * q;
        return q * horner7(kA, r) / horner7(kB, r);
    }
    double r = q < 0.0 ? u : 1.0 - u;
    r = std::sqrt(-log_positive(r));
    double z;
    if (r <= kSplit2) {
        r = r - kConst2;
        z = horner7(kC, r) / horner7(kD, r);
    } else {
        r = r - kSplit2;
        z = horner7(kE, r) / horner7(kF, r);
    }
    return q < 0.0 ? -z : z;
}

namespace detail {

void fill_normals_scalar(std::uint64_t seed, std::uint32_t stream, std::uint32_t step,
                         std::uint64_t first_path, std::size_t count, double* z) {
    const PhiloxKey key = philox_key(seed);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t path = first_path + i;
        const PhiloxCounter w = philox4x32_10(
            {step, static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32), stream},
            key);
        z[i] = inverse_normal(uniform_open(w[0], w[1]));
    }
}

void run_paths_scalar(const PathParams& p, std::uint64_t first_path, std::size_t count,
                      PathStats* out) {
    const PhiloxKey key = philox_key(p.seed);
    const double sqdt = std::sqrt(p.dt);
    const bool escape = p.log_escape_tol < 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t path = first_path + i;
        const auto plo = static_cast<std::uint32_t>(path);
        const auto phi = static_cast<std::uint32_t>(path >> 32);
        PathStats st;
        double x = p.x0;
        double drift = p.drift;
        double vol = p.vol;
        bool above = x > p.level;
        constexpr std::uint32_t kBatch = 32;
        double zbuf[kBatch];
        double lubuf[kBatch];
        double lvbuf[kBatch];
        for (std::uint32_t k = 1; k <= p.n_steps; ++k) {
            const std::uint32_t slot = (k - 1) % kBatch;
            if (slot == 0) {
                const std::uint32_t last = std::min(p.n_steps, k + kBatch - 1);
                for (std::uint32_t j = k; j <= last; ++j) {
                    const PhiloxCounter w = philox4x32_10({j, plo, phi, p.stream}, key);
                    zbuf[j - k] = inverse_normal(uniform_open(w[0], w[1]));
                    if (p.bridge) lubuf[j - k] = log_positive(uniform_open(w[2], w[3]));
                    if (p.level_bridge) {
                        const PhiloxCounter a = philox4x32_10({j, plo, phi, p.stream | kAuxStream}, key);
                        lvbuf[j - k] = log_positive(uniform_open(a[0], a[1]));
                    }
                }
            }
            const double kd = static_cast<double>(k);
            if (x <= p.level) {
                st.steps_below = st.steps_below + 1.0;
                const double nd = drift + p.d_drift;
                const double nv = vol + p.d_vol;
                drift = nd > p.drift_floor ? nd : p.drift_floor;
                vol = nv > p.vol_floor ? nv : p.vol_floor;
            }
            const double z = zbuf[slot];
            const double xprev = x;
            const double inc = drift * p.dt + (vol * sqdt) * z;
            x = x + inc;
            bool killed = !(x > 0.0);
            if (p.bridge && !killed) {
                const double thr = (-2.0 * xprev * x) / (vol * vol * p.dt);
                killed = lubuf[slot] < thr;
            }
            const bool now_above = !killed && x > p.level;
            if (now_above != above) st.last_cross_step = kd;
            if (p.level_bridge && !killed && !above && !now_above) {
                const double thr = ((-2.0 * (p.level - xprev)) * (p.level - x)) / (vol * vol * p.dt);
                if (lvbuf[slot] < thr) st.last_cross_step = kd;
            }
            if (k > p.primary_steps && now_above && !above) st.revisit_after_primary = 1.0;
            above = now_above;
            if (k <= p.primary_steps && now_above) st.steps_above_primary = st.steps_above_primary + 1.0;
            if (killed) {
                st.kill_step = kd;
                break;
            }
            if (k == p.primary_steps && !now_above) st.below_at_primary = 1.0;
            if (escape && now_above && drift > 0.0) {
                const double e = (-2.0 * drift * (x - p.level)) / (vol * vol);
                if (e < p.log_escape_tol) {
                    st.escaped = 1.0;
                    break;
                }
            }
        }
        out[i] = st;
    }
}

}  // namespace detail

}  // namespace levalarm::kernels
