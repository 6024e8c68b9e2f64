#include "doctest.h"
#include "levalarm/kernels.hpp"
#include "levalarm/numeric.hpp"
#include "levalarm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

using namespace levalarm;
using kernels::Isa;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_stats(const kernels::PathStats& a, const kernels::PathStats& b) {
    return std::memcmp(&a, &b, sizeof a) == 0;
}

}  // namespace

TEST_SUITE("kernels") {

// Known-answer vectors published with the Random123 library.
TEST_CASE("philox4x32-10 known answers") {
    auto a = philox4x32_10({0, 0, 0, 0}, {0, 0});
    CHECK(a == PhiloxCounter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    auto b = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(b == PhiloxCounter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    auto c = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    CHECK(c == PhiloxCounter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniforms stay strictly inside the unit interval") {
    CHECK(uniform_open(0, 0) == 0x1p-53);
    CHECK(uniform_open(0xffffffffu, 0xffffffffu) == 1.0 - 0x1p-53);
    CHECK(uniform_open(0x80000000u, 0) == 0.5 + 0x1p-53);
}

TEST_CASE("polynomial log matches the C library") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> e(-50.0, 50.0);
    double worst = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double x = std::exp(e(gen));
        const double ref = std::log(x);
        const double got = kernels::log_positive(x);
        if (ref != 0.0) worst = std::max(worst, std::fabs(got - ref) / std::fabs(ref));
    }
    CHECK(worst < 4e-16);
    CHECK(kernels::log_positive(1.0) == 0.0);
    CHECK(kernels::log_positive(2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-16));
    CHECK(kernels::log_positive(0x1p-53) == doctest::Approx(std::log(0x1p-53)).epsilon(1e-16));
    const double tiny = 1.0 + 1e-12;
    CHECK(std::fabs(kernels::log_positive(tiny) - std::log1p(tiny - 1.0)) < 1e-27);
}

TEST_CASE("inverse normal round trips through the cdf") {
    double worst = 0.0;
    for (int i = 1; i < 20000; ++i) {
        const double u = i / 20000.0;
        const double z = kernels::inverse_normal(u);
        worst = std::max(worst, std::fabs(norm_cdf(z) - u) / std::min(u, 1.0 - u));
    }
    for (double u : {0x1p-53, 1e-12, 1e-8, 1e-4, 1.0 - 1e-8, 1.0 - 0x1p-53}) {
        const double z = kernels::inverse_normal(u);
        const double back = u < 0.5 ? norm_cdf(z) : 1.0 - norm_cdf(z);
        const double ref = u < 0.5 ? u : 1.0 - u;
        worst = std::max(worst, std::fabs(back - ref) / ref);
    }
    CHECK(worst < 1e-12);
    CHECK(kernels::inverse_normal(0.5) == 0.0);
    CHECK(kernels::inverse_normal(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-15));
}

TEST_CASE("normals have unit moments") {
    std::vector<double> z(200000);
    kernels::fill_normals(11, 0, 0, 0, z.size(), z.data(), kernels::active_isa());
    double m = 0.0, v = 0.0;
    for (double x : z) m += x;
    m /= z.size();
    for (double x : z) v += (x - m) * (x - m);
    v /= z.size();
    CHECK(std::fabs(m) < 4.0 / std::sqrt(200000.0));
    CHECK(std::fabs(v - 1.0) < 4.0 * std::sqrt(2.0 / 200000.0));
}

TEST_CASE("path draws do not depend on batch boundaries") {
    kernels::PathParams p;
    p.x0 = 0.6;
    p.level = 0.3;
    p.drift = -0.4;
    p.vol = 0.35;
    p.n_steps = 500;
    p.primary_steps = 252;
    std::vector<kernels::PathStats> whole(37), part(37);
    kernels::run_paths(p, 1000, 37, whole.data(), Isa::scalar);
    kernels::run_paths(p, 1000, 5, part.data(), Isa::scalar);
    kernels::run_paths(p, 1005, 32, part.data() + 5, Isa::scalar);
    for (std::size_t i = 0; i < whole.size(); ++i) CHECK(same_stats(whole[i], part[i]));
}

TEST_CASE("avx2 kernels match the scalar reference bit for bit") {
    if (!kernels::isa_supported(Isa::avx2)) {
        MESSAGE("AVX2 not available on this CPU; equivalence test skipped");
        return;
    }
#if defined(LEVALARM_HAVE_AVX2)
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> e(-745.0, 709.0), uni(0.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        const double x = std::exp(e(gen));
        if (!(x > 0x1p-1022)) continue;
        REQUIRE(same_bits(kernels::log_positive(x), kernels::detail::log_positive_avx2_lane(x)));
    }
    for (int i = 0; i < 100000; ++i) {
        double u = uni(gen);
        if (u <= 0.0) continue;
        if (i % 7 == 0) u = std::pow(u, 40.0);  // stress the far tail
        if (!(u > 0x1p-1000)) continue;
        REQUIRE(same_bits(kernels::inverse_normal(u), kernels::detail::inverse_normal_avx2_lane(u)));
    }

    std::vector<double> zs(1003), zv(1003);
    kernels::fill_normals(77, 3, 12, 123456789012ull, zs.size(), zs.data(), Isa::scalar);
    kernels::fill_normals(77, 3, 12, 123456789012ull, zv.size(), zv.data(), Isa::avx2);
    for (std::size_t i = 0; i < zs.size(); ++i) REQUIRE(same_bits(zs[i], zv[i]));

    struct Case {
        double x0, level, drift, vol, d_drift, d_vol, drift_floor, vol_floor, dt;
        std::uint32_t n, primary;
        bool bridge;
        double esc;
    };
    const double ninf = -std::numeric_limits<double>::infinity();
    const Case cases[] = {
        {0.6205, 0.5498, -0.5093, 0.2974, 0.0, 0.0, ninf, ninf, 1.0 / 252, 252, 252, false, 0.0},
        {0.6472, 0.6, 0.1128, 0.3720, -0.0005, -0.0003, 0.0, 1e-12, 1.0 / 252, 2000, 252, false, 0.0},
        {0.6205, 0.3, -0.5093, 0.2974, 0.0015, 0.0009, ninf, ninf, 1.0 / 252, 3000, 252, false, 0.0},
        {2.0862, 0.75, -1.7128, 1.0, 0.0, 0.0, ninf, ninf, 1e-3, 5000, 1000, true, 0.0},
        {1.3471, 1.3471, 1.3268, 1.0, 0.0, 0.0, ninf, ninf, 1e-2, 5000, 100, true, std::log(1e-10)},
    };
    for (const auto& c : cases) {
        kernels::PathParams p;
        p.x0 = c.x0;
        p.level = c.level;
        p.drift = c.drift;
        p.vol = c.vol;
        p.d_drift = c.d_drift;
        p.d_vol = c.d_vol;
        p.drift_floor = c.drift_floor;
        p.vol_floor = c.vol_floor;
        p.dt = c.dt;
        p.n_steps = c.n;
        p.primary_steps = c.primary;
        p.bridge = c.bridge;
        p.level_bridge = c.bridge;
        p.log_escape_tol = c.esc;
        p.seed = 2024;
        std::vector<kernels::PathStats> s(1001), v(1001);
        kernels::run_paths(p, 7, s.size(), s.data(), Isa::scalar);
        kernels::run_paths(p, 7, v.size(), v.data(), Isa::avx2);
        for (std::size_t i = 0; i < s.size(); ++i) REQUIRE(same_stats(s[i], v[i]));
    }
#endif
}

TEST_CASE("isa selection can be pinned and reset") {
    kernels::force_isa(Isa::scalar);
    CHECK(kernels::active_isa() == Isa::scalar);
    kernels::reset_isa();
    CHECK(kernels::active_isa() == (kernels::isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar));
}

}
