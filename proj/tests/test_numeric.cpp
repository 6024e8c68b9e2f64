#include "doctest.h"
#include "levalarm/numeric.hpp"

#include <cmath>

using namespace levalarm;

TEST_SUITE("numeric") {

// Reference values from a 40-digit evaluation.
TEST_CASE("normal cdf against high-precision values") {
    struct Ref { double x, p; };
    const Ref refs[] = {{-3.0, 0.0013498980316300945267}, {-1.5, 0.066807201268858066004},
                        {-0.3734, 0.35442537974964909655}, {0.0, 0.5},
                        {0.5, 0.69146246127401310364}, {2.0, 0.9772498680518207928},
                        {6.0, 0.99999999901341235496}};
    for (const auto& r : refs) CHECK(std::fabs(norm_cdf(r.x) - r.p) <= 1e-15);
    CHECK(norm_cdf(-8.0) == doctest::Approx(6.2209605742717841235e-16).epsilon(1e-13));
}

TEST_CASE("log normal cdf stays finite deep in the tail") {
    CHECK(log_norm_cdf(-40.0) == doctest::Approx(-804.60844201375378817).epsilon(1e-14));
    CHECK(log_norm_cdf(-36.0) == doctest::Approx(-652.50322759379839685).epsilon(1e-14));
    CHECK(log_norm_cdf(-20.0) == doctest::Approx(-203.91715537109726394).epsilon(1e-14));
    CHECK(log_norm_cdf(5.0) == doctest::Approx(-2.8665161296376359338e-7).epsilon(1e-12));
    // both sides of the switch to the asymptotic series
    CHECK(log_norm_cdf(-35.0 - 1e-9) == doctest::Approx(-616.9751012969510384443).epsilon(1e-14));
    CHECK(log_norm_cdf(-35.0 + 1e-9) == doctest::Approx(-616.9751012268939885031).epsilon(1e-14));
    CHECK(std::isfinite(log_norm_cdf(-1e5)));
}

TEST_CASE("adaptive simpson on closed-form integrals") {
    CHECK(std::fabs(integrate([](double x) { return std::sin(x); }, 0.0, kPi) - 2.0) < 1e-9);
    CHECK(std::fabs(integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0) - std::sqrt(kPi)) < 1e-9);
    CHECK(integrate([](double x) { return x; }, 1.0, 1.0) == 0.0);
    CHECK(integrate([](double x) { return x; }, 1.0, 0.0) == doctest::Approx(-0.5));
    QuadratureOptions tight;
    tight.max_intervals = 10;
    tight.abs_tol = 1e-15;
    const auto r = adaptive_simpson([](double x) { return std::sqrt(x); }, 0.0, 1.0, tight);
    CHECK_FALSE(r.converged);
    CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-3));
}

TEST_CASE("geometric grid") {
    const auto g = geometric_grid();
    REQUIRE(g.size() == 400);
    CHECK(g.front() == 1e-4);
    CHECK(g.back() == 10.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK(g[1] / g[0] == doctest::Approx(g[399] / g[398]));
}

}
