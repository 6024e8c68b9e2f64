#include "doctest.h"
#include "levalarm/calibration.hpp"
#include "levalarm/errors.hpp"

#include <chrono>
#include <cmath>
#include <random>

using namespace levalarm;
using namespace std::chrono;

namespace {

const Date kStart = sys_days{year{2013} / January / 2};

// Daily assets as GBM with log-drift nu, debt moving linearly between two
// quarter-end knots, equity priced from both with the true sigma.
MarketData synthetic_market(std::uint64_t seed, double nu, double sigma, int days) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    MarketData m;
    m.risk_free = 0.0013;
    m.debt_points = {{kStart, 117.05e6}, {kStart + std::chrono::days{days}, 157.55e6}};
    double A = 292.98e6;
    for (int i = 0; i < days; ++i) {
        if (i > 0) A *= std::exp(nu / kTradingDays + sigma / std::sqrt(kTradingDays) * nd(gen));
        const Date d = kStart + std::chrono::days{i};
        m.equity.push_back({d, bs_equity(A, interpolate_debt(m.debt_points, d), sigma)});
    }
    return m;
}

}  // namespace

TEST_SUITE("calibration") {

TEST_CASE("equity as a call on assets") {
    const double e = bs_equity(292977497.0, 157550000.0, 0.2974);
    CHECK(e == doctest::Approx(135853381.74395569783).epsilon(1e-13));
    CHECK(std::fabs(invert_asset(e, 157550000.0, 0.2974) - 292977497.0) < 1.0);
    CHECK(bs_equity(1e6, 1.0, 0.3) == doctest::Approx(1e6 - 1.0).epsilon(1e-6));
    CHECK(bs_equity(2.0, 1.0, 1e-9) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(invert_asset(2.0 - 1.0, 1.0, 1e-8) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_THROWS_AS(bs_equity(0.0, 1.0, 0.3), InputError);
    CHECK_THROWS_AS(invert_asset(-1.0, 1.0, 0.3), InputError);
}

TEST_CASE("equity is increasing in assets and volatility") {
    for (double D : {0.5, 1.0, 3.0}) {
        for (double s = 0.05; s < 2.0; s *= 1.4) {
            for (double A = 0.2; A < 10.0; A *= 1.3) {
                const double e = bs_equity(A, D, s);
                CHECK(e >= 0.0);
                // up to rounding of the two terms, which are of order D
                CHECK(bs_equity(A * 1.001, D, s) >= e - 1e-15 * D);
                CHECK(bs_equity(A, D, s * 1.01) >= e - 1e-15 * D);
                // strictly, wherever the option is neither worthless nor all intrinsic value
                if (std::fabs(std::log(A / D)) < 5.0 * s) {
                    CHECK(bs_equity(A * 1.001, D, s) > e);
                    CHECK(bs_equity(A, D, s * 1.01) > e);
                }
            }
        }
    }
}

TEST_CASE("asset inversion round trip") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> a_d(1.0, 1e9), r_d(0.05, 0.95), s_d(0.01, 1.5);
    for (int i = 0; i < 100; ++i) {
        const double A = a_d(gen), D = A * r_d(gen), s = s_d(gen);
        CHECK(invert_asset(bs_equity(A, D, s), D, s) == doctest::Approx(A).epsilon(1e-6));
    }
}

TEST_CASE("debt interpolation") {
    const Date d0 = sys_days{year{2013} / March / 31}, d1 = d0 + std::chrono::days{90};
    const DatedSeries pts = {{d0, 100.0}, {d1, 200.0}};
    CHECK(interpolate_debt(pts, d0 + std::chrono::days{45}) == 150.0);
    CHECK(interpolate_debt(pts, d0) == 100.0);
    CHECK(interpolate_debt(pts, d1) == 200.0);
    CHECK(interpolate_debt(pts, d0 - std::chrono::days{10}) == 100.0);
    CHECK(interpolate_debt(pts, d1 + std::chrono::days{10}) == 200.0);
    CHECK_THROWS_AS(interpolate_debt(DatedSeries{{d0, 1.0}}, d0), InputError);

    const Date y0 = sys_days{year{2012} / December / 31}, y1 = sys_days{year{2013} / December / 31};
    const DatedSeries year_pts = {{y0, 117.05e6}, {y1, 157.55e6}};
    std::vector<Date> daily;
    for (Date d = y0; d <= y1; d += std::chrono::days{1}) daily.push_back(d);
    const auto series = interpolate_debt(year_pts, daily);
    double mean = 0.0;
    for (const auto& p : series) mean += p.value;
    mean /= series.size();
    CHECK(mean == doctest::Approx(0.5 * (117.05e6 + 157.55e6)).epsilon(0.01));
}

TEST_CASE("model derivation") {
    const auto m = derive_model(-0.5080, 0.2974, 0.0013, 292977497, 157550000);
    CHECK(std::fabs(m.spec.mu - (-1.7128)) < 5e-4);
    CHECK(std::fabs(m.spec.c - (-2.0862)) < 5e-4);
    CHECK(std::fabs(m.R0 - 1.8596) < 5e-4);
    CHECK(m.spec.y == 0.0);
    CHECK(m.alpha_of_rstar(1.0) == m.spec.c);
    CHECK(std::fabs(m.alpha_of_rstar(1.7332) - (-0.2367)) < 5e-4);
    CHECK(std::exp(m.sigma * m.spec.c) * m.A0 == doctest::Approx(m.D0).epsilon(1e-12));
    CHECK(m.rstar_of_alpha(m.alpha_of_rstar(1.4)) == doctest::Approx(1.4).epsilon(1e-14));
    CHECK_THROWS_AS(derive_model(0.1, 0.3, 0.0, 100.0, 100.0), InputError);
    CHECK_THROWS_AS(derive_model(0.1, 0.0, 0.0, 200.0, 100.0), InputError);
}

TEST_CASE("estimation recovers synthetic parameters") {
    const double nu = -0.5, sigma = 0.3;
    double sum_sigma = 0.0, sum_nu = 0.0, sum_se = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const auto est = estimate_params(synthetic_market(100 + s, nu, sigma, 300), 252);
        CHECK(est.iterations < 500);
        CHECK(est.se_sigma == doctest::Approx(est.sigma / std::sqrt(2.0 * 251)).epsilon(1e-12));
        sum_sigma += est.sigma;
        sum_nu += est.nu;
        sum_se += est.se_nu;
    }
    CHECK(std::fabs(sum_sigma / seeds - sigma) < 0.01);
    CHECK(std::fabs(sum_nu / seeds - nu) < 2.0 * sum_se / seeds);
}

TEST_CASE("drift confidence intervals cover the truth") {
    const double nu = -0.5, sigma = 0.3;
    int covered = 0;
    for (int s = 0; s < 50; ++s) {
        const auto est = estimate_params(synthetic_market(500 + s, nu, sigma, 252), 252);
        if (std::fabs(est.nu - nu) <= 2.0 * est.se_nu) ++covered;
    }
    CHECK(covered >= 40);
}

TEST_CASE("estimation input checks") {
    auto m = synthetic_market(1, 0.1, 0.3, 100);
    CHECK_THROWS_AS(estimate_params(m, 59), InputError);
    CHECK_THROWS_AS(estimate_params(m, 101), InputError);
    for (auto& p : m.equity) p.value = 1e6;
    CHECK_THROWS_AS(estimate_params(m, 100), InputError);
    auto bad = synthetic_market(1, 0.1, 0.3, 100);
    std::swap(bad.equity[3], bad.equity[4]);
    CHECK_THROWS_AS(estimate_params(bad, 100), InputError);
}

TEST_CASE("cost of capital") {
    WaccInputs in;
    in.equity_value = 135.43;
    in.debt_value = 157.55;
    in.prior_debt_value = 117.05;
    in.interest_paid = 18.95;
    in.risk_free = 0.0013;
    in.index_annual_return = 0.3832;
    in.beta = 1.43;
    const auto b = wacc(in);
    CHECK(b.w_equity + b.w_debt == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.cost_debt == doctest::Approx(18.95 / 137.3).epsilon(1e-14));
    CHECK(b.cost_equity == doctest::Approx(0.0013 + 1.43 * (0.3832 - 0.0013)).epsilon(1e-14));

    WaccInputs zero_beta = in;
    zero_beta.beta = 0.0;
    CHECK(wacc(zero_beta).cost_equity == 0.0013);
    WaccInputs shield = in;
    shield.tax_rate = 1.0;
    CHECK(wacc(shield).q == doctest::Approx(b.w_equity * b.cost_equity).epsilon(1e-15));
    WaccInputs no_debt = in;
    no_debt.debt_value = 0.0;
    no_debt.prior_debt_value = 0.0;
    CHECK_THROWS_AS(wacc(no_debt), InputError);
}

TEST_CASE("beta regression") {
    std::mt19937_64 gen(9);
    std::normal_distribution<double> nd;
    std::vector<double> idx(5000), stock(5000);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = 0.01 * nd(gen);
        stock[i] = 0.0002 + 1.43 * idx[i] + 0.002 * nd(gen);
    }
    CHECK(std::fabs(beta_regress(stock, idx) - 1.43) < 0.02);
    CHECK_THROWS_AS(beta_regress({1.0}, {1.0}), InputError);
}

}
