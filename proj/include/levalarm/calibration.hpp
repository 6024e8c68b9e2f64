#pragma once

#include "levalarm/diffusion.hpp"

#include <chrono>
#include <vector>

namespace levalarm {

inline constexpr double kTradingDays = 252.0;

struct FirmModel {
    double nu = 0.0;
    double sigma = 0.0;
    double r = 0.0;
    double A0 = 0.0;
    double D0 = 0.0;
    DiffusionSpec spec;
    double R0 = 0.0;

    // alpha = ln(R* D0 / A0) / sigma
    double alpha_of_rstar(double rstar) const;
    double rstar_of_alpha(double alpha) const;
};

FirmModel derive_model(double nu, double sigma, double r, double A0, double D0);

// E = A Phi(d0) - D Phi(d0 - sigma sqrt T), d0 = (ln(A/D) + sigma^2 T/2) / (sigma sqrt T).
double bs_equity(double A, double D, double sigma, double T = 1.0);

// Unique A with bs_equity(A, D, sigma, T) = E.
double invert_asset(double E, double D, double sigma, double T = 1.0);

using Date = std::chrono::sys_days;

struct DatedValue {
    Date date;
    double value = 0.0;
};

using DatedSeries = std::vector<DatedValue>;

// Linear in level between knots, flat outside them.
double interpolate_debt(const DatedSeries& points, Date when);
DatedSeries interpolate_debt(const DatedSeries& points, const std::vector<Date>& dates);

struct MarketData {
    DatedSeries equity;
    DatedSeries debt_points;
    DatedSeries index_returns;
    double risk_free = 0.0;
};

void validate(const MarketData& data);

struct ParamEstimate {
    double nu = 0.0;
    double sigma = 0.0;
    double se_nu = 0.0;
    double se_sigma = 0.0;
    int iterations = 0;
    double last_asset = 0.0;  // implied asset value at the final observation
    double last_debt = 0.0;
};

// Iterated inversion: guess sigma, back out daily assets from equity, re-fit
// (nu, sigma) to the asset log-returns, repeat until sigma is stable.
// Uses the last `window` equity observations.
ParamEstimate estimate_params(const MarketData& data, int window = 252, int max_iterations = 500);

struct WaccInputs {
    double equity_value = 0.0;
    double debt_value = 0.0;
    double interest_paid = 0.0;
    double prior_debt_value = 0.0;
    double index_annual_return = 0.0;
    double risk_free = 0.0;
    double beta = 0.0;
    double tax_rate = 0.35;
};

struct WaccBreakdown {
    double q = 0.0;
    double beta = 0.0;
    double cost_equity = 0.0;
    double cost_debt = 0.0;
    double w_equity = 0.0;
    double w_debt = 0.0;
};

WaccBreakdown wacc(const WaccInputs& in);

// OLS slope (with intercept) of stock returns on index returns.
double beta_regress(const std::vector<double>& stock_returns, const std::vector<double>& index_returns);

}  // namespace levalarm
