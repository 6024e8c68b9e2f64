#include "levalarm/calibration.hpp"

#include "levalarm/errors.hpp"
#include "levalarm/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace levalarm {

double FirmModel::alpha_of_rstar(double rstar) const {
    require(rstar > 0.0, "R* must be positive");
    return std::log(rstar * D0 / A0) / sigma;
}

double FirmModel::rstar_of_alpha(double alpha) const { return std::exp(sigma * alpha) * A0 / D0; }

FirmModel derive_model(double nu, double sigma, double r, double A0, double D0) {
    require(std::isfinite(nu) && std::isfinite(r), "nu and r must be finite");
    require(sigma > 0.0 && std::isfinite(sigma), "sigma must be positive");
    require(D0 > 0.0 && A0 > D0, "need A0 > D0 > 0");
    FirmModel m;
    m.nu = nu;
    m.sigma = sigma;
    m.r = r;
    m.A0 = A0;
    m.D0 = D0;
    m.spec.mu = (nu - r) / sigma;
    m.spec.c = std::log(D0 / A0) / sigma;
    m.spec.y = 0.0;
    m.R0 = A0 / D0;
    validate(m.spec);
    return m;
}

double bs_equity(double A, double D, double sigma, double T) {
    require(A > 0.0 && D > 0.0 && sigma > 0.0 && T > 0.0, "bs_equity needs positive inputs");
    const double vs = sigma * std::sqrt(T);
    const double d0 = (std::log(A / D) + 0.5 * vs * vs) / vs;
    return std::max(0.0, A * norm_cdf(d0) - D * norm_cdf(d0 - vs));
}

double invert_asset(double E, double D, double sigma, double T) {
    require(E > 0.0 && D > 0.0 && sigma > 0.0 && T > 0.0, "invert_asset needs positive inputs");
    // bs_equity(A) < A, so A > E; and bs_equity(A) > A - D, so A < E + D.
    double lo = E;
    double hi = E + D * 1.0000001;
    for (int i = 0; bs_equity(hi, D, sigma, T) < E; ++i) {
        if (i > 200) throw ConvergenceError("invert_asset: could not bracket the root");
        hi = E + (hi - E) * 2.0;
    }
    const double tol = 1e-10 * (E + D);
    for (int i = 0; i < 400 && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (bs_equity(mid, D, sigma, T) < E) lo = mid;
        else hi = mid;
    }
    if (hi - lo > tol) throw ConvergenceError("invert_asset: bisection did not converge");
    return 0.5 * (lo + hi);
}

double interpolate_debt(const DatedSeries& points, Date when) {
    require(points.size() >= 2, "debt interpolation needs at least two points");
    if (when <= points.front().date) return points.front().value;
    if (when >= points.back().date) return points.back().value;
    auto it = std::upper_bound(points.begin(), points.end(), when,
                               [](Date d, const DatedValue& p) { return d < p.date; });
    const DatedValue& b = *it;
    const DatedValue& a = *(it - 1);
    if (when == a.date) return a.value;
    const double span = static_cast<double>((b.date - a.date).count());
    const double w = static_cast<double>((when - a.date).count()) / span;
    return a.value + w * (b.value - a.value);
}

DatedSeries interpolate_debt(const DatedSeries& points, const std::vector<Date>& dates) {
    DatedSeries out;
    out.reserve(dates.size());
    for (Date d : dates) out.push_back({d, interpolate_debt(points, d)});
    return out;
}

namespace {

void check_increasing(const DatedSeries& s, const char* msg) {
    for (std::size_t i = 1; i < s.size(); ++i) require(s[i - 1].date < s[i].date, msg);
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;  // MLE, divisor n
};

Moments log_return_moments(const std::vector<double>& level) {
    Moments m;
    const std::size_t n = level.size() - 1;
    for (std::size_t i = 1; i < level.size(); ++i) m.mean += std::log(level[i] / level[i - 1]);
    m.mean /= static_cast<double>(n);
    for (std::size_t i = 1; i < level.size(); ++i) {
        const double d = std::log(level[i] / level[i - 1]) - m.mean;
        m.var += d * d;
    }
    m.var /= static_cast<double>(n);
    return m;
}

}  // namespace

void validate(const MarketData& data) {
    check_increasing(data.equity, "equity dates must be strictly increasing");
    check_increasing(data.debt_points, "debt dates must be strictly increasing");
    check_increasing(data.index_returns, "index dates must be strictly increasing");
    for (const auto& p : data.equity) require(p.value > 0.0, "equity values must be positive");
    for (const auto& p : data.debt_points) require(p.value > 0.0, "debt values must be positive");
}

ParamEstimate estimate_params(const MarketData& data, int window, int max_iterations) {
    validate(data);
    require(window >= 60, "estimation window must hold at least 60 observations");
    require(data.equity.size() >= static_cast<std::size_t>(window),
            "equity series is shorter than the estimation window");
    require(data.debt_points.size() >= 2, "need at least two debt observations");
    require(max_iterations >= 1, "need at least one iteration");

    const std::size_t start = data.equity.size() - static_cast<std::size_t>(window);
    std::vector<double> eq, debt;
    for (std::size_t i = start; i < data.equity.size(); ++i) {
        eq.push_back(data.equity[i].value);
        debt.push_back(interpolate_debt(data.debt_points, data.equity[i].date));
    }

    const Moments em = log_return_moments(eq);
    require(em.var > 0.0, "equity series has zero variance");
    double sigma = std::sqrt(em.var * kTradingDays);
    std::vector<double> assets(eq.size());
    ParamEstimate out;
    Moments am;
    for (int it = 1; it <= max_iterations; ++it) {
        for (std::size_t i = 0; i < eq.size(); ++i) assets[i] = invert_asset(eq[i], debt[i], sigma);
        am = log_return_moments(assets);
        require(am.var > 0.0, "implied asset series has zero variance");
        const double next = std::sqrt(am.var * kTradingDays);
        const bool done = std::fabs(next - sigma) < 1e-8;
        sigma = next;
        out.iterations = it;
        if (done) break;
        if (it == max_iterations)
            throw ConvergenceError("estimate_params: volatility did not settle within the iteration cap");
    }
    const double n = static_cast<double>(eq.size() - 1);
    // nu is the drift of log A, matching ln R_t = ln R_0 + (nu - r) t + sigma W_t.
    out.sigma = sigma;
    out.nu = am.mean * kTradingDays;
    out.se_nu = sigma / std::sqrt(n / kTradingDays);
    out.se_sigma = sigma / std::sqrt(2.0 * n);
    out.last_asset = assets.back();
    out.last_debt = debt.back();
    return out;
}

WaccBreakdown wacc(const WaccInputs& in) {
    require(in.equity_value > 0.0 && in.debt_value >= 0.0, "WACC needs E > 0 and D >= 0");
    const double avg_debt = 0.5 * (in.debt_value + in.prior_debt_value);
    require(avg_debt > 0.0, "WACC: average debt is zero");
    WaccBreakdown b;
    b.beta = in.beta;
    b.cost_equity = in.risk_free + in.beta * (in.index_annual_return - in.risk_free);
    b.cost_debt = in.interest_paid / avg_debt;
    const double total = in.equity_value + in.debt_value;
    b.w_equity = in.equity_value / total;
    b.w_debt = 1.0 - b.w_equity;
    b.q = b.w_equity * b.cost_equity + b.w_debt * b.cost_debt * (1.0 - in.tax_rate);
    return b;
}

double beta_regress(const std::vector<double>& stock, const std::vector<double>& index) {
    require(stock.size() == index.size() && stock.size() >= 2, "beta needs two equal-length series");
    const double n = static_cast<double>(stock.size());
    double ms = 0.0, mi = 0.0;
    for (std::size_t i = 0; i < stock.size(); ++i) {
        ms += stock[i];
        mi += index[i];
    }
    ms /= n;
    mi /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < stock.size(); ++i) {
        sxy += (index[i] - mi) * (stock[i] - ms);
        sxx += (index[i] - mi) * (index[i] - mi);
    }
    require(sxx > 0.0, "index returns have zero variance");
    return sxy / sxx;
}

}  // namespace levalarm
