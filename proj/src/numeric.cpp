#include "levalarm/numeric.hpp"

#include "levalarm/errors.hpp"

#include <cmath>
#include <vector>

namespace levalarm {

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double log_norm_cdf(double x) {
    if (x > 0.0) return std::log1p(-0.5 * std::erfc(x / kSqrt2));
    if (x > -35.0) return std::log(0.5 * std::erfc(-x / kSqrt2));
    // Mills ratio expansion sum (-1)^k (2k-1)!! x^(-2k); by k = 8 the terms are
    // below 1e-19 for |x| >= 35.
    const double z = 1.0 / (x * x);
    double series = 1.0;
    for (int k = 8; k >= 1; --k) series = 1.0 - (2 * k - 1) * z * series;
    return -0.5 * x * x - std::log(-x) - 0.5 * std::log(2.0 * kPi) + std::log(series);
}

namespace {

struct Panel {
    double a, m, b;
    double fa, fm, fb;
    double whole;
    double tol;
    int depth;
};

double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureOptions& opt) {
    QuadratureResult out;
    if (a == b) return out;
    require(std::isfinite(a) && std::isfinite(b), "quadrature limits must be finite");
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }

    const int n0 = opt.initial_panels > 0 ? opt.initial_panels : 1;
    std::vector<Panel> stack;
    stack.reserve(64);
    const double h = (b - a) / n0;
    double left = a;
    double f_left = f(a);
    for (int i = 0; i < n0; ++i) {
        const double right = (i + 1 == n0) ? b : a + (i + 1) * h;
        const double mid = 0.5 * (left + right);
        const double fm = f(mid);
        const double fr = f(right);
        stack.push_back({left, mid, right, f_left, fm, fr, simpson(left, right, f_left, fm, fr),
                         opt.abs_tol / n0, 0});
        left = right;
        f_left = fr;
    }
    out.intervals = stack.size();

    // Depth-first so the stack stays shallow.
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double lm = 0.5 * (p.a + p.m);
        const double rm = 0.5 * (p.m + p.b);
        const double flm = f(lm);
        const double frm = f(rm);
        const double sl = simpson(p.a, p.m, p.fa, flm, p.fm);
        const double sr = simpson(p.m, p.b, p.fm, frm, p.fb);
        const double diff = sl + sr - p.whole;
        const bool budget_left = out.intervals < opt.max_intervals;
        if (std::fabs(diff) <= 15.0 * p.tol || p.depth >= 60 || !budget_left ||
            !(p.m > p.a && p.b > p.m)) {
            out.value += sl + sr + diff / 15.0;
            out.error_estimate += std::fabs(diff) / 15.0;
            if (!budget_left && std::fabs(diff) > 15.0 * p.tol) out.converged = false;
            continue;
        }
        ++out.intervals;
        stack.push_back({p.m, rm, p.b, p.fm, frm, p.fb, sr, 0.5 * p.tol, p.depth + 1});
        stack.push_back({p.a, lm, p.m, p.fa, flm, p.fm, sl, 0.5 * p.tol, p.depth + 1});
    }
    out.value *= sign;
    return out;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt) {
    return adaptive_simpson(f, a, b, opt).value;
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
    require(lo > 0.0 && hi > lo && n >= 2, "geometric grid needs 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    const double step = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.front() = lo;
    g.back() = hi;
    return g;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size(), "trapezoid: size mismatch");
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return s;
}

}  // namespace levalarm
