#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace levalarm {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double norm_pdf(double x);
// Phi(x) = erfc(-x/sqrt 2)/2.
double norm_cdf(double x);
// log Phi(x), finite for any finite x.
double log_norm_cdf(double x);

struct QuadratureOptions {
    double abs_tol = 1e-9;
    std::size_t max_intervals = 1000000;
    int initial_panels = 8;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t intervals = 0;
    bool converged = true;
};

// Adaptive Simpson on a finite interval. When the interval budget runs out
// the remaining panels are accepted as they are and converged is cleared.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureOptions& opt = {});

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opt = {});

// n points from lo to hi (both included), evenly spaced in log t.
std::vector<double> geometric_grid(double lo = 1e-4, double hi = 10.0, std::size_t n = 400);

// Trapezoid rule over sampled data.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace levalarm
