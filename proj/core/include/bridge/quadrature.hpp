#pragma once

#include <functional>
#include <span>

namespace bridge::quadrature {

struct Result {
    double value = 0.0;
    double error = 0.0;
};

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-12;
    int max_intervals = 4000;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (15/31) over [a, b], starting from a
/// split at every breakpoint inside the interval. Stops once the summed
/// error estimate is below max(abs_tol, rel_tol |value|); throws
/// NumericalError if the interval budget runs out first.
Result integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints = {},
                 const Options& options = {});

/// Integral over [a, infinity). The half line is covered by segments of
/// doubling width until a segment contributes below the tolerance, so slowly
/// decaying (stretched-exponential) tails are handled.
Result integrate_to_infinity(const Integrand& f, double a, std::span<const double> breakpoints = {},
                             const Options& options = {});

}  // namespace bridge::quadrature
