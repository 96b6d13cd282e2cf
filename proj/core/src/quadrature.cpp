#include "bridge/quadrature.hpp"

#include "bridge/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

namespace bridge::quadrature {

namespace {

struct Piece {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Piece& other) const { return error < other.error; }
};

Piece rule(const Integrand& f, double a, double b) {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const double kronrod = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0);
    const double coarse = gauss<double, 15>::integrate(f, a, b);
    if (!std::isfinite(kronrod)) {
        std::ostringstream msg;
        msg << "quadrature produced a non-finite value on [" << a << ", " << b << "]";
        throw NumericalError(msg.str());
    }
    return {a, b, kronrod, std::abs(kronrod - coarse)};
}

double allowed(const Options& options, double value) {
    return std::max(options.abs_tol, options.rel_tol * std::abs(value));
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                 const Options& options) {
    Result total;
    if (!(b > a)) return total;
    std::vector<double> cuts{a};
    for (double c : breakpoints) {
        if (c > a && c < b) cuts.push_back(c);
    }
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.push_back(b);

    std::priority_queue<Piece> queue;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] > cuts[i]) queue.push(rule(f, cuts[i], cuts[i + 1]));
    }
    auto sum = [&queue] {
        Result r;
        auto copy = queue;
        while (!copy.empty()) {
            r.value += copy.top().value;
            r.error += copy.top().error;
            copy.pop();
        }
        return r;
    };

    total = sum();
    int intervals = static_cast<int>(queue.size());
    while (total.error > allowed(options, total.value)) {
        if (intervals >= options.max_intervals) {
            std::ostringstream msg;
            msg << "quadrature did not converge on [" << a << ", " << b << "]: estimate "
                << total.value << ", error " << total.error;
            throw NumericalError(msg.str());
        }
        const Piece worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const Piece left = rule(f, worst.a, mid);
        const Piece right = rule(f, mid, worst.b);
        queue.push(left);
        queue.push(right);
        total.value += left.value + right.value - worst.value;
        total.error += left.error + right.error - worst.error;
        ++intervals;
        if (intervals % 64 == 0) total = sum();  // limit drift from incremental updates
    }
    return sum();
}

Result integrate_to_infinity(const Integrand& f, double a, std::span<const double> breakpoints,
                             const Options& options) {
    std::vector<double> cuts;
    for (double c : breakpoints) {
        if (c > a) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());

    Result total;
    double lo = a;
    for (double c : cuts) {
        const Result r = integrate(f, lo, c, {}, options);
        total.value += r.value;
        total.error += r.error;
        lo = c;
    }

    double width = std::max(1.0, std::abs(lo));
    int quiet = 0;
    for (int segment = 0; segment < 200; ++segment) {
        const double hi = lo + width;
        const Result r = integrate(f, lo, hi, {}, options);
        total.value += r.value;
        total.error += r.error;
        lo = hi;
        width *= 2.0;
        const bool negligible =
            std::abs(r.value) <= 1e-3 * options.abs_tol + 1e-17 * std::abs(total.value);
        quiet = negligible ? quiet + 1 : 0;
        if (quiet >= 3) return total;
    }
    std::ostringstream msg;
    msg << "integral over [" << a << ", inf) did not settle; partial value " << total.value;
    throw NumericalError(msg.str());
}

}  // namespace bridge::quadrature
