#include "bridge/truncated_normal.hpp"

#include "bridge/errors.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bridge {

namespace {

constexpr double kTailCut = 5.0;

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double phi_quantile(double p) {
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

/// Interval [a, b] with a >= kTailCut.
double sample_right_tail(double a, double b, Rng& rng) {
    if (b - a <= 1.0 / a) {
        // narrow: uniform proposal, acceptance exp(-(z^2 - a^2)/2) >= 1/e
        for (;;) {
            const double z = a + (b - a) * rng.uniform();
            if (rng.exponential() >= 0.5 * (z - a) * (z + a)) return z;
        }
    }
    const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        const double z = a + rng.exponential() / rate;
        if (z > b) continue;
        const double d = z - rate;
        if (rng.exponential() >= 0.5 * d * d) return z;
    }
}

/// Interval [a, b] with a <= 0: both CDF values are computed without
/// cancellation against 1.
double sample_inverse_cdf(double a, double b, Rng& rng) {
    const double pa = phi_cdf(a);
    const double pb = phi_cdf(b);
    const double p = pa + (pb - pa) * rng.uniform();
    if (!(p > 0.0)) return a;
    if (!(p < 1.0)) return b;
    return std::clamp(phi_quantile(p), a, b);
}

}  // namespace

double sample_truncated_standard_normal(double a, double b, Rng& rng) {
    detail::require(!std::isnan(a) && !std::isnan(b) && a <= b,
                    "truncation interval must satisfy lower <= upper");
    if (a == b) return a;
    if (a >= kTailCut) return sample_right_tail(a, b, rng);
    if (b <= -kTailCut) return -sample_right_tail(-b, -a, rng);
    if (a > 0.0) return -sample_inverse_cdf(-b, -a, rng);
    return sample_inverse_cdf(a, b, rng);
}

double sample_truncated_normal(double mean, double sd, double lower, double upper, Rng& rng) {
    detail::require(std::isfinite(mean), "truncated normal mean must be finite");
    detail::require(sd > 0.0, "truncated normal sd must be positive");
    detail::require(lower <= upper, "truncation interval must satisfy lower <= upper");
    if (std::isinf(sd)) {
        detail::require(std::isfinite(lower) && std::isfinite(upper),
                        "flat truncated draw needs a bounded interval");
        return lower + (upper - lower) * rng.uniform();
    }
    const double z = sample_truncated_standard_normal((lower - mean) / sd, (upper - mean) / sd, rng);
    return std::clamp(mean + sd * z, lower, upper);
}

}  // namespace bridge
