#include "bridge/tilted_stable.hpp"

#include "bridge/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace bridge::stable {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

/// log of Zolotarev's function
/// A(u) = [sin(a u)^a sin((1-a) u)^(1-a) / sin(u)]^(1/(1-a)).
double log_zolotarev(double u, double a) {
    return (a * std::log(std::sin(a * u)) + (1.0 - a) * std::log(std::sin((1.0 - a) * u)) -
            std::log(std::sin(u))) /
           (1.0 - a);
}

/// sinc(u) / (sinc(a u)^a sinc((1-a) u)^(1-a)); decreases from 1 at 0 to 0 at pi.
double zeta_squared(double u, double a) {
    return sinc(u) / (std::pow(sinc(a * u), a) * std::pow(sinc((1.0 - a) * u), 1.0 - a));
}

void count(RejectionStats* stats, std::uint64_t rounds) {
    if (stats) {
        ++stats->draws;
        stats->proposals += rounds;
    }
}

[[noreturn]] void give_up(const TiltedStableSpec& spec) {
    std::ostringstream msg;
    msg << "tilted stable sampler exceeded " << kMaxRejectionRounds
        << " rejection rounds (index " << spec.index << ", tilt " << spec.tilt << ")";
    throw NumericalError(msg.str());
}

}  // namespace

void TiltedStableSpec::validate() const {
    detail::require(std::isfinite(index) && index > 0.0 && index < 1.0,
                    "stable index must lie in (0, 1)");
    detail::require(std::isfinite(tilt) && tilt >= 0.0, "tilt must be nonnegative");
}

double sample_positive_stable(double index, Rng& rng) {
    detail::require(index > 0.0 && index < 1.0, "stable index must lie in (0, 1)");
    const double u = kPi * rng.uniform();
    const double e = rng.exponential();
    const double b = (1.0 - index) / index;
    return std::exp(b * (log_zolotarev(u, index) - std::log(e)));
}

double sample_tilted_stable(const TiltedStableSpec& spec, Rng& rng, RejectionStats* stats) {
    spec.validate();
    const double a = spec.index;
    const double lambda = spec.tilt;
    const double lambda_a = std::pow(lambda, a);
    if (lambda == 0.0 || lambda_a == 0.0) {
        count(stats, 1);
        return sample_positive_stable(a, rng);
    }

    const double b = (1.0 - a) / a;
    const double c1 = std::sqrt(0.5 * kPi);
    const double gamma = lambda_a * a * (1.0 - a);
    const double sgamma = std::sqrt(gamma);
    const double c3 = (2.0 + c1) * sgamma;
    const double xi = (1.0 + std::numbers::sqrt2 * c3) / kPi;
    const double psi = c3 * std::exp(-gamma * kPi * kPi / 8.0) / std::sqrt(kPi);
    const double w1 = c1 * xi / sgamma;
    const double w2 = 2.0 * std::sqrt(kPi) * psi;
    const double w3 = xi * kPi;
    const double log_lambda = std::log(lambda);

    for (std::uint64_t round = 1; round <= kMaxRejectionRounds; ++round) {
        // stage one: the angle u
        const double v = rng.uniform();
        double u;
        if (gamma >= 1.0) {
            if (v < w1 / (w1 + w2)) {
                u = std::abs(rng.normal()) / sgamma;
            } else {
                const double w = rng.uniform();
                u = kPi * (1.0 - w * w);
            }
        } else {
            const double w = rng.uniform();
            u = (v < w3 / (w3 + w2)) ? kPi * w : kPi * (1.0 - w * w);
        }
        const double w = rng.uniform();
        if (!(u > 0.0 && u < kPi)) continue;

        const double zeta2 = zeta_squared(u, a);
        const double zeta = std::sqrt(zeta2);
        const double z = 1.0 / (1.0 - std::pow(1.0 + a * zeta / sgamma, -1.0 / a));
        const double target = ((1.0 + c1) * sgamma / zeta + z) * std::exp(-lambda_a * (1.0 / zeta2 - 1.0));
        double envelope = psi / std::sqrt(kPi - u);
        envelope += (gamma >= 1.0) ? xi * std::exp(-0.5 * gamma * u * u) : xi;
        if (!(w * kPi * envelope <= target)) continue;

        // stage two: x given u, around the mode m of a x + lambda x^(-b)
        const double zolo = std::exp(log_zolotarev(u, a));
        const double m = std::pow(b / zolo, a) * lambda_a;
        const double delta = std::sqrt(m * a / zolo);
        const double a1 = delta * c1;
        const double a2 = delta;
        const double a3 = z / zolo;
        const double total = a1 + a2 + a3;

        const double pick = rng.uniform();
        double x;
        double correction;
        if (pick < a1 / total) {
            const double n = rng.normal();
            x = m - delta * std::abs(n);
            correction = -0.5 * n * n;
        } else if (pick < (a1 + a2) / total) {
            x = m + delta * rng.uniform();
            correction = 0.0;
        } else {
            const double e = rng.exponential();
            x = m + delta + a3 * e;
            correction = -e;
        }
        if (!(x > 0.0)) continue;

        // lambda (x^-b - m^-b) written as lambda m^-b ((m/x)^b - 1)
        const double excess = zolo * (x - m) +
                              std::exp(log_lambda - b * std::log(m)) * (std::pow(m / x, b) - 1.0) +
                              correction;
        if (std::isnan(excess)) continue;
        if (excess <= rng.exponential()) {
            count(stats, round);
            return std::exp(-b * std::log(x));
        }
    }
    give_up(spec);
}

}  // namespace bridge::stable
