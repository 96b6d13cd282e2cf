#pragma once

#include "bridge/rng.hpp"

#include <cstdint>

namespace bridge::stable {

/// Exponentially tilted positive stable law: density proportional to
/// exp(-tilt s) f(s), where f has Laplace transform exp(-t^index).
/// Its Laplace transform is exp(tilt^index - (tilt + t)^index).
struct TiltedStableSpec {
    double index = 0.5;  ///< in (0, 1)
    double tilt = 0.0;   ///< >= 0

    void validate() const;
};

/// Running proposal counts, for monitoring rejection efficiency.
struct RejectionStats {
    std::uint64_t draws = 0;
    std::uint64_t proposals = 0;

    double proposals_per_draw() const {
        return draws == 0 ? 0.0 : static_cast<double>(proposals) / static_cast<double>(draws);
    }
};

/// Cap on outer rejection rounds before a NumericalError is raised.
inline constexpr std::uint64_t kMaxRejectionRounds = 1'000'000;

/// Untilted positive stable draw through Kanter's representation.
double sample_positive_stable(double index, Rng& rng);

/// Devroye's double-rejection sampler. The first stage draws the angle of
/// Zolotarev's representation from a dominating mixture; the second draws
/// the remaining coordinate around its mode from a normal/uniform/
/// exponential envelope. Expected rounds stay bounded as the tilt grows.
double sample_tilted_stable(const TiltedStableSpec& spec, Rng& rng,
                            RejectionStats* stats = nullptr);

}  // namespace bridge::stable
