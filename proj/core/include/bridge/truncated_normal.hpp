#pragma once

#include "bridge/rng.hpp"

namespace bridge {

/// Draw from N(mean, sd^2) restricted to [lower, upper].
///
/// Inverse-CDF on the side of the interval nearer the mode; one-sided
/// rejection when the whole interval lies more than 5 sd into a tail.
/// sd = +infinity gives the uniform distribution on [lower, upper].
double sample_truncated_normal(double mean, double sd, double lower, double upper, Rng& rng);

/// Standard-normal draw restricted to [a, b].
double sample_truncated_standard_normal(double a, double b, Rng& rng);

}  // namespace bridge
