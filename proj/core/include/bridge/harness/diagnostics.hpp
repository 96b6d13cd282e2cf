#pragma once

#include "bridge/harness/chain.hpp"
#include "bridge/harness/report.hpp"

#include <Eigen/Dense>

#include <vector>

namespace bridge::harness {

/// Sample autocorrelations at lags 0..min(max_lag, N-1), normalized by the
/// lag-0 autocovariance. A constant series gives 1 followed by zeros.
std::vector<double> autocorrelation(const Eigen::VectorXd& series, int max_lag);

/// N / (1 + 2 sum rho_k), truncating the sum by Geyer's initial positive
/// sequence of paired autocorrelations.
double effective_sample_size(const Eigen::VectorXd& series);

/// ACF to lag 100 and ESS for tau, nu, sigma^2, alpha and every coefficient.
ExperimentReport diagnostics(const DrawsStore& draws);

struct GridSpec {
    double lower = 0.0;
    double upper = 0.0;
    int points = 401;
    bool automatic = true;  ///< derive the range from the recorded conditionals
};

/// Density at x of N(mean, sd^2) truncated to [-bound, bound]; uniform when
/// sd is infinite, untruncated when bound is infinite.
double truncated_normal_density(double x, double mean, double sd, double bound);

/// Posterior means/sd/quantiles and Rao-Blackwellized marginal densities: the
/// average over retained draws of each coefficient's full conditional density.
/// Without recorded conditionals only the summaries are produced.
ExperimentReport summarize(const DrawsStore& draws, const GridSpec& grid = {});

struct StratifiedSeries {
    std::vector<double> first;   ///< draws whose latest omega came from Gamma(1, 1)
    std::vector<double> second;  ///< Gamma(2, 1)
};

/// Splits coefficient j's draws by the omega label recorded with each draw.
/// Throws InputError for a store without labels.
StratifiedSeries mode_stratified_draws(const DrawsStore& draws, Eigen::Index coefficient);

/// |mean_1 - mean_2| / pooled sd; zero when either stratum has fewer than two draws.
double stratum_separation(const StratifiedSeries& series);

}  // namespace bridge::harness
