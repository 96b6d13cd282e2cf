#pragma once

#include "bridge/harness/chain.hpp"
#include "bridge/harness/report.hpp"
#include "bridge/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bridge::harness {

enum class FitMethod { kOls, kClassical, kBayesFixedAlpha, kBayesSampledAlpha };

std::string to_string(FitMethod method);
FitMethod parse_fit_method(const std::string& name);
std::vector<FitMethod> all_fit_methods();

struct PredictionOptions {
    double test_fraction = 0.2;
    double alpha = 0.5;           ///< classical bridge and fixed-alpha Bayes
    std::vector<double> nu_grid;  ///< empty: default_nu_grid on each training set
};

/// Random train/test splits of a raw data set (the transforms stored in
/// `data` are undone first). Each split standardizes its training part, fits
/// every method and scores the test part. Tables:
///   "sse_raw": test SSE of raw-scale predictions, intercept included;
///   "sse_centered": test SSE after centering the test response and
///   predictors on their own means (slope-only predictions).
/// Split i draws its permutation and chain seeds from config.seed + i.
ExperimentReport prediction_experiment(const model::RegressionData& data, int n_splits,
                                       const std::vector<FitMethod>& methods,
                                       const ChainConfig& config,
                                       const PredictionOptions& options = {});

struct EstimationScale {
    Eigen::Index p = 20;
    Eigen::Index n = 40;
    Eigen::Index k_factors = 4;
};

/// Per replicate r: simulate_factor_design(seed + r), then ||beta_hat - beta_true||^2
/// for OLS, the classical bridge at alpha_true, and the Bayes posterior mean.
/// Table "sse" has columns ols, classical, bayes.
ExperimentReport estimation_experiment(double alpha_true, int replicates, const EstimationScale& scale,
                                       const ChainConfig& config, std::uint64_t seed);

}  // namespace bridge::harness
