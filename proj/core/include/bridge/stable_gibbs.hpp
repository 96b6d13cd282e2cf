#pragma once

#include "bridge/model.hpp"
#include "bridge/rng.hpp"
#include "bridge/tilted_stable.hpp"

#include <Eigen/Dense>

namespace bridge::stable {

/// Chain state for the normal scale-mixture sampler. Invariant: every
/// lambda_j is positive and finite.
///
/// lambda_j is the tilted stable variate itself: given lambda the prior on
/// beta_j is N(0, 1 / (2 nu^(2/alpha) lambda_j)), and the lambda^(-1/2) factor
/// of the mixing density cancels against that Gaussian's normalizer.
struct StableState {
    Eigen::VectorXd beta;
    Eigen::VectorXd lambda;
    /// Full conditional of each beta_j given the rest, from the last sweep.
    Eigen::VectorXd cond_mean;
    Eigen::VectorXd cond_sd;
    RejectionStats rejections;

    Eigen::Index p() const { return beta.size(); }
    void check_invariants() const;
};

/// lambda_j | beta_j: tilted stable of index alpha/2 and tilt nu^(2/alpha) beta_j^2.
/// At alpha = 1 the index is 1/2.
double sample_lambda(double beta_j, double nu, double alpha, Rng& rng,
                     RejectionStats* stats = nullptr);

/// N(P^-1 sigma^-2 X'y, P^-1), P = sigma^-2 X'X + 2 nu^(2/alpha) Lambda.
/// Without a data term P = 2 nu^(2/alpha) Lambda.
struct GaussianConditional {
    Eigen::MatrixXd precision;
    Eigen::VectorXd linear;  ///< sigma^-2 X'y
    Eigen::LLT<Eigen::MatrixXd> factor;
    Eigen::VectorXd mean;
};

/// Throws NumericalError with condition diagnostics if P cannot be factorized.
GaussianConditional beta_gaussian_conditional(const model::SufficientStats& stats,
                                              const Eigen::VectorXd& lambda, double nu,
                                              double alpha, double sigma2);

Eigen::VectorXd sample_beta_gaussian(const model::SufficientStats& stats,
                                     const Eigen::VectorXd& lambda, double nu, double alpha,
                                     double sigma2, Rng& rng);

/// Starting state: beta = 0, lambda drawn at zero tilt.
StableState initialize(const model::SufficientStats& stats, const model::BridgeParams& params,
                       Rng& rng);

/// All lambda_j, then beta jointly; records per-coordinate conditionals.
void stable_sweep(StableState& state, const model::SufficientStats& stats,
                  const model::BridgeParams& params, Rng& rng);

}  // namespace bridge::stable
