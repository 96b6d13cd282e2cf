#pragma once

#include "bridge/model.hpp"
#include "bridge/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace bridge::harness {

struct SimulatedProblem {
    model::RegressionData data;  ///< untransformed
    Eigen::VectorXd beta_true;
};

/// Draw from the exponential-power law exp(-|x/tau|^alpha): |x/tau|^alpha is Gamma(1/alpha, 1).
double sample_exponential_power(double alpha, double tau, Rng& rng);

/// Rows of X ~ N(0, B B' + I) with B a p x k_factors standard-normal matrix,
/// beta_true from EP(alpha_true, tau = 1), y = X beta + N(0, 1) noise.
SimulatedProblem simulate_factor_design(Eigen::Index p, Eigen::Index n, Eigen::Index k_factors,
                                        double alpha_true, std::uint64_t seed);

/// Same design; also returns the loading matrix B.
SimulatedProblem simulate_factor_design(Eigen::Index p, Eigen::Index n, Eigen::Index k_factors,
                                        double alpha_true, std::uint64_t seed, Eigen::MatrixXd* loadings);

/// Standard-normal design with `nonzero` coefficients of magnitude in [1, 3]
/// and random sign, the rest zero; y = intercept + X beta + N(0, noise_sd^2).
SimulatedProblem simulate_sparse_design(Eigen::Index n, Eigen::Index p, Eigen::Index nonzero,
                                        double noise_sd, std::uint64_t seed, double intercept = 2.0);

/// X with orthogonal, mean-zero columns and X'X = n I; y = X beta + N(0, sigma^2).
SimulatedProblem simulate_orthogonal_design(Eigen::Index n, const Eigen::VectorXd& beta, double sigma,
                                            std::uint64_t seed);

/// Equicorrelated Gaussian design: each pair of predictors has correlation rho.
SimulatedProblem simulate_equicorrelated_design(Eigen::Index n, const Eigen::VectorXd& beta, double rho,
                                                double sigma, std::uint64_t seed);

}  // namespace bridge::harness
