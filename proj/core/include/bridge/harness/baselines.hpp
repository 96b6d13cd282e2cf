#pragma once

#include "bridge/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace bridge::harness {

/// Least squares. Throws InputError when X does not have full column rank.
Eigen::VectorXd ols(const model::RegressionData& data);

struct ClassicalBridgeOptions {
    int starts = 5;                 ///< the first start is the least-squares (or ridge) point
    int max_iterations = 10000;
    double tolerance = 1e-12;       ///< relative objective change
    double zero_threshold = 1e-8;   ///< coefficients below this are frozen at 0
    std::uint64_t seed = 0;
};

/// Minimizer of the bridge objective at one nu.
struct BridgePath {
    double nu;
    Eigen::VectorXd beta;
    double objective;
    double gcv;
    double df;
    int iterations;   ///< for the winning start
    bool converged;   ///< every start converged within max_iterations
};

struct ClassicalBridgeFit {
    Eigen::VectorXd beta;  ///< at nu_star
    double nu_star;
    std::vector<BridgePath> path;  ///< one entry per grid value, grid order
};

/// One majorize-minimize step target: solves the reweighted ridge system
/// (X'X + diag(nu alpha |b_j|^(alpha-2))) beta = X'y over the active set.
/// Exposed for monotonicity tests.
Eigen::VectorXd bridge_mm_step(const model::SufficientStats& stats, const Eigen::VectorXd& beta,
                               double nu, double alpha, double zero_threshold = 1e-8);

/// Minimizes 0.5 ||y - X beta||^2 + nu sum |beta_j|^alpha from one start.
BridgePath minimize_bridge(const model::RegressionData& data, double nu, double alpha,
                           const Eigen::VectorXd& start, const ClassicalBridgeOptions& options = {});

/// RSS / (n (1 - df/n)^2) with df the trace of the ridge-approximation hat
/// matrix on the active set.
double generalized_cross_validation(const model::RegressionData& data, const Eigen::VectorXd& beta,
                                    double nu, double alpha, double zero_threshold, double* df = nullptr);

/// EM/MM fits over the grid with multi-starts; nu_star minimizes GCV.
ClassicalBridgeFit classical_bridge_em(const model::RegressionData& data, double alpha,
                                       const std::vector<double>& nu_grid,
                                       const ClassicalBridgeOptions& options = {});

/// Log-spaced grid of `points` values spanning six decades around ||X'y||_inf.
std::vector<double> default_nu_grid(const model::RegressionData& data, int points = 30);

}  // namespace bridge::harness
