#include "bridge/stable_gibbs.hpp"

#include "bridge/errors.hpp"

#include <cmath>
#include <sstream>

namespace bridge::stable {

namespace {

double lambda_scale(double nu, double alpha) { return 2.0 * std::pow(nu, 2.0 / alpha); }

}  // namespace

void StableState::check_invariants() const {
    for (Eigen::Index j = 0; j < lambda.size(); ++j) {
        if (!(lambda(j) > 0.0) || !std::isfinite(lambda(j))) {
            std::ostringstream msg;
            msg << "lambda_" << j << " = " << lambda(j) << " is not positive and finite";
            throw NumericalError(msg.str());
        }
    }
}

double sample_lambda(double beta_j, double nu, double alpha, Rng& rng, RejectionStats* stats) {
    model::check_alpha(alpha);
    detail::require(std::isfinite(nu) && nu > 0.0, "nu must be positive and finite");
    detail::require(std::isfinite(beta_j), "beta must be finite");
    const TiltedStableSpec spec{0.5 * alpha, std::pow(nu, 2.0 / alpha) * beta_j * beta_j};
    return sample_tilted_stable(spec, rng, stats);
}

GaussianConditional beta_gaussian_conditional(const model::SufficientStats& stats,
                                              const Eigen::VectorXd& lambda, double nu,
                                              double alpha, double sigma2) {
    const Eigen::Index p = stats.p();
    detail::require(lambda.size() == p, "lambda has the wrong length");
    detail::require(sigma2 > 0.0, "sigma^2 must be positive");
    GaussianConditional g;
    const double scale = lambda_scale(nu, alpha);
    if (stats.likelihood) {
        g.precision = stats.XtX / sigma2;
        g.linear = stats.Xty / sigma2;
    } else {
        g.precision = Eigen::MatrixXd::Zero(p, p);
        g.linear = Eigen::VectorXd::Zero(p);
    }
    g.precision.diagonal() += scale * lambda;
    g.factor.compute(g.precision);
    if (g.factor.info() != Eigen::Success) {
        const Eigen::VectorXd d = g.precision.diagonal();
        std::ostringstream msg;
        msg << "precision matrix is not positive definite (p = " << p
            << ", diagonal range [" << d.minCoeff() << ", " << d.maxCoeff()
            << "], lambda range [" << lambda.minCoeff() << ", " << lambda.maxCoeff() << "])";
        throw NumericalError(msg.str());
    }
    g.mean = g.factor.solve(g.linear);
    return g;
}

Eigen::VectorXd sample_beta_gaussian(const model::SufficientStats& stats,
                                     const Eigen::VectorXd& lambda, double nu, double alpha,
                                     double sigma2, Rng& rng) {
    const GaussianConditional g = beta_gaussian_conditional(stats, lambda, nu, alpha, sigma2);
    Eigen::VectorXd z(stats.p());
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng.normal();
    // P = L L', so L'^-1 z has covariance P^-1
    return g.mean + g.factor.matrixU().solve(z);
}

StableState initialize(const model::SufficientStats& stats, const model::BridgeParams& params,
                       Rng& rng) {
    model::check_alpha(params.alpha());
    StableState state;
    state.beta = Eigen::VectorXd::Zero(stats.p());
    state.lambda.resize(stats.p());
    for (Eigen::Index j = 0; j < stats.p(); ++j) {
        state.lambda(j) = sample_lambda(0.0, params.nu(), params.alpha(), rng, &state.rejections);
    }
    state.cond_mean = Eigen::VectorXd::Zero(stats.p());
    state.cond_sd = Eigen::VectorXd::Zero(stats.p());
    return state;
}

void stable_sweep(StableState& state, const model::SufficientStats& stats,
                  const model::BridgeParams& params, Rng& rng) {
    const double nu = params.nu();
    const double alpha = params.alpha();
    const Eigen::Index p = state.p();
    detail::require(p == stats.p(), "state and data dimensions differ");
    for (Eigen::Index j = 0; j < p; ++j) {
        state.lambda(j) = sample_lambda(state.beta(j), nu, alpha, rng, &state.rejections);
    }
    state.check_invariants();
    const GaussianConditional g =
        beta_gaussian_conditional(stats, state.lambda, nu, alpha, params.sigma2());
    Eigen::VectorXd z(p);
    for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
    state.beta = g.mean + g.factor.matrixU().solve(z);
    // coordinate conditionals at the new point
    const Eigen::VectorXd Pb = g.precision * state.beta;
    for (Eigen::Index j = 0; j < p; ++j) {
        const double pjj = g.precision(j, j);
        state.cond_mean(j) = (g.linear(j) - (Pb(j) - pjj * state.beta(j))) / pjj;
        state.cond_sd(j) = 1.0 / std::sqrt(pjj);
    }
}

}  // namespace bridge::stable
