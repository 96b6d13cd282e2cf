#include "bridge/hyper.hpp"

#include "bridge/errors.hpp"

#include <algorithm>
#include <cmath>

namespace bridge::hyper {

NuPosterior NuPosterior::from(const Eigen::VectorXd& beta, double alpha,
                              const model::HyperPrior& prior) {
    model::check_alpha(alpha);
    prior.validate();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) sum += std::pow(std::abs(beta(j)), alpha);
    return {prior.nu_shape + static_cast<double>(beta.size()) / alpha, prior.nu_rate + sum};
}

NuDraw sample_nu(const Eigen::VectorXd& beta, double alpha, const model::HyperPrior& prior,
                 Rng& rng) {
    const NuPosterior post = NuPosterior::from(beta, alpha, prior);
    const double nu = rng.gamma(post.shape, post.rate);
    if (!(nu > 0.0) || !std::isfinite(nu)) {
        throw NumericalError("nu draw is not positive and finite");
    }
    return {nu, std::pow(nu, -1.0 / alpha)};
}

double reflect_alpha(double x, double floor) {
    detail::require(floor >= 0.0 && floor < 1.0, "alpha floor must lie in [0, 1)");
    detail::require(std::isfinite(x), "alpha proposal must be finite");
    const double width = 1.0 - floor;
    const double period = 2.0 * width;
    double y = std::fmod(x - floor, period);
    if (y < 0.0) y += period;
    if (y > width) y = period - y;
    double out = floor + y;
    // the open lower end is hit only on an exact reflection
    if (!(out > floor)) out = 1.0;
    return out;
}

double alpha_log_target(const Eigen::VectorXd& beta, double alpha, double scale, AlphaHold hold,
                        const model::BetaShapes& prior) {
    const double tau = (hold == AlphaHold::kTau) ? scale : std::pow(scale, -1.0 / alpha);
    double value = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) value += model::ep_log_density(beta(j), tau, alpha);
    value += (prior.a - 1.0) * std::log(alpha);
    if (prior.b != 1.0) value += (prior.b - 1.0) * std::log1p(-alpha);
    return value;
}

AlphaMove sample_alpha_rw(const Eigen::VectorXd& beta, double tau, double alpha_current,
                          const model::BetaShapes& prior, double step_sd, Rng& rng, double floor) {
    return sample_alpha_rw(beta, tau, AlphaHold::kTau, alpha_current, prior, step_sd, rng, floor);
}

AlphaMove sample_alpha_rw(const Eigen::VectorXd& beta, double scale, AlphaHold hold,
                          double alpha_current, const model::BetaShapes& prior, double step_sd,
                          Rng& rng, double floor) {
    detail::require(alpha_current > floor && alpha_current <= 1.0,
                    "current alpha must lie in (floor, 1]");
    detail::require(step_sd > 0.0, "step size must be positive");
    detail::require(std::isfinite(scale) && scale > 0.0, "scale parameter must be positive");
    const double proposal = reflect_alpha(alpha_current + step_sd * rng.normal(), floor);
    const double log_ratio = alpha_log_target(beta, proposal, scale, hold, prior) -
                             alpha_log_target(beta, alpha_current, scale, hold, prior);
    if (std::log(rng.uniform()) < log_ratio) return {proposal, true};
    return {alpha_current, false};
}

AlphaStepTuner::AlphaStepTuner(double initial_sd, int batch) : step_sd_(initial_sd), batch_(batch) {
    detail::require(initial_sd > 0.0, "step size must be positive");
    detail::require(batch >= 1, "adaptation batch must be positive");
}

void AlphaStepTuner::record(bool accepted) {
    ++proposals_;
    if (accepted) ++acceptances_;
    if (frozen_) return;
    ++batch_count_;
    if (accepted) ++batch_accepts_;
    if (batch_count_ < batch_) return;
    const double rate = static_cast<double>(batch_accepts_) / batch_count_;
    if (rate < 0.25) step_sd_ *= 0.8;
    if (rate > 0.40) step_sd_ = std::min(step_sd_ * 1.25, 1.0);
    batch_count_ = 0;
    batch_accepts_ = 0;
}

double sample_sigma2(double residual_ss, Eigen::Index n, Rng& rng) {
    detail::require(n >= 1, "need at least one observation");
    detail::require(std::isfinite(residual_ss) && residual_ss > 0.0,
                    "residual sum of squares must be positive");
    return 0.5 * residual_ss / rng.gamma(0.5 * static_cast<double>(n));
}

}  // namespace bridge::hyper
