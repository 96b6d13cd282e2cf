#pragma once

#include "bridge/model.hpp"
#include "bridge/rng.hpp"

#include <Eigen/Dense>

namespace bridge::hyper {

/// Gamma(shape, rate) conditional of nu given beta, with the latents
/// integrated out: shape = c + p/alpha, rate = d + sum |beta_j|^alpha.
struct NuPosterior {
    double shape;
    double rate;

    static NuPosterior from(const Eigen::VectorXd& beta, double alpha,
                            const model::HyperPrior& prior);
};

struct NuDraw {
    double nu;
    double tau;  ///< nu^(-1/alpha)
};

NuDraw sample_nu(const Eigen::VectorXd& beta, double alpha, const model::HyperPrior& prior,
                 Rng& rng);

/// Lower end of the alpha range (alpha_floor, 1].
inline constexpr double kDefaultAlphaFloor = 0.01;

/// Folds x back into (floor, 1] by reflecting at both ends.
double reflect_alpha(double x, double floor = kDefaultAlphaFloor);

/// Which scale parameter an alpha move keeps fixed.
enum class AlphaHold { kTau, kNu };

/// sum_j log EP(beta_j; tau, alpha) + log beta prior, with tau = nu^(-1/alpha)
/// when nu is held.
double alpha_log_target(const Eigen::VectorXd& beta, double alpha, double scale, AlphaHold hold,
                        const model::BetaShapes& prior);

struct AlphaMove {
    double alpha;
    bool accepted;
};

/// Reflected Gaussian random-walk Metropolis step on alpha at fixed tau.
AlphaMove sample_alpha_rw(const Eigen::VectorXd& beta, double tau, double alpha_current,
                          const model::BetaShapes& prior, double step_sd, Rng& rng,
                          double floor = kDefaultAlphaFloor);

/// Same move with the scale parameter chosen by `hold` (tau or nu).
AlphaMove sample_alpha_rw(const Eigen::VectorXd& beta, double scale, AlphaHold hold,
                          double alpha_current, const model::BetaShapes& prior, double step_sd,
                          Rng& rng, double floor = kDefaultAlphaFloor);

/// Burn-in adaptation of the proposal scale toward 25-40% acceptance.
/// Scale changes only at batch boundaries; freeze() ends adaptation.
class AlphaStepTuner {
public:
    explicit AlphaStepTuner(double initial_sd = 0.05, int batch = 50);

    double step_sd() const { return step_sd_; }
    void record(bool accepted);
    void freeze() { frozen_ = true; }
    bool frozen() const { return frozen_; }
    long proposals() const { return proposals_; }
    long acceptances() const { return acceptances_; }

private:
    double step_sd_;
    int batch_;
    int batch_count_ = 0;
    int batch_accepts_ = 0;
    long proposals_ = 0;
    long acceptances_ = 0;
    bool frozen_ = false;
};

/// sigma^2 ~ InverseGamma(n/2, rss/2), the conditional under p(sigma^2) ~ 1/sigma^2.
double sample_sigma2(double residual_ss, Eigen::Index n, Rng& rng);

}  // namespace bridge::hyper
