#pragma once

#include <Eigen/Dense>

#include <optional>

namespace bridge::model {

/// Column transforms applied when building a RegressionData, kept so that
/// fitted coefficients and predictions can be mapped back to raw scale.
struct Transforms {
    double y_mean = 0.0;
    Eigen::VectorXd x_mean;   ///< per-column mean removed (zeros if not centered)
    Eigen::VectorXd x_scale;  ///< per-column divisor (ones if not scaled)
    bool centered_y = false;
    bool standardized_x = false;
};

/// Response and design for y = X beta + noise.
///
/// Invariants: n >= 1, p >= 1, every entry finite. When built by
/// standardize() with standardize_x set, each column has mean 0 and unit
/// sample variance.
struct RegressionData {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    Transforms transforms;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }

    /// Coefficients on the raw predictor scale.
    Eigen::VectorXd raw_coefficients(const Eigen::VectorXd& beta) const;
    /// Intercept on raw scale implied by centering.
    double raw_intercept(const Eigen::VectorXd& beta) const;
    /// Raw-scale prediction for raw predictor rows.
    Eigen::VectorXd predict_raw(const Eigen::MatrixXd& X_raw, const Eigen::VectorXd& beta) const;
    /// Recover raw (y, X) from the stored transforms.
    Eigen::VectorXd raw_y() const;
    Eigen::MatrixXd raw_X() const;
};

/// Cross products the samplers work from. `likelihood` false represents the
/// no-data limit (sigma^2 -> infinity): the data term vanishes and only the
/// prior acts on beta.
struct SufficientStats {
    Eigen::MatrixXd XtX;
    Eigen::VectorXd Xty;
    double yty = 0.0;
    Eigen::Index n = 0;
    bool likelihood = true;

    Eigen::Index p() const { return XtX.rows(); }
    static SufficientStats from_data(const RegressionData& data);
    static SufficientStats no_data(Eigen::Index p);
    /// ||y - X beta||^2 from the cross products.
    double rss(const Eigen::VectorXd& beta) const;
};

/// Wraps raw arrays without any transform; checks shape and finiteness.
RegressionData make_data(Eigen::VectorXd y, Eigen::MatrixXd X);

struct StandardizeOptions {
    bool center_y = true;
    bool standardize_x = true;
};

/// Centers y and centers/scales X columns to unit sample variance.
/// Throws InputError on n < 2 or a constant column.
RegressionData standardize(const Eigen::VectorXd& y_raw, const Eigen::MatrixXd& X_raw,
                           StandardizeOptions options = {});

/// Exponential-power hyperparameters. Holds nu and tau = nu^(-1/alpha)
/// together; the setters keep the pair synchronized.
class BridgeParams {
public:
    BridgeParams(Eigen::VectorXd beta, double alpha, double nu, double sigma2);
    static BridgeParams from_tau(Eigen::VectorXd beta, double alpha, double tau, double sigma2);

    const Eigen::VectorXd& beta() const { return beta_; }
    Eigen::VectorXd& beta() { return beta_; }
    double alpha() const { return alpha_; }
    double nu() const { return nu_; }
    double tau() const { return tau_; }
    double sigma2() const { return sigma2_; }

    void set_nu(double nu);
    void set_tau(double tau);
    /// Changes alpha holding nu fixed (tau follows).
    void set_alpha_hold_nu(double alpha);
    /// Changes alpha holding tau fixed (nu follows).
    void set_alpha_hold_tau(double alpha);
    void set_sigma2(double sigma2);

private:
    Eigen::VectorXd beta_;
    double alpha_;
    double nu_;
    double tau_;
    double sigma2_;
};

struct BetaShapes {
    double a = 1.0;
    double b = 1.0;
};

/// Priors for the hyperparameters: Gamma(nu_shape, nu_rate) on nu, a beta
/// prior on alpha (nullopt when alpha is fixed), Jeffreys on sigma^2.
struct HyperPrior {
    double nu_shape = 2.0;
    double nu_rate = 2.0;
    std::optional<BetaShapes> alpha_prior;
    bool sigma2_jeffreys = true;

    void validate() const;
};

void check_alpha(double alpha);

/// 0.5 ||y - X beta||^2 + nu sum |beta_j|^alpha.
double bridge_objective(const RegressionData& data, const Eigen::VectorXd& beta, double nu,
                        double alpha);

/// log of exp(-|x/tau|^alpha) / (2 tau Gamma(1 + 1/alpha)), the proper
/// exponential-power density.
double ep_log_density(double x, double tau, double alpha);

/// -||y - X beta||^2 / (2 sigma^2) - sum |beta_j / tau|^alpha.
double log_posterior_kernel(const RegressionData& data, const BridgeParams& params);

}  // namespace bridge::model
