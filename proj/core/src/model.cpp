#include "bridge/model.hpp"

#include "bridge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bridge::model {

using detail::require;

namespace {

void check_finite(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
    require(X.rows() >= 1 && X.cols() >= 1, "design must have n >= 1 and p >= 1");
    require(y.size() == X.rows(), "response length " + std::to_string(y.size()) +
                                      " does not match design rows " + std::to_string(X.rows()));
    require(y.allFinite(), "response contains non-finite values");
    require(X.allFinite(), "design contains non-finite values");
}

}  // namespace

RegressionData make_data(Eigen::VectorXd y, Eigen::MatrixXd X) {
    check_finite(y, X);
    RegressionData data;
    data.transforms.x_mean = Eigen::VectorXd::Zero(X.cols());
    data.transforms.x_scale = Eigen::VectorXd::Ones(X.cols());
    data.y = std::move(y);
    data.X = std::move(X);
    return data;
}

RegressionData standardize(const Eigen::VectorXd& y_raw, const Eigen::MatrixXd& X_raw,
                           StandardizeOptions options) {
    check_finite(y_raw, X_raw);
    const Eigen::Index n = X_raw.rows();
    const Eigen::Index p = X_raw.cols();
    if (options.center_y || options.standardize_x) {
        require(n >= 2, "standardization needs at least two observations");
    }

    RegressionData data;
    Transforms& t = data.transforms;
    t.centered_y = options.center_y;
    t.standardized_x = options.standardize_x;
    t.x_mean = Eigen::VectorXd::Zero(p);
    t.x_scale = Eigen::VectorXd::Ones(p);

    data.y = y_raw;
    if (options.center_y) {
        t.y_mean = y_raw.mean();
        data.y.array() -= t.y_mean;
    }

    data.X = X_raw;
    if (options.standardize_x) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const double mean = X_raw.col(j).mean();
            Eigen::VectorXd centered = X_raw.col(j).array() - mean;
            const double var = centered.squaredNorm() / static_cast<double>(n - 1);
            const double sd = std::sqrt(var);
            // relative to the column's magnitude so that large offsets with
            // rounding noise still count as constant
            const double magnitude = std::max(1.0, X_raw.col(j).cwiseAbs().maxCoeff());
            if (!(sd > 1e-12 * magnitude)) {
                throw InputError("column " + std::to_string(j) + " is constant");
            }
            t.x_mean(j) = mean;
            t.x_scale(j) = sd;
            data.X.col(j) = centered / sd;
        }
    }
    return data;
}

Eigen::VectorXd RegressionData::raw_coefficients(const Eigen::VectorXd& beta) const {
    require(beta.size() == p(), "coefficient length does not match design");
    return beta.cwiseQuotient(transforms.x_scale);
}

double RegressionData::raw_intercept(const Eigen::VectorXd& beta) const {
    return transforms.y_mean - transforms.x_mean.dot(raw_coefficients(beta));
}

Eigen::VectorXd RegressionData::predict_raw(const Eigen::MatrixXd& X_raw,
                                            const Eigen::VectorXd& beta) const {
    require(X_raw.cols() == p(), "prediction design has the wrong number of columns");
    Eigen::VectorXd out = X_raw * raw_coefficients(beta);
    out.array() += raw_intercept(beta);
    return out;
}

Eigen::VectorXd RegressionData::raw_y() const {
    Eigen::VectorXd out = y;
    out.array() += transforms.y_mean;
    return out;
}

Eigen::MatrixXd RegressionData::raw_X() const {
    Eigen::MatrixXd out = X * transforms.x_scale.asDiagonal();
    out.rowwise() += transforms.x_mean.transpose();
    return out;
}

SufficientStats SufficientStats::from_data(const RegressionData& data) {
    SufficientStats s;
    s.XtX = data.X.transpose() * data.X;
    s.Xty = data.X.transpose() * data.y;
    s.yty = data.y.squaredNorm();
    s.n = data.n();
    return s;
}

SufficientStats SufficientStats::no_data(Eigen::Index p) {
    require(p >= 1, "need at least one coefficient");
    SufficientStats s;
    s.XtX = Eigen::MatrixXd::Zero(p, p);
    s.Xty = Eigen::VectorXd::Zero(p);
    s.likelihood = false;
    return s;
}

double SufficientStats::rss(const Eigen::VectorXd& beta) const {
    const double value = yty - 2.0 * beta.dot(Xty) + beta.dot(XtX * beta);
    return std::max(value, 0.0);
}

void check_alpha(double alpha) {
    require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
}

BridgeParams::BridgeParams(Eigen::VectorXd beta, double alpha, double nu, double sigma2)
    : beta_(std::move(beta)), alpha_(alpha), nu_(0.0), tau_(0.0), sigma2_(0.0) {
    check_alpha(alpha);
    set_nu(nu);
    set_sigma2(sigma2);
}

BridgeParams BridgeParams::from_tau(Eigen::VectorXd beta, double alpha, double tau,
                                    double sigma2) {
    check_alpha(alpha);
    require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
    BridgeParams params(std::move(beta), alpha, 1.0, sigma2);
    params.set_tau(tau);
    return params;
}

void BridgeParams::set_nu(double nu) {
    require(std::isfinite(nu) && nu > 0.0, "nu must be positive");
    nu_ = nu;
    tau_ = std::exp(-std::log(nu) / alpha_);
}

void BridgeParams::set_tau(double tau) {
    require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
    tau_ = tau;
    nu_ = std::exp(-alpha_ * std::log(tau));
}

void BridgeParams::set_alpha_hold_nu(double alpha) {
    check_alpha(alpha);
    alpha_ = alpha;
    set_nu(nu_);
}

void BridgeParams::set_alpha_hold_tau(double alpha) {
    check_alpha(alpha);
    alpha_ = alpha;
    set_tau(tau_);
}

void BridgeParams::set_sigma2(double sigma2) {
    require(std::isfinite(sigma2) && sigma2 > 0.0, "sigma2 must be positive");
    sigma2_ = sigma2;
}

void HyperPrior::validate() const {
    require(nu_shape > 0.0 && nu_rate > 0.0, "nu prior shape and rate must be positive");
    if (alpha_prior) {
        require(alpha_prior->a > 0.0 && alpha_prior->b > 0.0, "alpha prior shapes must be positive");
    }
}

double bridge_objective(const RegressionData& data, const Eigen::VectorXd& beta, double nu,
                        double alpha) {
    require(beta.size() == data.p(), "coefficient length does not match design");
    require(beta.allFinite() && std::isfinite(nu) && nu >= 0.0, "non-finite objective input");
    check_alpha(alpha);
    const double rss = (data.y - data.X * beta).squaredNorm();
    double penalty = 0.0;
    if (nu > 0.0) {
        for (double b : beta) penalty += std::pow(std::abs(b), alpha);
    }
    return 0.5 * rss + nu * penalty;
}

double ep_log_density(double x, double tau, double alpha) {
    check_alpha(alpha);
    require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
    require(std::isfinite(x), "x must be finite");
    const double log_norm = -std::log(2.0 * tau) - std::lgamma(1.0 + 1.0 / alpha);
    return log_norm - std::pow(std::abs(x / tau), alpha);
}

double log_posterior_kernel(const RegressionData& data, const BridgeParams& params) {
    const Eigen::VectorXd& beta = params.beta();
    require(beta.size() == data.p(), "coefficient length does not match design");
    const double rss = (data.y - data.X * beta).squaredNorm();
    double penalty = 0.0;
    for (double b : beta) penalty += std::pow(std::abs(b / params.tau()), params.alpha());
    return -rss / (2.0 * params.sigma2()) - penalty;
}

}  // namespace bridge::model
