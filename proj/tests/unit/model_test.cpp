#include "bridge/errors.hpp"
#include "bridge/model.hpp"
#include "bridge/quadrature.hpp"
#include "bridge/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace {

using bridge::Rng;
using namespace bridge::model;

Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index p, Rng& rng) {
    Eigen::MatrixXd X(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) X(i, j) = rng.normal();
    return X;
}

Eigen::VectorXd random_vector(Eigen::Index n, Rng& rng) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

// Written out term by term, independently of bridge_objective.
double lasso_objective(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const Eigen::VectorXd& b,
                       double nu) {
    double rss = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        double fit = 0.0;
        for (Eigen::Index j = 0; j < b.size(); ++j) fit += X(i, j) * b(j);
        rss += (y(i) - fit) * (y(i) - fit);
    }
    double l1 = 0.0;
    for (Eigen::Index j = 0; j < b.size(); ++j) l1 += std::fabs(b(j));
    return 0.5 * rss + nu * l1;
}

TEST(BridgeObjective, ZeroBetaGivesHalfSquaredResponse) {
    Rng rng(1);
    auto data = make_data(random_vector(12, rng), random_matrix(12, 3, rng));
    EXPECT_DOUBLE_EQ(bridge_objective(data, Eigen::VectorXd::Zero(3), 2.0, 0.5),
                     0.5 * data.y.squaredNorm());
}

TEST(BridgeObjective, ZeroNuIsResidualTerm) {
    Rng rng(2);
    auto data = make_data(random_vector(12, rng), random_matrix(12, 3, rng));
    Eigen::VectorXd beta = random_vector(3, rng);
    EXPECT_NEAR(bridge_objective(data, beta, 0.0, 0.7),
                0.5 * (data.y - data.X * beta).squaredNorm(), 1e-12);
}

TEST(BridgeObjective, AlphaOneMatchesLasso) {
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        auto data = make_data(random_vector(15, rng), random_matrix(15, 4, rng));
        Eigen::VectorXd beta = random_vector(4, rng);
        const double nu = std::exp(rng.normal());
        const double expected = lasso_objective(data.y, data.X, beta, nu);
        EXPECT_NEAR(bridge_objective(data, beta, nu, 1.0), expected, 1e-12 * expected);
    }
}

TEST(BridgeObjective, NondecreasingInNu) {
    Rng rng(4);
    auto data = make_data(random_vector(10, rng), random_matrix(10, 3, rng));
    Eigen::VectorXd beta = random_vector(3, rng);
    double previous = bridge_objective(data, beta, 0.0, 0.6);
    for (double nu : {0.1, 0.5, 1.0, 5.0, 50.0}) {
        const double value = bridge_objective(data, beta, nu, 0.6);
        EXPECT_GE(value, previous);
        previous = value;
    }
}

TEST(BridgeObjective, ContinuousThroughZero) {
    Rng rng(5);
    auto data = make_data(random_vector(10, rng), random_matrix(10, 2, rng));
    Eigen::VectorXd beta = random_vector(2, rng);
    beta(0) = 0.0;
    const double at_zero = bridge_objective(data, beta, 1.0, 0.5);
    for (double eps : {1e-4, 1e-8, 1e-12}) {
        beta(0) = eps;
        EXPECT_NEAR(bridge_objective(data, beta, 1.0, 0.5), at_zero, 10.0 * std::sqrt(eps));
    }
}

TEST(BridgeObjective, DimensionMismatchAndNonFinite) {
    Rng rng(6);
    auto data = make_data(random_vector(10, rng), random_matrix(10, 2, rng));
    EXPECT_THROW(bridge_objective(data, Eigen::VectorXd::Zero(3), 1.0, 0.5), bridge::InputError);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(2);
    beta(1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(bridge_objective(data, beta, 1.0, 0.5), bridge::InputError);
}

TEST(EpLogDensity, LaplaceAtOrigin) {
    EXPECT_NEAR(ep_log_density(0.0, 1.0, 1.0), std::log(0.5), 1e-15);
}

TEST(EpLogDensity, DirectSubstitution) {
    EXPECT_NEAR(ep_log_density(4.0, 1.0, 0.5), std::log(0.25) - 2.0, 1e-14);
}

TEST(EpLogDensity, IntegratesToOne) {
    for (double alpha : {0.5, 0.7, 0.9, 1.0}) {
        for (double tau : {0.5, 1.0, 2.0}) {
            auto f = [=](double x) { return std::exp(ep_log_density(x, tau, alpha)); };
            const double half = bridge::quadrature::integrate_to_infinity(f, 0.0).value;
            EXPECT_NEAR(2.0 * half, 1.0, 1e-8) << "alpha " << alpha << " tau " << tau;
        }
    }
}

TEST(EpLogDensity, SymmetricAndUnimodal) {
    for (double alpha : {0.3, 0.8}) {
        double previous = ep_log_density(0.0, 1.3, alpha);
        for (double x = 0.05; x < 20.0; x += 0.05) {
            EXPECT_DOUBLE_EQ(ep_log_density(x, 1.3, alpha), ep_log_density(-x, 1.3, alpha));
            const double value = ep_log_density(x, 1.3, alpha);
            EXPECT_LT(value, previous);
            previous = value;
        }
    }
}

TEST(EpLogDensity, SmallAlphaStaysFinite) {
    // Gamma(1 + 1/alpha) overflows a double well before alpha = 0.005.
    const double value = ep_log_density(0.5, 1.0, 0.005);
    EXPECT_TRUE(std::isfinite(value));
    EXPECT_NEAR(value, -std::log(2.0) - std::lgamma(201.0) - std::pow(0.5, 0.005), 1e-9);
}

TEST(EpLogDensity, DomainErrors) {
    EXPECT_THROW(ep_log_density(1.0, 0.0, 0.5), bridge::InputError);
    EXPECT_THROW(ep_log_density(1.0, 1.0, 0.0), bridge::InputError);
    EXPECT_THROW(ep_log_density(1.0, 1.0, 1.5), bridge::InputError);
}

TEST(LogPosteriorKernel, ZeroBeta) {
    Rng rng(7);
    auto data = make_data(random_vector(9, rng), random_matrix(9, 2, rng));
    BridgeParams params(Eigen::VectorXd::Zero(2), 0.5, 1.0, 2.5);
    EXPECT_NEAR(log_posterior_kernel(data, params), -data.y.squaredNorm() / 5.0, 1e-12);
}

TEST(LogPosteriorKernel, NegativeObjectiveAtUnitVariance) {
    Rng rng(8);
    auto data = make_data(random_vector(11, rng), random_matrix(11, 3, rng));
    for (int rep = 0; rep < 10; ++rep) {
        Eigen::VectorXd beta = random_vector(3, rng);
        const double alpha = 0.3 + 0.7 * rng.uniform();
        const double tau = std::exp(rng.normal());
        auto params = BridgeParams::from_tau(beta, alpha, tau, 1.0);
        const double sum = log_posterior_kernel(data, params) +
                           bridge_objective(data, beta, params.nu(), alpha);
        EXPECT_NEAR(sum, 0.0, 1e-12 * (1.0 + data.y.squaredNorm()));
    }
}

TEST(LogPosteriorKernel, ScaleInvariance) {
    Rng rng(9);
    auto data = make_data(random_vector(11, rng), random_matrix(11, 3, rng));
    const double c = std::exp(rng.normal());
    auto scaled = make_data(c * data.y, data.X);
    const double alpha = 0.7;
    const double tau = 0.8;
    const double sigma2 = 1.7;
    double offset = std::numeric_limits<double>::quiet_NaN();
    for (int rep = 0; rep < 5; ++rep) {
        Eigen::VectorXd beta = random_vector(3, rng);
        auto a = BridgeParams::from_tau(beta, alpha, tau, sigma2);
        auto b = BridgeParams::from_tau(c * beta, alpha, c * tau, c * c * sigma2);
        const double diff = log_posterior_kernel(scaled, b) - log_posterior_kernel(data, a);
        if (std::isnan(offset)) offset = diff;
        EXPECT_NEAR(diff, offset, 1e-10);
    }
}

TEST(BridgeParams, TauNuLink) {
    BridgeParams params(Eigen::VectorXd::Zero(2), 0.5, 3.0, 1.0);
    auto linked = [&] {
        return std::fabs(params.tau() - std::pow(params.nu(), -1.0 / params.alpha())) / params.tau();
    };
    EXPECT_LT(linked(), 1e-12);
    params.set_tau(0.37);
    EXPECT_LT(linked(), 1e-12);
    params.set_alpha_hold_tau(0.8);
    EXPECT_DOUBLE_EQ(params.tau(), 0.37);
    EXPECT_LT(linked(), 1e-12);
    params.set_alpha_hold_nu(0.6);
    EXPECT_LT(linked(), 1e-12);
    params.set_nu(12.0);
    EXPECT_LT(linked(), 1e-12);
    EXPECT_THROW(params.set_sigma2(0.0), bridge::InputError);
    EXPECT_THROW(params.set_alpha_hold_nu(1.2), bridge::InputError);
}

TEST(Standardize, AlreadyStandardIsIdentity) {
    Eigen::MatrixXd X(4, 1);
    X << -1.5, -0.5, 0.5, 1.5;
    X /= std::sqrt(5.0 / 3.0);
    Eigen::VectorXd y(4);
    y << 1.0, -1.0, 2.0, -2.0;
    auto data = standardize(y, X);
    EXPECT_NEAR(data.transforms.x_mean(0), 0.0, 1e-15);
    EXPECT_NEAR(data.transforms.x_scale(0), 1.0, 1e-14);
    EXPECT_NEAR(data.transforms.y_mean, 0.0, 1e-15);
    EXPECT_LT((data.X - X).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Standardize, TwoValueColumn) {
    Eigen::MatrixXd X(2, 1);
    X << 0.0, 2.0;
    Eigen::VectorXd y(2);
    y << 1.0, 3.0;
    auto data = standardize(y, X);
    EXPECT_NEAR(data.transforms.x_scale(0), std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(data.X(0, 0) * data.transforms.x_scale(0), -1.0, 1e-14);
    EXPECT_NEAR(data.X(1, 0) * data.transforms.x_scale(0), 1.0, 1e-14);
}

TEST(Standardize, Invariants) {
    Rng rng(10);
    Eigen::MatrixXd X = random_matrix(30, 4, rng) * 3.0;
    X.col(2).array() += 7.0;
    auto data = standardize(random_vector(30, rng).array() + 4.0, X);
    for (Eigen::Index j = 0; j < 4; ++j) {
        const double mean = data.X.col(j).mean();
        const double var = data.X.col(j).squaredNorm() / 29.0;
        EXPECT_LT(std::fabs(mean), 1e-10);
        EXPECT_LT(std::fabs(var - 1.0), 1e-8);
    }
    EXPECT_LT(std::fabs(data.y.mean()), 1e-12);
}

TEST(Standardize, RoundTrip) {
    Rng rng(11);
    Eigen::MatrixXd X = random_matrix(25, 3, rng) * 2.0;
    X.col(0).array() += 10.0;
    Eigen::VectorXd y = random_vector(25, rng).array() + 5.0;
    auto data = standardize(y, X);
    EXPECT_LT((data.raw_X() - X).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((data.raw_y() - y).cwiseAbs().maxCoeff(), 1e-10);

    Eigen::VectorXd beta = random_vector(3, rng);
    const Eigen::VectorXd standardized_fit = data.X * beta;
    const Eigen::VectorXd raw_fit = data.predict_raw(X, beta);
    EXPECT_LT((raw_fit - (standardized_fit.array() + data.transforms.y_mean).matrix())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
}

TEST(Standardize, Errors) {
    Eigen::MatrixXd X(3, 2);
    X << 1, 4, 2, 4, 3, 4;
    EXPECT_THROW(standardize(Eigen::VectorXd::Ones(3), X), bridge::InputError);
    EXPECT_THROW(standardize(Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1)),
                 bridge::InputError);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(3, 1);
    bad(1, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(make_data(Eigen::VectorXd::Ones(3), bad), bridge::InputError);
}

TEST(SufficientStats, RssMatchesDirect) {
    Rng rng(12);
    auto data = make_data(random_vector(20, rng), random_matrix(20, 3, rng));
    auto stats = SufficientStats::from_data(data);
    Eigen::VectorXd beta = random_vector(3, rng);
    EXPECT_NEAR(stats.rss(beta), (data.y - data.X * beta).squaredNorm(), 1e-10);
    EXPECT_EQ(stats.n, 20);
    EXPECT_FALSE(SufficientStats::no_data(3).likelihood);
}

TEST(HyperPrior, Validation) {
    HyperPrior prior;
    EXPECT_NO_THROW(prior.validate());
    prior.nu_rate = 0.0;
    EXPECT_THROW(prior.validate(), bridge::InputError);
    prior.nu_rate = 2.0;
    prior.alpha_prior = BetaShapes{0.0, 1.0};
    EXPECT_THROW(prior.validate(), bridge::InputError);
}

}  // namespace
