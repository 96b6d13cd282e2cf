#include "bridge/harness/simulate.hpp"

#include "bridge/errors.hpp"

#include <cmath>

namespace bridge::harness {

namespace {

Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = rng.normal();
    return m;
}

Eigen::VectorXd noise(Eigen::Index n, double sd, Rng& rng) {
    Eigen::VectorXd e(n);
    for (Eigen::Index i = 0; i < n; ++i) e(i) = sd * rng.normal();
    return e;
}

}  // namespace

double sample_exponential_power(double alpha, double tau, Rng& rng) {
    model::check_alpha(alpha);
    const double magnitude = tau * std::pow(rng.gamma(1.0 / alpha), 1.0 / alpha);
    return rng.uniform() < 0.5 ? -magnitude : magnitude;
}

SimulatedProblem simulate_factor_design(Eigen::Index p, Eigen::Index n, Eigen::Index k_factors,
                                        double alpha_true, std::uint64_t seed) {
    return simulate_factor_design(p, n, k_factors, alpha_true, seed, nullptr);
}

SimulatedProblem simulate_factor_design(Eigen::Index p, Eigen::Index n, Eigen::Index k_factors,
                                        double alpha_true, std::uint64_t seed,
                                        Eigen::MatrixXd* loadings) {
    detail::require(p >= 1 && n >= 1 && k_factors >= 0, "design dimensions must be positive");
    Rng rng(seed);
    const Eigen::MatrixXd B = normal_matrix(p, k_factors, rng);
    const Eigen::MatrixXd F = normal_matrix(n, k_factors, rng);
    const Eigen::MatrixXd X = F * B.transpose() + normal_matrix(n, p, rng);
    Eigen::VectorXd beta(p);
    for (Eigen::Index j = 0; j < p; ++j) beta(j) = sample_exponential_power(alpha_true, 1.0, rng);
    Eigen::VectorXd y = X * beta + noise(n, 1.0, rng);
    if (loadings) *loadings = B;
    return {model::make_data(std::move(y), X), beta};
}

SimulatedProblem simulate_sparse_design(Eigen::Index n, Eigen::Index p, Eigen::Index nonzero,
                                        double noise_sd, std::uint64_t seed, double intercept) {
    detail::require(n >= 1 && p >= 1 && nonzero >= 0 && nonzero <= p, "invalid sparse design");
    detail::require(noise_sd >= 0.0, "noise sd must be nonnegative");
    Rng rng(seed);
    const Eigen::MatrixXd X = normal_matrix(n, p, rng);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    for (Eigen::Index j = 0; j < nonzero; ++j) {
        const double magnitude = 1.0 + 2.0 * rng.uniform();
        beta(j) = rng.uniform() < 0.5 ? -magnitude : magnitude;
    }
    Eigen::VectorXd y = (X * beta).array() + intercept;
    y += noise(n, noise_sd, rng);
    return {model::make_data(std::move(y), X), beta};
}

SimulatedProblem simulate_orthogonal_design(Eigen::Index n, const Eigen::VectorXd& beta, double sigma,
                                            std::uint64_t seed) {
    const Eigen::Index p = beta.size();
    detail::require(p >= 1 && n > p, "orthogonal design needs n > p");
    Rng rng(seed);
    Eigen::MatrixXd Z = normal_matrix(n, p, rng);
    Z = Z.rowwise() - Z.colwise().mean();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(Z);
    // centered columns span a subspace orthogonal to the ones vector
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
    Eigen::MatrixXd X = std::sqrt(static_cast<double>(n)) * Q;
    Eigen::VectorXd y = X * beta + noise(n, sigma, rng);
    return {model::make_data(std::move(y), std::move(X)), beta};
}

SimulatedProblem simulate_equicorrelated_design(Eigen::Index n, const Eigen::VectorXd& beta, double rho,
                                                double sigma, std::uint64_t seed) {
    const Eigen::Index p = beta.size();
    detail::require(p >= 1 && n >= 1, "design dimensions must be positive");
    detail::require(rho >= 0.0 && rho < 1.0, "correlation must lie in [0, 1)");
    Rng rng(seed);
    const Eigen::VectorXd common = noise(n, 1.0, rng);
    Eigen::MatrixXd X = std::sqrt(1.0 - rho) * normal_matrix(n, p, rng);
    X.colwise() += std::sqrt(rho) * common;
    Eigen::VectorXd y = X * beta + noise(n, sigma, rng);
    return {model::make_data(std::move(y), std::move(X)), beta};
}

}  // namespace bridge::harness
