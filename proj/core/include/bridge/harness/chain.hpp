#pragma once

#include "bridge/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bridge::harness {

enum class Method { kTriangle, kStable, kAuto };

std::string to_string(Method method);
Method parse_method(const std::string& name);

/// Settings for one or more MCMC chains.
///
/// Invariants: burn_in < iterations, thin >= 1, chains >= 1, a fixed alpha
/// in (alpha_floor, 1]. `iterations` counts every sweep, burn-in included.
struct ChainConfig {
    Method method = Method::kAuto;
    int iterations = 2000;
    int burn_in = 500;
    int thin = 1;
    std::uint64_t seed = 1;
    std::optional<double> fixed_alpha = 0.5;  ///< nullopt samples alpha
    double initial_alpha = 0.5;               ///< start value when alpha is sampled
    model::HyperPrior hyper;                  ///< alpha_prior defaults to Beta(1, 1)
    int chains = 1;
    std::optional<double> fixed_tau;     ///< holds tau (and skips the nu step)
    std::optional<double> fixed_sigma2;  ///< skips the sigma^2 step
    bool likelihood = true;              ///< false drops the data term
    double alpha_step_sd = 0.05;
    double alpha_floor = 0.01;

    void validate() const;
    /// Retained records: floor((iterations - burn_in) / thin).
    int retained() const { return (iterations - burn_in) / thin; }
};

/// Ratio of extreme singular values of the column-standardized design.
/// Infinite for p > n or a constant column.
double collinearity_score(const Eigen::MatrixXd& X);

inline constexpr double kCollinearityThreshold = 100.0;

/// Resolves kAuto: stable when the collinearity score exceeds the threshold
/// (or there is no data term to decide from and p > n), otherwise triangle.
Method resolve_method(const model::RegressionData& data, const ChainConfig& config);

struct DrawsMetadata {
    Method method = Method::kTriangle;
    std::uint64_t seed = 0;
    int chain_index = 0;
    double wall_seconds = 0.0;
    double collinearity = 0.0;
    double alpha_acceptance = 0.0;  ///< post-burn-in acceptance rate of alpha moves
    double alpha_step_sd = 0.0;     ///< frozen proposal scale
    double stable_proposals_per_draw = 0.0;
};

/// Retained sweeps of one chain, stored column-wise (one row per record).
///
/// Triangle stores carry omega component labels; stable stores leave
/// `labels` empty. cond_* hold each coefficient's full conditional at its
/// last update: N(mean, sd^2) truncated to [-bound, bound]; sd is infinite
/// for a flat conditional and bound infinite when untruncated.
struct DrawsStore {
    DrawsMetadata meta;
    ChainConfig config;
    std::vector<std::string> names;
    std::vector<long> iteration;
    Eigen::MatrixXd beta;
    Eigen::VectorXd tau;
    Eigen::VectorXd nu;
    Eigen::VectorXd sigma2;
    Eigen::VectorXd alpha;
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> labels;
    Eigen::MatrixXd cond_mean;
    Eigen::MatrixXd cond_sd;
    Eigen::MatrixXd cond_bound;

    Eigen::Index size() const { return beta.rows(); }
    Eigen::Index p() const { return beta.cols(); }
    bool has_labels() const { return labels.size() > 0; }
    bool has_conditionals() const { return cond_mean.size() > 0; }
    Eigen::VectorXd posterior_mean() const;
};

/// Runs one chain. Seeds its stream with Rng::stream_seed(config.seed, chain_index).
/// Kernel preconditions are checked before the first sweep.
DrawsStore run_chain(const model::RegressionData& data, const ChainConfig& config,
                     int chain_index = 0);

/// config.chains independent chains, run concurrently.
std::vector<DrawsStore> run_chains(const model::RegressionData& data, const ChainConfig& config);

/// Draws file: iteration, one column per coefficient, tau, nu, sigma2, alpha,
/// then label_<name> columns for triangle stores.
void write_draws_csv(const std::string& path, const DrawsStore& store);
/// Conditionals file: iteration, then mean_/sd_/bound_ per coefficient.
void write_conditionals_csv(const std::string& path, const DrawsStore& store);
/// Chain metadata and config as JSON.
void write_metadata_json(const std::string& path, const DrawsStore& store);

/// Reads a draws file (and optionally its conditionals file) back.
DrawsStore read_draws_csv(const std::string& draws_path,
                          const std::string& conditionals_path = {});

}  // namespace bridge::harness
