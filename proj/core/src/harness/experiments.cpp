#include "bridge/harness/experiments.hpp"

#include "bridge/errors.hpp"
#include "bridge/harness/baselines.hpp"
#include "bridge/harness/parallel.hpp"
#include "bridge/harness/simulate.hpp"
#include "bridge/rng.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace bridge::harness {

std::string to_string(FitMethod method) {
    switch (method) {
        case FitMethod::kOls: return "ols";
        case FitMethod::kClassical: return "classical";
        case FitMethod::kBayesFixedAlpha: return "bayes_fixed_alpha";
        case FitMethod::kBayesSampledAlpha: return "bayes_sampled_alpha";
    }
    return "ols";
}

FitMethod parse_fit_method(const std::string& name) {
    for (FitMethod m : all_fit_methods())
        if (to_string(m) == name) return m;
    throw InputError("unknown method '" + name +
                     "' (expected ols, classical, bayes_fixed_alpha or bayes_sampled_alpha)");
}

std::vector<FitMethod> all_fit_methods() {
    return {FitMethod::kOls, FitMethod::kClassical, FitMethod::kBayesFixedAlpha,
            FitMethod::kBayesSampledAlpha};
}

namespace {

/// Chains inside an experiment run serially; replicates carry the parallelism.
ChainConfig single_chain(ChainConfig config, std::uint64_t seed) {
    config.chains = 1;
    config.seed = seed;
    return config;
}

Eigen::VectorXd fit(FitMethod method, const model::RegressionData& train, const ChainConfig& config,
                    double alpha, const std::vector<double>& nu_grid, std::uint64_t seed) {
    switch (method) {
        case FitMethod::kOls: return ols(train);
        case FitMethod::kClassical: {
            ClassicalBridgeOptions opts;
            opts.seed = seed;
            return classical_bridge_em(train, alpha, nu_grid.empty() ? default_nu_grid(train) : nu_grid, opts)
                .beta;
        }
        case FitMethod::kBayesFixedAlpha: {
            ChainConfig c = single_chain(config, seed);
            c.fixed_alpha = alpha;
            return run_chain(train, c).posterior_mean();
        }
        case FitMethod::kBayesSampledAlpha: {
            ChainConfig c = single_chain(config, seed);
            c.fixed_alpha.reset();
            if (!c.hyper.alpha_prior) c.hyper.alpha_prior = model::BetaShapes{1.0, 1.0};
            return run_chain(train, c).posterior_mean();
        }
    }
    throw InputError("unknown fit method");
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
    return out;
}

Eigen::VectorXd rows_of(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& idx) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(idx[i]);
    return out;
}

}  // namespace

ExperimentReport prediction_experiment(const model::RegressionData& data, int n_splits,
                                       const std::vector<FitMethod>& methods,
                                       const ChainConfig& config, const PredictionOptions& options) {
    detail::require(n_splits >= 1, "need at least one split");
    detail::require(!methods.empty(), "need at least one method");
    detail::require(options.test_fraction > 0.0 && options.test_fraction < 1.0,
                    "test fraction must lie in (0, 1)");
    config.validate();
    const Eigen::VectorXd y_raw = data.raw_y();
    const Eigen::MatrixXd X_raw = data.raw_X();
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    const auto n_test = std::max<Eigen::Index>(
        1, static_cast<Eigen::Index>(std::llround(options.test_fraction * static_cast<double>(n))));
    const Eigen::Index n_train = n - n_test;
    const bool needs_rank =
        config.method == Method::kTriangle ||
        std::find(methods.begin(), methods.end(), FitMethod::kOls) != methods.end();
    if (needs_rank && n_train <= p) {
        std::ostringstream msg;
        msg << "training sets of " << n_train << " rows cannot identify " << p << " coefficients";
        throw InputError(msg.str());
    }

    std::vector<std::vector<double>> raw(static_cast<std::size_t>(n_splits));
    std::vector<std::vector<double>> centered(static_cast<std::size_t>(n_splits));
    parallel_for(static_cast<std::size_t>(n_splits), [&](std::size_t split) {
        const std::uint64_t seed = Rng::stream_seed(config.seed, split);
        Rng rng(seed);
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        for (std::size_t i = order.size() - 1; i > 0; --i) {
            const auto k = static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1));
            std::swap(order[i], order[std::min(k, i)]);
        }
        const std::vector<Eigen::Index> train_idx(order.begin(), order.begin() + n_train);
        const std::vector<Eigen::Index> test_idx(order.begin() + n_train, order.end());
        const model::RegressionData train = model::standardize(rows_of(y_raw, train_idx), rows_of(X_raw, train_idx));
        const Eigen::VectorXd y_test = rows_of(y_raw, test_idx);
        const Eigen::MatrixXd X_test = rows_of(X_raw, test_idx);
        Eigen::VectorXd y_c = y_test.array() - y_test.mean();
        Eigen::MatrixXd X_c = X_test.rowwise() - X_test.colwise().mean();
        X_c = X_c.array().rowwise() / train.transforms.x_scale.transpose().array();

        for (FitMethod m : methods) {
            const Eigen::VectorXd beta = fit(m, train, config, options.alpha, options.nu_grid, seed);
            raw[split].push_back((y_test - train.predict_raw(X_test, beta)).squaredNorm());
            centered[split].push_back((y_c - X_c * beta).squaredNorm());
        }
    });

    ExperimentReport report;
    report.kind = "prediction";
    std::vector<std::string> names;
    for (FitMethod m : methods) names.push_back(to_string(m));
    report.tables["sse_raw"] = {names, raw};
    report.tables["sse_centered"] = {names, centered};
    report.scalars["splits"] = n_splits;
    report.scalars["n_train"] = static_cast<double>(n_train);
    report.scalars["n_test"] = static_cast<double>(n_test);
    report.validate();
    return report;
}

ExperimentReport estimation_experiment(double alpha_true, int replicates, const EstimationScale& scale,
                                       const ChainConfig& config, std::uint64_t seed) {
    detail::require(replicates >= 1, "estimation experiment needs at least one replicate");
    model::check_alpha(alpha_true);
    config.validate();
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(replicates));
    parallel_for(rows.size(), [&](std::size_t r) {
        const std::uint64_t rep_seed = Rng::stream_seed(seed, r);
        const SimulatedProblem sim =
            simulate_factor_design(scale.p, scale.n, scale.k_factors, alpha_true, rep_seed);
        const Eigen::VectorXd b_ols = ols(sim.data);
        const Eigen::VectorXd b_classical =
            fit(FitMethod::kClassical, sim.data, config, alpha_true, {}, rep_seed);
        const Eigen::VectorXd b_bayes = run_chain(sim.data, single_chain(config, rep_seed)).posterior_mean();
        rows[r] = {(b_ols - sim.beta_true).squaredNorm(), (b_classical - sim.beta_true).squaredNorm(),
                   (b_bayes - sim.beta_true).squaredNorm()};
    });
    ExperimentReport report;
    report.kind = "estimation";
    report.tables["sse"] = {{"ols", "classical", "bayes"}, rows};
    report.scalars["alpha_true"] = alpha_true;
    report.scalars["p"] = static_cast<double>(scale.p);
    report.scalars["n"] = static_cast<double>(scale.n);
    report.scalars["k_factors"] = static_cast<double>(scale.k_factors);
    report.scalars["replicates"] = replicates;
    report.validate();
    return report;
}

}  // namespace bridge::harness
