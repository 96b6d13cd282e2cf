#include "bridge/harness/chain.hpp"

#include "bridge/errors.hpp"
#include "bridge/harness/io.hpp"
#include "bridge/harness/parallel.hpp"
#include "bridge/hyper.hpp"
#include "bridge/rng.hpp"
#include "bridge/stable_gibbs.hpp"
#include "bridge/triangle_gibbs.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <memory>

namespace bridge::harness {

std::string to_string(Method method) {
    switch (method) {
        case Method::kTriangle: return "triangle";
        case Method::kStable: return "stable";
        case Method::kAuto: return "auto";
    }
    return "auto";
}

Method parse_method(const std::string& name) {
    if (name == "triangle") return Method::kTriangle;
    if (name == "stable") return Method::kStable;
    if (name == "auto") return Method::kAuto;
    throw InputError("unknown method '" + name + "' (expected triangle, stable or auto)");
}

void ChainConfig::validate() const {
    detail::require(iterations >= 1, "iterations must be positive");
    detail::require(burn_in >= 0 && burn_in < iterations, "burn-in must be below iterations");
    detail::require(thin >= 1, "thin must be at least 1");
    detail::require(chains >= 1, "chains must be at least 1");
    detail::require(alpha_floor > 0.0 && alpha_floor < 1.0, "alpha floor must lie in (0, 1)");
    if (fixed_alpha) {
        detail::require(*fixed_alpha > alpha_floor && *fixed_alpha <= 1.0,
                        "fixed alpha must lie in (alpha_floor, 1]");
    } else {
        detail::require(initial_alpha > alpha_floor && initial_alpha <= 1.0,
                        "initial alpha must lie in (alpha_floor, 1]");
        detail::require(alpha_step_sd > 0.0, "alpha step must be positive");
    }
    if (fixed_tau) detail::require(*fixed_tau > 0.0 && std::isfinite(*fixed_tau), "tau must be positive");
    if (fixed_sigma2)
        detail::require(*fixed_sigma2 > 0.0 && std::isfinite(*fixed_sigma2), "sigma^2 must be positive");
    hyper.validate();
}

double collinearity_score(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (p > n || n < 2) return std::numeric_limits<double>::infinity();
    Eigen::MatrixXd Z = X.rowwise() - X.colwise().mean();
    for (Eigen::Index j = 0; j < p; ++j) {
        const double norm = Z.col(j).norm();
        if (!(norm > 0.0)) return std::numeric_limits<double>::infinity();
        Z.col(j) /= norm;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Z);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

Method resolve_method(const model::RegressionData& data, const ChainConfig& config) {
    if (config.method != Method::kAuto) return config.method;
    if (!config.likelihood) return Method::kTriangle;
    return collinearity_score(data.X) > kCollinearityThreshold ? Method::kStable : Method::kTriangle;
}

Eigen::VectorXd DrawsStore::posterior_mean() const {
    detail::require(size() > 0, "draws store is empty");
    return beta.colwise().mean().transpose();
}

namespace {

/// Sweep kernel plus the state it owns.
class Kernel {
public:
    virtual ~Kernel() = default;
    virtual void sweep(const model::BridgeParams& params, Rng& rng) = 0;
    virtual const Eigen::VectorXd& beta() const = 0;
    virtual void record_conditionals(DrawsStore& store, Eigen::Index row) const = 0;
    virtual void record_labels(DrawsStore&, Eigen::Index) const {}
    virtual double stable_proposals() const { return 0.0; }
};

class TriangleKernel final : public Kernel {
public:
    TriangleKernel(const model::SufficientStats& stats, const model::BridgeParams& params, Rng& rng)
        : design_(stats), state_(triangle::initialize(design_, params, rng)) {}

    void sweep(const model::BridgeParams& params, Rng& rng) override {
        triangle::triangle_sweep(state_, design_, params, rng);
    }
    const Eigen::VectorXd& beta() const override { return state_.beta; }
    void record_conditionals(DrawsStore& store, Eigen::Index row) const override {
        store.cond_mean.row(row) = state_.conditionals.mean.transpose();
        store.cond_sd.row(row) = state_.conditionals.sd.transpose();
        store.cond_bound.row(row) = state_.conditionals.bound.transpose();
    }
    void record_labels(DrawsStore& store, Eigen::Index row) const override {
        store.labels.row(row) = state_.labels.transpose();
    }

private:
    triangle::TruncatedGaussianDesign design_;
    triangle::TriangleState state_;
};

class StableKernel final : public Kernel {
public:
    StableKernel(const model::SufficientStats& stats, const model::BridgeParams& params, Rng& rng)
        : stats_(stats), state_(stable::initialize(stats, params, rng)) {}

    void sweep(const model::BridgeParams& params, Rng& rng) override {
        stable::stable_sweep(state_, stats_, params, rng);
    }
    const Eigen::VectorXd& beta() const override { return state_.beta; }
    void record_conditionals(DrawsStore& store, Eigen::Index row) const override {
        store.cond_mean.row(row) = state_.cond_mean.transpose();
        store.cond_sd.row(row) = state_.cond_sd.transpose();
        store.cond_bound.row(row).setConstant(std::numeric_limits<double>::infinity());
    }
    double stable_proposals() const override { return state_.rejections.proposals_per_draw(); }

private:
    const model::SufficientStats& stats_;
    stable::StableState state_;
};

std::vector<std::string> default_names(Eigen::Index p) {
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < p; ++j) names.push_back("beta_" + std::to_string(j + 1));
    return names;
}

}  // namespace

DrawsStore run_chain(const model::RegressionData& data, const ChainConfig& config, int chain_index) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const Eigen::Index p = data.p();
    const Eigen::Index n = data.n();
    const model::SufficientStats stats = config.likelihood ? model::SufficientStats::from_data(data)
                                                           : model::SufficientStats::no_data(p);
    const Method method = resolve_method(data, config);
    Rng rng(Rng::stream_seed(config.seed, static_cast<std::uint64_t>(chain_index)));

    const double alpha0 = config.fixed_alpha.value_or(config.initial_alpha);
    const double sigma2_0 = config.fixed_sigma2.value_or(
        config.likelihood ? std::max(stats.yty / static_cast<double>(n), 1e-8) : 1.0);
    model::BridgeParams params =
        config.fixed_tau
            ? model::BridgeParams::from_tau(Eigen::VectorXd::Zero(p), alpha0, *config.fixed_tau, sigma2_0)
            : model::BridgeParams(Eigen::VectorXd::Zero(p), alpha0,
                                  config.hyper.nu_shape / config.hyper.nu_rate, sigma2_0);
    const model::BetaShapes alpha_prior = config.hyper.alpha_prior.value_or(model::BetaShapes{});
    const hyper::AlphaHold hold = config.fixed_tau ? hyper::AlphaHold::kTau : hyper::AlphaHold::kNu;

    std::unique_ptr<Kernel> kernel;
    if (method == Method::kTriangle) {
        kernel = std::make_unique<TriangleKernel>(stats, params, rng);
    } else {
        kernel = std::make_unique<StableKernel>(stats, params, rng);
    }

    DrawsStore store;
    store.config = config;
    store.names = default_names(p);
    const Eigen::Index records = config.retained();
    store.iteration.reserve(static_cast<std::size_t>(records));
    store.beta.resize(records, p);
    store.tau.resize(records);
    store.nu.resize(records);
    store.sigma2.resize(records);
    store.alpha.resize(records);
    store.cond_mean.resize(records, p);
    store.cond_sd.resize(records, p);
    store.cond_bound.resize(records, p);
    if (method == Method::kTriangle) store.labels.resize(records, p);

    hyper::AlphaStepTuner tuner(config.alpha_step_sd);
    long post_proposals = 0;
    long post_accepts = 0;
    Eigen::Index row = 0;
    for (int it = 1; it <= config.iterations; ++it) {
        kernel->sweep(params, rng);
        params.beta() = kernel->beta();
        if (config.likelihood && !config.fixed_sigma2) {
            // residuals directly: the cross-product form cancels near a perfect fit
            const double rss = (data.y - data.X * params.beta()).squaredNorm();
            params.set_sigma2(hyper::sample_sigma2(rss, n, rng));
        }
        if (!config.fixed_tau) {
            params.set_nu(hyper::sample_nu(params.beta(), params.alpha(), config.hyper, rng).nu);
        }
        if (!config.fixed_alpha) {
            const double scale = config.fixed_tau ? params.tau() : params.nu();
            const hyper::AlphaMove move =
                hyper::sample_alpha_rw(params.beta(), scale, hold, params.alpha(), alpha_prior,
                                       tuner.step_sd(), rng, config.alpha_floor);
            tuner.record(move.accepted);
            if (it > config.burn_in) {
                ++post_proposals;
                if (move.accepted) ++post_accepts;
            }
            if (hold == hyper::AlphaHold::kTau) {
                params.set_alpha_hold_tau(move.alpha);
            } else {
                params.set_alpha_hold_nu(move.alpha);
            }
            if (it == config.burn_in) tuner.freeze();
        }
        if (it > config.burn_in && (it - config.burn_in) % config.thin == 0 && row < records) {
            store.iteration.push_back(it);
            store.beta.row(row) = params.beta().transpose();
            store.tau(row) = params.tau();
            store.nu(row) = params.nu();
            store.sigma2(row) = params.sigma2();
            store.alpha(row) = params.alpha();
            kernel->record_conditionals(store, row);
            kernel->record_labels(store, row);
            ++row;
        }
    }

    store.meta.method = method;
    store.meta.seed = config.seed;
    store.meta.chain_index = chain_index;
    store.meta.collinearity = config.likelihood ? collinearity_score(data.X) : 0.0;
    store.meta.alpha_acceptance =
        post_proposals > 0 ? static_cast<double>(post_accepts) / post_proposals : 0.0;
    store.meta.alpha_step_sd = config.fixed_alpha ? 0.0 : tuner.step_sd();
    store.meta.stable_proposals_per_draw = kernel->stable_proposals();
    store.meta.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return store;
}

std::vector<DrawsStore> run_chains(const model::RegressionData& data, const ChainConfig& config) {
    config.validate();
    std::vector<DrawsStore> stores(static_cast<std::size_t>(config.chains));
    parallel_for(stores.size(), [&](std::size_t i) {
        stores[i] = run_chain(data, config, static_cast<int>(i));
    });
    return stores;
}

void write_draws_csv(const std::string& path, const DrawsStore& store) {
    std::vector<std::string> header{"iteration"};
    for (const auto& name : store.names) header.push_back(name);
    for (const char* h : {"tau", "nu", "sigma2", "alpha"}) header.emplace_back(h);
    if (store.has_labels())
        for (const auto& name : store.names) header.push_back("label_" + name);
    const Eigen::Index p = store.p();
    Eigen::MatrixXd table(store.size(), static_cast<Eigen::Index>(header.size()));
    for (Eigen::Index r = 0; r < store.size(); ++r) {
        table(r, 0) = static_cast<double>(store.iteration[static_cast<std::size_t>(r)]);
        table.block(r, 1, 1, p) = store.beta.row(r);
        table(r, p + 1) = store.tau(r);
        table(r, p + 2) = store.nu(r);
        table(r, p + 3) = store.sigma2(r);
        table(r, p + 4) = store.alpha(r);
        if (store.has_labels())
            table.block(r, p + 5, 1, p) = store.labels.row(r).cast<double>();
    }
    write_table(path, header, table);
}

void write_conditionals_csv(const std::string& path, const DrawsStore& store) {
    detail::require(store.has_conditionals(), "store has no recorded conditionals");
    std::vector<std::string> header{"iteration"};
    for (const char* kind : {"mean_", "sd_", "bound_"})
        for (const auto& name : store.names) header.push_back(kind + name);
    const Eigen::Index p = store.p();
    Eigen::MatrixXd table(store.size(), 1 + 3 * p);
    for (Eigen::Index r = 0; r < store.size(); ++r) {
        table(r, 0) = static_cast<double>(store.iteration[static_cast<std::size_t>(r)]);
        table.block(r, 1, 1, p) = store.cond_mean.row(r);
        table.block(r, 1 + p, 1, p) = store.cond_sd.row(r);
        table.block(r, 1 + 2 * p, 1, p) = store.cond_bound.row(r);
    }
    write_table(path, header, table);
}

void write_metadata_json(const std::string& path, const DrawsStore& store) {
    const ChainConfig& c = store.config;
    nlohmann::json j;
    j["method"] = to_string(store.meta.method);
    j["seed"] = store.meta.seed;
    j["chain_index"] = store.meta.chain_index;
    j["wall_seconds"] = store.meta.wall_seconds;
    j["collinearity"] = store.meta.collinearity;
    j["alpha_acceptance"] = store.meta.alpha_acceptance;
    j["alpha_step_sd"] = store.meta.alpha_step_sd;
    j["stable_proposals_per_draw"] = store.meta.stable_proposals_per_draw;
    j["records"] = store.size();
    auto& cfg = j["config"];
    cfg["method"] = to_string(c.method);
    cfg["iterations"] = c.iterations;
    cfg["burn_in"] = c.burn_in;
    cfg["thin"] = c.thin;
    cfg["chains"] = c.chains;
    cfg["alpha"] = c.fixed_alpha ? nlohmann::json(*c.fixed_alpha) : nlohmann::json("sample");
    cfg["tau"] = c.fixed_tau ? nlohmann::json(*c.fixed_tau) : nlohmann::json("sample");
    cfg["sigma2"] = c.fixed_sigma2 ? nlohmann::json(*c.fixed_sigma2) : nlohmann::json("sample");
    cfg["likelihood"] = c.likelihood;
    cfg["nu_prior"] = {{"shape", c.hyper.nu_shape}, {"rate", c.hyper.nu_rate}};
    const model::BetaShapes ap = c.hyper.alpha_prior.value_or(model::BetaShapes{});
    cfg["alpha_prior"] = {{"a", ap.a}, {"b", ap.b}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << j.dump(2) << '\n';
}

DrawsStore read_draws_csv(const std::string& draws_path, const std::string& conditionals_path) {
    const Table t = read_table(draws_path);
    std::map<std::string, Eigen::Index> col;
    for (std::size_t c = 0; c < t.header.size(); ++c) col[t.header[c]] = static_cast<Eigen::Index>(c);
    for (const char* h : {"iteration", "tau", "nu", "sigma2", "alpha"}) {
        if (!col.count(h)) throw InputError(draws_path + " lacks column '" + h + "'");
    }
    DrawsStore store;
    const Eigen::Index p = col["tau"] - 1;
    detail::require(p >= 1, draws_path + " has no coefficient columns");
    for (Eigen::Index j = 0; j < p; ++j) store.names.push_back(t.header[static_cast<std::size_t>(j + 1)]);
    const Eigen::Index rows = t.values.rows();
    for (Eigen::Index r = 0; r < rows; ++r)
        store.iteration.push_back(static_cast<long>(t.values(r, col["iteration"])));
    store.beta = t.values.block(0, 1, rows, p);
    store.tau = t.values.col(col["tau"]);
    store.nu = t.values.col(col["nu"]);
    store.sigma2 = t.values.col(col["sigma2"]);
    store.alpha = t.values.col(col["alpha"]);
    const bool labelled = col.count("label_" + store.names.front()) > 0;
    if (labelled) {
        store.labels.resize(rows, p);
        for (Eigen::Index j = 0; j < p; ++j) {
            const auto it = col.find("label_" + store.names[static_cast<std::size_t>(j)]);
            if (it == col.end()) throw InputError(draws_path + " has incomplete label columns");
            for (Eigen::Index r = 0; r < rows; ++r)
                store.labels(r, j) = static_cast<std::uint8_t>(t.values(r, it->second));
        }
    }
    store.meta.method = labelled ? Method::kTriangle : Method::kStable;
    store.config.method = store.meta.method;
    if (!conditionals_path.empty()) {
        const Table c = read_table(conditionals_path);
        detail::require(c.values.rows() == rows && c.values.cols() == 1 + 3 * p,
                        conditionals_path + " does not match " + draws_path);
        store.cond_mean = c.values.block(0, 1, rows, p);
        store.cond_sd = c.values.block(0, 1 + p, rows, p);
        store.cond_bound = c.values.block(0, 1 + 2 * p, rows, p);
    }
    return store;
}

}  // namespace bridge::harness
