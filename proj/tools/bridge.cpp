#include "bridge/errors.hpp"
#include "bridge/harness/chain.hpp"
#include "bridge/harness/diagnostics.hpp"
#include "bridge/harness/experiments.hpp"
#include "bridge/harness/io.hpp"
#include "bridge/harness/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using namespace bridge;
using namespace bridge::harness;

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

// Flags shared by every subcommand that runs chains.
struct ChainFlags {
    std::string method = "auto";
    std::string alpha = "0.5";
    int iters = 2000;
    int burnin = 500;
    int thin = 1;
    std::uint64_t seed = 1;
    int chains = 1;
    std::optional<double> tau;
    std::optional<double> sigma2;

    void attach(CLI::App& app) {
        app.add_option("--method", method, "triangle, stable or auto")
            ->check(CLI::IsMember({"triangle", "stable", "auto"}));
        app.add_option("--alpha", alpha, "fixed exponent in (0, 1], or 'sample'");
        app.add_option("--iters", iters, "sweeps per chain, burn-in included");
        app.add_option("--burnin", burnin, "discarded leading sweeps");
        app.add_option("--thin", thin, "keep every thin-th sweep after burn-in");
        app.add_option("--seed", seed, "base seed; chain i uses its own stream");
        app.add_option("--chains", chains, "independent chains");
        app.add_option("--tau", tau, "hold the prior scale fixed");
        app.add_option("--sigma2", sigma2, "hold the noise variance fixed");
    }

    ChainConfig config() const {
        ChainConfig c;
        c.method = parse_method(method);
        c.iterations = iters;
        c.burn_in = burnin;
        c.thin = thin;
        c.seed = seed;
        c.chains = chains;
        c.fixed_tau = tau;
        c.fixed_sigma2 = sigma2;
        if (alpha == "sample") {
            c.fixed_alpha = std::nullopt;
        } else {
            std::size_t used = 0;
            double value = 0.0;
            try {
                value = std::stod(alpha, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != alpha.size()) throw InputError("--alpha expects a number or 'sample', got '" + alpha + "'");
            c.fixed_alpha = value;
        }
        c.validate();
        return c;
    }
};

fs::path prepare_out(const std::string& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw InputError("cannot create output directory '" + out + "': " + ec.message());
    return fs::path(out);
}

LoadedData load(const std::string& path, const std::string& response) {
    CsvOptions options;
    options.response = response;
    return load_csv(path, options);
}

void run_command(const std::string& data_path, const std::string& response, const ChainFlags& flags,
                 const std::string& out) {
    const auto config = flags.config();
    const auto loaded = load(data_path, response);
    const auto dir = prepare_out(out);
    auto stores = run_chains(loaded.data, config);
    for (auto& store : stores) {
        store.names = loaded.predictor_names;
        const auto stem = "chain" + std::to_string(store.meta.chain_index);
        write_draws_csv((dir / (stem + "_draws.csv")).string(), store);
        write_conditionals_csv((dir / (stem + "_conditionals.csv")).string(), store);
        write_metadata_json((dir / (stem + "_meta.json")).string(), store);
        std::printf("%s: %s, %ld draws, %.2fs\n", stem.c_str(), to_string(store.meta.method).c_str(),
                    static_cast<long>(store.size()), store.meta.wall_seconds);
    }
    summarize(stores.front()).write((dir / "summary.json").string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian bridge regression: posterior simulation and experiments"};
    app.require_subcommand(1);

    std::string data_path;
    std::string response = "y";
    std::string out = ".";
    ChainFlags flags;

    auto* run = app.add_subcommand("run", "run chains on a CSV data set");
    run->add_option("--data", data_path, "headered numeric CSV")->required();
    run->add_option("--response", response, "response column name");
    run->add_option("--out", out, "output directory");
    flags.attach(*run);

    int splits = 20;
    double test_fraction = 0.2;
    auto* predict = app.add_subcommand("predict-exp", "out-of-sample prediction over random splits");
    predict->add_option("--data", data_path, "headered numeric CSV")->required();
    predict->add_option("--response", response, "response column name");
    predict->add_option("--splits", splits, "number of train/test splits");
    predict->add_option("--test-fraction", test_fraction, "held-out share of rows");
    predict->add_option("--out", out, "output directory");
    flags.attach(*predict);

    double alpha_true = 0.5;
    int replicates = 20;
    EstimationScale scale;
    std::uint64_t data_seed = 100;
    auto* estimate = app.add_subcommand("estimate-exp", "coefficient estimation on simulated factor designs");
    estimate->add_option("--alpha-true", alpha_true, "exponent of the generating prior");
    estimate->add_option("--replicates", replicates, "simulated data sets");
    estimate->add_option("--p", scale.p, "predictors");
    estimate->add_option("--n", scale.n, "observations");
    estimate->add_option("--factors", scale.k_factors, "latent factors in the design");
    estimate->add_option("--data-seed", data_seed, "seed of the first simulated data set");
    estimate->add_option("--out", out, "output directory");
    flags.attach(*estimate);

    std::string draws_path;
    std::string conditionals_path;
    auto* diagnose = app.add_subcommand("diagnose", "autocorrelation and effective sample size of a draws file");
    diagnose->add_option("--draws", draws_path, "draws CSV written by run")->required();
    diagnose->add_option("--out", out, "output directory");

    GridSpec grid;
    std::vector<double> range;
    auto* summary = app.add_subcommand("summarize", "posterior summaries and marginal densities");
    summary->add_option("--draws", draws_path, "draws CSV written by run")->required();
    summary->add_option("--conditionals", conditionals_path, "matching conditionals CSV");
    summary->add_option("--grid", range, "lower and upper end of the density grid")->expected(2);
    summary->add_option("--points", grid.points, "grid points");
    summary->add_option("--out", out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*run) {
            run_command(data_path, response, flags, out);
        } else if (*predict) {
            const auto loaded = load(data_path, response);
            PredictionOptions options;
            options.test_fraction = test_fraction;
            const auto config = flags.config();
            if (config.fixed_alpha) options.alpha = *config.fixed_alpha;
            const auto dir = prepare_out(out);
            prediction_experiment(loaded.data, splits, all_fit_methods(), config, options)
                .write((dir / "prediction.json").string());
        } else if (*estimate) {
            const auto config = flags.config();
            const auto dir = prepare_out(out);
            estimation_experiment(alpha_true, replicates, scale, config, data_seed)
                .write((dir / "estimation.json").string());
        } else if (*diagnose) {
            const auto store = read_draws_csv(draws_path);
            const auto dir = prepare_out(out);
            diagnostics(store).write((dir / "diagnostics.json").string());
        } else if (*summary) {
            const auto store = read_draws_csv(draws_path, conditionals_path);
            if (!range.empty()) {
                grid.lower = range[0];
                grid.upper = range[1];
                grid.automatic = false;
            }
            const auto dir = prepare_out(out);
            summarize(store, grid).write((dir / "summary.json").string());
        }
    } catch (const InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInput;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
    return 0;
}
