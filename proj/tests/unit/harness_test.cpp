#include "bridge/errors.hpp"
#include "bridge/harness/baselines.hpp"
#include "bridge/harness/chain.hpp"
#include "bridge/harness/diagnostics.hpp"
#include "bridge/harness/experiments.hpp"
#include "bridge/harness/io.hpp"
#include "bridge/harness/parallel.hpp"
#include "bridge/harness/report.hpp"
#include "bridge/harness/simulate.hpp"
#include "bridge/triangle_gibbs.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace {

using namespace bridge::harness;
using bridge::Rng;
namespace fs = std::filesystem;
namespace oracle = bridge::testing;

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("bridge_harness_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    std::string write(const std::string& name, const std::string& content) const {
        std::ofstream(file(name)) << content;
        return file(name);
    }

private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

ChainConfig quick_config(Method method) {
    ChainConfig config;
    config.method = method;
    config.iterations = 600;
    config.burn_in = 100;
    config.seed = 42;
    return config;
}

// ---- io ----

TEST(Csv, ToyFileRoundTrips) {
    TempDir dir;
    const auto path = dir.write("toy.csv", "y,x1\n1.5,-2\n0.25,3e-3\n-7,1e10\n");
    const auto table = read_table(path);
    ASSERT_EQ(table.header, (std::vector<std::string>{"y", "x1"}));
    Eigen::MatrixXd expected(3, 2);
    expected << 1.5, -2, 0.25, 3e-3, -7, 1e10;
    EXPECT_EQ(table.values, expected);

    CsvOptions options;
    options.standardize = false;
    const auto loaded = load_csv(path, options);
    EXPECT_EQ(loaded.data.X, expected.col(1));
    EXPECT_EQ(loaded.data.y, expected.col(0));
    EXPECT_EQ(loaded.predictor_names, std::vector<std::string>{"x1"});
}

TEST(Csv, DistinctErrors) {
    TempDir dir;
    auto kind_of = [](const std::string& path) {
        try {
            load_csv(path);
        } catch (const CsvError& e) {
            return e.kind();
        }
        ADD_FAILURE() << "no CsvError for " << path;
        return CsvError::Kind::kUnreadable;
    };
    EXPECT_EQ(kind_of(dir.write("ragged.csv", "y,a,b\n1,2,3\n4,5\n")), CsvError::Kind::kRaggedRow);
    EXPECT_EQ(kind_of(dir.write("text.csv", "y,a\n1,2\n3,four\n")), CsvError::Kind::kNonNumeric);
    EXPECT_EQ(kind_of(dir.write("noy.csv", "a,b\n1,2\n3,4\n")), CsvError::Kind::kMissingResponse);
    EXPECT_EQ(kind_of(dir.write("empty.csv", "y,a\n")), CsvError::Kind::kEmpty);
    EXPECT_EQ(kind_of(dir.file("missing.csv")), CsvError::Kind::kUnreadable);
}

TEST(Csv, ConstantColumnRejected) {
    TempDir dir;
    const auto path = dir.write("const.csv", "y,a,b\n1,2,5\n3,4,5\n2,1,5\n");
    EXPECT_THROW(load_csv(path), bridge::InputError);
}

TEST(Csv, DiabetesShapedFixture) {
    const auto loaded = load_csv(std::string(BRIDGE_FIXTURE_DIR) + "/diabetes_shaped.csv");
    EXPECT_EQ(loaded.data.n(), 442);
    EXPECT_EQ(loaded.data.p(), 10);
    EXPECT_EQ(loaded.response_name, "y");
}

TEST(Csv, AlternativeResponseColumn) {
    TempDir dir;
    const auto path = dir.write("alt.csv", "a,target\n1,2\n2,5\n4,1\n");
    CsvOptions options;
    options.response = "target";
    const auto loaded = load_csv(path, options);
    EXPECT_EQ(loaded.predictor_names, std::vector<std::string>{"a"});
    EXPECT_NEAR(loaded.data.raw_y()(1), 5.0, 1e-12);
}

TEST(FormatDouble, ShortestRoundTrip) {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double x = rng.normal() * std::exp(20.0 * rng.normal());
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2.0), "2");
}

// ---- chain ----

TEST(ChainConfig, Validation) {
    ChainConfig config;
    EXPECT_NO_THROW(config.validate());
    config.burn_in = config.iterations;
    EXPECT_THROW(config.validate(), bridge::InputError);
    config = ChainConfig{};
    config.thin = 0;
    EXPECT_THROW(config.validate(), bridge::InputError);
    config = ChainConfig{};
    config.fixed_alpha = 1.5;
    EXPECT_THROW(config.validate(), bridge::InputError);
    EXPECT_THROW(parse_method("gibbs"), bridge::InputError);
    EXPECT_EQ(parse_method("stable"), Method::kStable);
}

TEST(Chain, RecordCountFollowsThinning) {
    auto problem = simulate_sparse_design(40, 4, 2, 1.0, 3);
    auto data = bridge::model::standardize(problem.data.y, problem.data.X);
    auto config = quick_config(Method::kTriangle);
    config.thin = 7;
    const auto store = run_chain(data, config);
    EXPECT_EQ(store.size(), (600 - 100) / 7);
    EXPECT_EQ(static_cast<Eigen::Index>(store.iteration.size()), store.size());
    EXPECT_EQ(store.iteration.front(), 107);
}

TEST(Chain, SameSeedGivesIdenticalFiles) {
    auto problem = simulate_sparse_design(50, 5, 2, 1.0, 4);
    auto data = bridge::model::standardize(problem.data.y, problem.data.X);
    TempDir dir;
    for (Method method : {Method::kTriangle, Method::kStable}) {
        auto config = quick_config(method);
        config.fixed_alpha.reset();
        write_draws_csv(dir.file("a.csv"), run_chain(data, config));
        write_draws_csv(dir.file("b.csv"), run_chain(data, config));
        EXPECT_EQ(slurp(dir.file("a.csv")), slurp(dir.file("b.csv")));
        config.seed += 1;
        write_draws_csv(dir.file("c.csv"), run_chain(data, config));
        EXPECT_NE(slurp(dir.file("a.csv")), slurp(dir.file("c.csv")));
    }
}

TEST(Chain, ParallelChainsMatchSerialRuns) {
    auto problem = simulate_sparse_design(50, 5, 2, 1.0, 5);
    auto data = bridge::model::standardize(problem.data.y, problem.data.X);
    auto config = quick_config(Method::kTriangle);
    config.chains = 3;
    const auto stores = run_chains(data, config);
    ASSERT_EQ(stores.size(), 3u);
    for (int c = 0; c < 3; ++c) {
        const auto serial = run_chain(data, config, c);
        EXPECT_EQ(stores[static_cast<std::size_t>(c)].beta, serial.beta);
    }
    EXPECT_NE(stores[0].beta, stores[1].beta);
}

TEST(Chain, DrawsFilesReadBack) {
    auto problem = simulate_sparse_design(50, 3, 2, 1.0, 6);
    auto data = bridge::model::standardize(problem.data.y, problem.data.X);
    TempDir dir;
    for (Method method : {Method::kTriangle, Method::kStable}) {
        const auto store = run_chain(data, quick_config(method));
        write_draws_csv(dir.file("d.csv"), store);
        write_conditionals_csv(dir.file("c.csv"), store);
        write_metadata_json(dir.file("m.json"), store);
        const auto back = read_draws_csv(dir.file("d.csv"), dir.file("c.csv"));
        EXPECT_EQ(back.beta, store.beta);
        EXPECT_EQ(back.tau, store.tau);
        EXPECT_EQ(back.nu, store.nu);
        EXPECT_EQ(back.sigma2, store.sigma2);
        EXPECT_EQ(back.alpha, store.alpha);
        EXPECT_EQ(back.labels, store.labels);
        EXPECT_EQ(back.cond_mean, store.cond_mean);
        EXPECT_EQ(back.cond_sd, store.cond_sd);
        EXPECT_EQ(back.cond_bound, store.cond_bound);
        EXPECT_EQ(back.iteration, store.iteration);
        EXPECT_EQ(back.has_labels(), method == Method::kTriangle);
        EXPECT_NE(slurp(dir.file("m.json")).find(to_string(method)), std::string::npos);
    }
}

TEST(Chain, AutoSelection) {
    Eigen::VectorXd beta(3);
    beta << 1.0, 0.0, -1.0;
    auto orthogonal = simulate_orthogonal_design(30, beta, 1.0, 7);
    ChainConfig config;
    EXPECT_NEAR(collinearity_score(orthogonal.data.X), 1.0, 1e-10);
    EXPECT_EQ(resolve_method(orthogonal.data, config), Method::kTriangle);

    Eigen::MatrixXd X(30, 3);
    X.leftCols(2) = orthogonal.data.X.leftCols(2);
    Rng rng(8);
    for (Eigen::Index i = 0; i < 30; ++i) X(i, 2) = X(i, 0) + 1e-6 * rng.normal();
    auto collinear = bridge::model::make_data(orthogonal.data.y, X);
    EXPECT_GT(collinearity_score(X), kCollinearityThreshold);
    EXPECT_EQ(resolve_method(collinear, config), Method::kStable);
    const auto store = run_chain(collinear, quick_config(Method::kAuto));
    EXPECT_EQ(store.meta.method, Method::kStable);
    EXPECT_FALSE(store.has_labels());
}

TEST(Chain, TrianglePreconditionFailsBeforeSweeping) {
    Eigen::MatrixXd X(4, 6);
    Rng rng(9);
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 6; ++j) X(i, j) = rng.normal();
    auto data = bridge::model::make_data(Eigen::VectorXd::Ones(4), X);
    EXPECT_THROW(run_chain(data, quick_config(Method::kTriangle)), bridge::InputError);
    EXPECT_EQ(resolve_method(data, ChainConfig{}), Method::kStable);
}

TEST(Chain, OneDimensionalPosteriorMeanMatchesImportanceSampling) {
    // sigma^2 and nu sampled: integrating both out leaves
    // p(beta | y) proportional to RSS(beta)^(-n/2) (d + |beta|^alpha)^(-(c + 1/alpha)).
    Rng rng(10);
    const Eigen::Index n = 25;
    Eigen::MatrixXd X(n, 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = rng.normal();
        y(i) = 0.4 * X(i, 0) + rng.normal();
    }
    auto data = bridge::model::standardize(y, X);
    const double alpha = 0.5, c = 2.0, d = 2.0;
    const double xtx = data.X.col(0).squaredNorm();
    const double xty = data.X.col(0).dot(data.y);
    const double yty = data.y.squaredNorm();
    auto log_target = [&](double b) {
        const double rss = yty - 2.0 * b * xty + b * b * xtx;
        return -0.5 * n * std::log(rss) - (c + 1.0 / alpha) * std::log(d + std::pow(std::fabs(b), alpha));
    };
    Rng is_rng(11);
    const auto is = oracle::importance_moments(log_target, xty / xtx, 1.0 / std::sqrt(xtx), 2000000, is_rng);

    for (Method method : {Method::kTriangle, Method::kStable}) {
        ChainConfig config;
        config.method = method;
        config.iterations = 60000;
        config.burn_in = 1000;
        config.fixed_alpha = alpha;
        const auto store = run_chain(data, config);
        const auto m = oracle::chain_moments(store.beta.col(0));
        EXPECT_NEAR(m.mean, is.mean, 3.0 * m.se) << to_string(method);
    }
}

// ---- baselines ----

TEST(Ols, OrthonormalDesign) {
    Eigen::VectorXd beta(3);
    beta << 1.0, -2.0, 0.5;
    auto problem = simulate_orthogonal_design(20, beta, 0.3, 12);
    Eigen::MatrixXd Q = problem.data.X / std::sqrt(20.0);
    auto data = bridge::model::make_data(problem.data.y, Q);
    EXPECT_LT((ols(data) - Q.transpose() * problem.data.y).norm(), 1e-10);
}

TEST(Ols, ResidualOrthogonalAndNormalEquations) {
    Rng rng(13);
    Eigen::MatrixXd X(30, 4);
    for (Eigen::Index i = 0; i < 30; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) X(i, j) = rng.normal();
    Eigen::VectorXd y(30);
    for (Eigen::Index i = 0; i < 30; ++i) y(i) = rng.normal();
    auto data = bridge::model::make_data(y, X);
    const Eigen::VectorXd b = ols(data);
    EXPECT_LT((X.transpose() * (y - X * b)).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::VectorXd normal = (X.transpose() * X).llt().solve(X.transpose() * y);
    EXPECT_LT((b - normal).norm(), 1e-10);
    Eigen::MatrixXd singular = X;
    singular.col(3) = singular.col(0);
    EXPECT_THROW(ols(bridge::model::make_data(y, singular)), bridge::InputError);
}

TEST(ClassicalBridge, AlphaOneMatchesLasso) {
    auto problem = simulate_sparse_design(60, 6, 3, 1.0, 14);
    auto data = bridge::model::standardize(problem.data.y, problem.data.X);
    for (double nu : {2.0, 10.0, 40.0}) {
        const auto fit = minimize_bridge(data, nu, 1.0, ols(data));
        const Eigen::VectorXd lasso = oracle::lasso_coordinate_descent(data.X, data.y, nu);
        EXPECT_LT((fit.beta - lasso).cwiseAbs().maxCoeff(), 1e-6) << nu;
    }
}

TEST(ClassicalBridge, ZeroNuIsLeastSquares) {
    auto problem = simulate_sparse_design(40, 5, 2, 1.0, 15);
    auto data = bridge::model::standardize(problem.data.y, problem.data.X);
    const auto fit = classical_bridge_em(data, 0.5, {0.0});
    EXPECT_LT((fit.beta - ols(data)).norm(), 1e-8);
    EXPECT_EQ(fit.nu_star, 0.0);
}

TEST(ClassicalBridge, ObjectiveDecreasesAcrossIterations) {
    Rng rng(16);
    for (int problem = 0; problem < 10; ++problem) {
        auto sim = simulate_sparse_design(40, 6, 3, 1.0, 100 + problem);
        auto data = bridge::model::standardize(sim.data.y, sim.data.X);
        const auto stats = bridge::model::SufficientStats::from_data(data);
        const double alpha = 0.3 + 0.6 * rng.uniform();
        const double nu = std::exp(2.0 * rng.normal());
        Eigen::VectorXd beta = ols(data);
        double previous = bridge::model::bridge_objective(data, beta, nu, alpha);
        for (int it = 0; it < 200; ++it) {
            beta = bridge_mm_step(stats, beta, nu, alpha);
            const double value = bridge::model::bridge_objective(data, beta, nu, alpha);
            ASSERT_LE(value, previous * (1.0 + 1e-12) + 1e-12) << problem << " " << it;
            previous = value;
        }
    }
}

TEST(ClassicalBridge, BeatsLeastSquaresObjective) {
    auto sim = simulate_sparse_design(50, 8, 3, 1.5, 17);
    auto data = bridge::model::standardize(sim.data.y, sim.data.X);
    const auto grid = default_nu_grid(data, 12);
    const auto fit = classical_bridge_em(data, 0.5, grid);
    ASSERT_EQ(fit.path.size(), grid.size());
    const Eigen::VectorXd ls = ols(data);
    for (const auto& entry : fit.path) {
        EXPECT_LE(entry.objective, bridge::model::bridge_objective(data, ls, entry.nu, 0.5) + 1e-9);
        EXPECT_TRUE(entry.converged);
        EXPECT_GT(entry.gcv, 0.0);
    }
    EXPECT_THROW(classical_bridge_em(data, 0.5, {}), bridge::InputError);
}

// ---- simulation ----

TEST(Simulate, FactorCovariance) {
    Eigen::MatrixXd B;
    const auto sim = simulate_factor_design(6, 100000, 2, 0.5, 18, &B);
    const Eigen::MatrixXd V = B * B.transpose() + Eigen::MatrixXd::Identity(6, 6);
    const Eigen::MatrixXd& X = sim.data.X;
    const Eigen::MatrixXd S = X.transpose() * X / static_cast<double>(X.rows());
    EXPECT_LT((S - V).norm() / V.norm(), 0.05);
}

TEST(Simulate, NoFactorsIsStandardNormal) {
    const auto sim = simulate_factor_design(4, 100000, 0, 0.5, 19);
    const Eigen::MatrixXd S = sim.data.X.transpose() * sim.data.X / 100000.0;
    EXPECT_LT((S - Eigen::MatrixXd::Identity(4, 4)).norm(), 0.05);
}

TEST(Simulate, PaperScaleIsCollinear) {
    int collinear = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const auto sim = simulate_factor_design(100, 101, 10, 0.5, 1000 + s);
        const Eigen::MatrixXd XtX = sim.data.X.transpose() * sim.data.X;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(XtX);
        if (eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff() > 1e3) ++collinear;
    }
    EXPECT_GE(collinear, 18);
}

TEST(Simulate, ExponentialPowerDraws) {
    Rng rng(20);
    std::vector<double> draws(50000);
    for (auto& d : draws) d = sample_exponential_power(0.6, 1.4, rng);
    EXPECT_GT(oracle::ks_test(draws, [](double x) { return oracle::exponential_power_cdf(x, 0.6, 1.4); }), 0.01);
}

// ---- diagnostics ----

TEST(Diagnostics, WhiteNoiseEss) {
    Rng rng(21);
    Eigen::VectorXd x(20000);
    for (auto& v : x) v = rng.normal();
    const double ratio = effective_sample_size(x) / 20000.0;
    EXPECT_GE(ratio, 0.8);
    EXPECT_LE(ratio, 1.2);
    EXPECT_DOUBLE_EQ(autocorrelation(x, 10)[0], 1.0);
}

TEST(Diagnostics, Ar1Ess) {
    Rng rng(22);
    const double rho = 0.5;
    Eigen::VectorXd x(100000);
    x(0) = rng.normal();
    for (Eigen::Index i = 1; i < x.size(); ++i) x(i) = rho * x(i - 1) + std::sqrt(1 - rho * rho) * rng.normal();
    const double ratio = effective_sample_size(x) / static_cast<double>(x.size());
    EXPECT_NEAR(ratio, 1.0 / 3.0, 0.2 / 3.0);
    EXPECT_NEAR(autocorrelation(x, 2)[1], rho, 0.02);
}

TEST(Diagnostics, ReportCoversEveryParameter) {
    auto sim = simulate_sparse_design(40, 3, 1, 1.0, 23);
    auto data = bridge::model::standardize(sim.data.y, sim.data.X);
    const auto report = diagnostics(run_chain(data, quick_config(Method::kStable)));
    ASSERT_EQ(report.diagnostics.size(), 7u);
    for (const auto& d : report.diagnostics) {
        EXPECT_EQ(d.acf.size(), 101u);
        EXPECT_DOUBLE_EQ(d.acf[0], 1.0);
    }
}

TEST(Summarize, NoDataDensitiesAreSymmetricAndNormalized) {
    auto sim = simulate_sparse_design(30, 2, 1, 1.0, 24);
    auto data = bridge::model::standardize(sim.data.y, sim.data.X);
    for (Method method : {Method::kTriangle, Method::kStable}) {
        ChainConfig config;
        config.method = method;
        config.likelihood = false;
        config.fixed_alpha = 1.0;
        config.fixed_tau = 1.0;
        config.iterations = 20000;
        config.burn_in = 0;
        GridSpec grid;
        grid.automatic = false;
        grid.lower = -25.0;
        grid.upper = 25.0;
        const auto report = summarize(run_chain(data, config), grid);
        ASSERT_EQ(report.densities.size(), 2u);
        for (const auto& d : report.densities) {
            EXPECT_NEAR(d.integral(), 1.0, 0.02) << to_string(method);
            const std::size_t m = d.density.size();
            double asymmetry = 0.0;
            double peak = 0.0;
            for (std::size_t g = 0; g < m; ++g) {
                asymmetry = std::max(asymmetry, std::fabs(d.density[g] - d.density[m - 1 - g]));
                peak = std::max(peak, d.density[g]);
            }
            EXPECT_LT(asymmetry, 0.1 * peak) << to_string(method);
        }
    }
}

TEST(Summarize, GridMeanMatchesDrawMean) {
    auto sim = simulate_sparse_design(60, 3, 2, 1.0, 25);
    auto data = bridge::model::standardize(sim.data.y, sim.data.X);
    for (Method method : {Method::kTriangle, Method::kStable}) {
        auto config = quick_config(method);
        config.iterations = 20000;
        config.burn_in = 1000;
        const auto store = run_chain(data, config);
        const auto report = summarize(store);
        for (Eigen::Index j = 0; j < store.p(); ++j) {
            const auto& d = report.densities[static_cast<std::size_t>(j)];
            EXPECT_NEAR(d.integral(), 1.0, 0.02);
            const auto m = oracle::chain_moments(store.beta.col(j));
            EXPECT_NEAR(d.mean(), m.mean, 3.0 * m.se) << to_string(method) << " " << j;
            EXPECT_NEAR(report.coefficients[static_cast<std::size_t>(j)].mean, m.mean, 1e-12);
        }
    }
}

TEST(TruncatedNormalDensity, Integrates) {
    for (double bound : {0.3, 2.0, std::numeric_limits<double>::infinity()}) {
        double sum = 0.0;
        const double lo = std::isinf(bound) ? -20.0 : -bound;
        const double hi = -lo;
        const int m = 20000;
        for (int g = 0; g <= m; ++g) {
            const double x = lo + (hi - lo) * g / m;
            const double w = (g == 0 || g == m) ? 0.5 : 1.0;
            sum += w * truncated_normal_density(x, 0.7, 1.3, bound);
        }
        EXPECT_NEAR(sum * (hi - lo) / m, 1.0, 1e-4) << bound;
    }
    EXPECT_NEAR(truncated_normal_density(0.1, 0.0, std::numeric_limits<double>::infinity(), 2.0), 0.25, 1e-15);
    // box edge 40 sd below the mean: the mass underflows in linear space
    const double edge = truncated_normal_density(40.0, 80.0, 1.0, 40.01);
    EXPECT_TRUE(std::isfinite(edge));
    EXPECT_GT(edge, 1.0);
}

// ---- stratification ----

TEST(Stratified, StableStoreHasNoLabels) {
    auto sim = simulate_sparse_design(40, 2, 1, 1.0, 26);
    auto data = bridge::model::standardize(sim.data.y, sim.data.X);
    const auto store = run_chain(data, quick_config(Method::kStable));
    EXPECT_THROW(mode_stratified_draws(store, 0), bridge::InputError);
}

TEST(Stratified, CountsSumToDraws) {
    auto sim = simulate_sparse_design(40, 3, 1, 1.0, 27);
    auto data = bridge::model::standardize(sim.data.y, sim.data.X);
    const auto store = run_chain(data, quick_config(Method::kTriangle));
    for (Eigen::Index j = 0; j < 3; ++j) {
        const auto s = mode_stratified_draws(store, j);
        EXPECT_EQ(static_cast<Eigen::Index>(s.first.size() + s.second.size()), store.size());
    }
    EXPECT_THROW(mode_stratified_draws(store, 3), bridge::InputError);
}

TEST(Stratified, SecondLabelFrequencyMatchesWeights) {
    // At alpha = 1 the second component fires with probability 1 / (1 + a).
    Rng rng(28);
    Eigen::MatrixXd X(30, 2);
    for (Eigen::Index i = 0; i < 30; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) X(i, j) = rng.normal();
    Eigen::VectorXd y = X * Eigen::Vector2d(1.0, 0.0);
    for (Eigen::Index i = 0; i < 30; ++i) y(i) += rng.normal();
    const auto stats = bridge::model::SufficientStats::from_data(bridge::model::make_data(y, X));
    bridge::triangle::TruncatedGaussianDesign design(stats);
    const auto params = bridge::model::BridgeParams::from_tau(Eigen::VectorXd::Zero(2), 1.0, 0.5, 1.0);
    auto state = bridge::triangle::initialize(design, params, rng);
    const int sweeps = 100000;
    double expected = 0.0;
    int observed = 0;
    for (int s = 0; s < sweeps; ++s) {
        const double beta_before = state.beta(0);
        bridge::triangle::triangle_sweep(state, design, params, rng);
        const double a = std::fabs(beta_before / params.tau()) / (1.0 - state.u(0));
        expected += bridge::triangle::second_component_weight(a, 1.0);
        observed += state.labels(0) == 2;
    }
    const double p_hat = expected / sweeps;
    EXPECT_NEAR(static_cast<double>(observed) / sweeps, p_hat, 4.0 * std::sqrt(p_hat * (1 - p_hat) / sweeps));
}

TEST(Stratified, Separation) {
    StratifiedSeries s{{0.0, 0.1, -0.1}, {1.0, 1.1, 0.9}};
    EXPECT_NEAR(stratum_separation(s), 10.0, 1e-12);
    EXPECT_EQ(stratum_separation({{1.0}, {2.0, 3.0}}), 0.0);
}

// ---- reports and experiments ----

TEST(Report, JsonRoundTrip) {
    ExperimentReport report;
    report.kind = "prediction";
    report.tables["sse"] = {{"ols", "bayes"}, {{1.5, 0.25}, {3.0, 1e-300}}};
    report.coefficients.push_back({"beta_1", 0.1, 0.2, -0.3, 0.1, 0.5});
    report.densities.push_back({"beta_1", {-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}});
    report.diagnostics.push_back({"tau", {1.0, 0.5, 0.25}, 123.5});
    report.scalars["inf"] = std::numeric_limits<double>::infinity();
    report.scalars["x"] = 0.1;
    report.notes["method"] = "triangle";
    const auto text = report.to_json();
    const auto back = ExperimentReport::from_json(text);
    EXPECT_EQ(back.to_json(), text);
    EXPECT_EQ(back.tables.at("sse").rows[1][1], 1e-300);
    EXPECT_TRUE(std::isinf(back.scalars.at("inf")));
    EXPECT_EQ(back.scalars.at("x"), 0.1);
    EXPECT_THROW(ExperimentReport::from_json("{not json"), bridge::InputError);
}

TEST(Report, ValidateRejectsNegativeSse) {
    ExperimentReport report;
    report.tables["sse"] = {{"ols"}, {{-1.0}}};
    EXPECT_THROW(report.validate(), bridge::NumericalError);
}

TEST(Report, Medians) {
    SseTable table{{"a", "b"}, {{1.0, 4.0}, {3.0, 2.0}, {2.0, 6.0}}};
    EXPECT_EQ(table.medians(), (std::vector<double>{2.0, 4.0}));
    EXPECT_EQ(table.means(), (std::vector<double>{2.0, 4.0}));
}

TEST(Experiments, ZeroReplicatesRejected) {
    EXPECT_THROW(estimation_experiment(0.5, 0, {}, ChainConfig{}, 1), bridge::InputError);
}

TEST(Experiments, SingleMethodReportHasOneColumn) {
    auto sim = simulate_sparse_design(40, 4, 2, 1.0, 29);
    auto data = bridge::model::standardize(sim.data.y, sim.data.X);
    const auto report = prediction_experiment(data, 3, {FitMethod::kOls}, quick_config(Method::kTriangle));
    for (const auto& [name, table] : report.tables) {
        EXPECT_EQ(table.methods.size(), 1u) << name;
        EXPECT_EQ(table.rows.size(), 3u);
    }
}

TEST(Experiments, NoiselessDataPredictsAlmostExactly) {
    auto sim = simulate_sparse_design(60, 4, 4, 0.0, 30);
    auto config = quick_config(Method::kTriangle);
    config.iterations = 1500;
    config.burn_in = 500;
    const auto report = prediction_experiment(sim.data, 3, all_fit_methods(), config);
    const double scale = sim.data.y.squaredNorm();
    for (const auto& [name, table] : report.tables)
        for (const auto& row : table.rows)
            for (double sse : row) EXPECT_LT(sse, 1e-6 * scale) << name;
}

TEST(Experiments, TooFewTrainingRowsRejected) {
    auto sim = simulate_sparse_design(10, 9, 2, 1.0, 31);
    EXPECT_THROW(prediction_experiment(sim.data, 2, {FitMethod::kOls}, quick_config(Method::kStable)),
                 bridge::InputError);
}

TEST(Experiments, FitMethodNames) {
    for (FitMethod m : all_fit_methods()) EXPECT_EQ(parse_fit_method(to_string(m)), m);
    EXPECT_THROW(parse_fit_method("ridge"), bridge::InputError);
}

// ---- parallel ----

TEST(Parallel, EachIndexOnce) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(Parallel, PropagatesException) {
    EXPECT_THROW(parallel_for(50,
                              [](std::size_t i) {
                                  if (i == 17) throw bridge::NumericalError("boom");
                              }),
                 bridge::NumericalError);
}

TEST(Parallel, ThreadCap) {
    ::setenv("BRIDGE_THREADS", "2", 1);
    EXPECT_EQ(worker_count(100), 2u);
    EXPECT_EQ(worker_count(1), 1u);
    ::unsetenv("BRIDGE_THREADS");
    EXPECT_GE(worker_count(100), 1u);
}

}  // namespace
