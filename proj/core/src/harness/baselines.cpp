#include "bridge/harness/baselines.hpp"

#include "bridge/errors.hpp"
#include "bridge/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace bridge::harness {

Eigen::VectorXd ols(const model::RegressionData& data) {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.X);
    if (data.n() < data.p() || qr.rank() < data.p()) {
        std::ostringstream msg;
        msg << "least squares needs full column rank (n = " << data.n() << ", p = " << data.p()
            << ", rank = " << qr.rank() << ")";
        throw InputError(msg.str());
    }
    return qr.solve(data.y);
}

namespace {

std::vector<Eigen::Index> active_set(const Eigen::VectorXd& beta, double threshold) {
    std::vector<Eigen::Index> active;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
        if (std::abs(beta(j)) >= threshold) active.push_back(j);
    return active;
}

/// X'X and X'y restricted to `active`, with the MM weights on the diagonal.
Eigen::MatrixXd active_system(const model::SufficientStats& stats, const Eigen::VectorXd& beta,
                              const std::vector<Eigen::Index>& active, double nu, double alpha) {
    const auto k = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd A(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) A(a, b) = stats.XtX(active[a], active[b]);
        A(a, a) += nu * alpha * std::pow(std::abs(beta(active[a])), alpha - 2.0);
    }
    return A;
}

double objective(const model::SufficientStats& stats, const Eigen::VectorXd& beta, double nu,
                 double alpha) {
    double penalty = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) penalty += std::pow(std::abs(beta(j)), alpha);
    return 0.5 * stats.rss(beta) + nu * penalty;
}

Eigen::VectorXd least_squares_start(const model::SufficientStats& stats) {
    const Eigen::Index p = stats.p();
    // a vanishing ridge keeps the start defined when X'X is singular
    const double ridge = 1e-8 * std::max(1.0, stats.XtX.diagonal().maxCoeff());
    Eigen::MatrixXd A = stats.XtX;
    A.diagonal().array() += ridge;
    return A.ldlt().solve(stats.Xty).eval().head(p);
}

}  // namespace

Eigen::VectorXd bridge_mm_step(const model::SufficientStats& stats, const Eigen::VectorXd& beta,
                               double nu, double alpha, double zero_threshold) {
    const std::vector<Eigen::Index> active = active_set(beta, zero_threshold);
    Eigen::VectorXd next = Eigen::VectorXd::Zero(beta.size());
    if (active.empty()) return next;
    const Eigen::MatrixXd A = active_system(stats, beta, active, nu, alpha);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(active.size()));
    for (std::size_t a = 0; a < active.size(); ++a) rhs(static_cast<Eigen::Index>(a)) = stats.Xty(active[a]);
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
    const Eigen::VectorXd sol = ldlt.solve(rhs);
    for (std::size_t a = 0; a < active.size(); ++a) {
        const double v = sol(static_cast<Eigen::Index>(a));
        next(active[a]) = std::abs(v) < zero_threshold ? 0.0 : v;
    }
    return next;
}

BridgePath minimize_bridge(const model::RegressionData& data, double nu, double alpha,
                           const Eigen::VectorXd& start, const ClassicalBridgeOptions& options) {
    model::check_alpha(alpha);
    detail::require(nu >= 0.0 && std::isfinite(nu), "nu must be nonnegative");
    const model::SufficientStats stats = model::SufficientStats::from_data(data);
    BridgePath out{nu, start, 0.0, 0.0, 0.0, 0, false};
    if (nu == 0.0) {
        out.beta = ols(data);
        out.objective = objective(stats, out.beta, nu, alpha);
        out.converged = true;
    } else {
        double obj = objective(stats, out.beta, nu, alpha);
        for (int it = 1; it <= options.max_iterations; ++it) {
            Eigen::VectorXd next = bridge_mm_step(stats, out.beta, nu, alpha, options.zero_threshold);
            const double next_obj = objective(stats, next, nu, alpha);
            const double step = (next - out.beta).lpNorm<Eigen::Infinity>();
            out.beta = std::move(next);
            out.iterations = it;
            const bool flat = std::abs(obj - next_obj) <= options.tolerance * (1.0 + std::abs(next_obj));
            obj = next_obj;
            if (flat && step <= 1e-10 * (1.0 + out.beta.lpNorm<Eigen::Infinity>())) {
                out.converged = true;
                break;
            }
        }
        out.objective = obj;
    }
    out.gcv = generalized_cross_validation(data, out.beta, nu, alpha, options.zero_threshold, &out.df);
    return out;
}

double generalized_cross_validation(const model::RegressionData& data, const Eigen::VectorXd& beta,
                                    double nu, double alpha, double zero_threshold, double* df_out) {
    const model::SufficientStats stats = model::SufficientStats::from_data(data);
    const std::vector<Eigen::Index> active = active_set(beta, zero_threshold);
    double df = 0.0;
    if (!active.empty()) {
        const Eigen::MatrixXd A = active_system(stats, beta, active, nu, alpha);
        const auto k = static_cast<Eigen::Index>(active.size());
        Eigen::MatrixXd G(k, k);
        for (Eigen::Index a = 0; a < k; ++a)
            for (Eigen::Index b = 0; b < k; ++b) G(a, b) = stats.XtX(active[a], active[b]);
        // trace of X_A (X_A'X_A + W)^-1 X_A' = trace((X_A'X_A + W)^-1 X_A'X_A)
        df = A.ldlt().solve(G).trace();
    }
    if (df_out) *df_out = df;
    const double n = static_cast<double>(data.n());
    const double denom = 1.0 - df / n;
    if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
    return stats.rss(beta) / (n * denom * denom);
}

ClassicalBridgeFit classical_bridge_em(const model::RegressionData& data, double alpha,
                                       const std::vector<double>& nu_grid,
                                       const ClassicalBridgeOptions& options) {
    detail::require(!nu_grid.empty(), "nu grid is empty");
    detail::require(options.starts >= 1, "need at least one start");
    for (double nu : nu_grid) detail::require(nu >= 0.0 && std::isfinite(nu), "nu grid values must be >= 0");
    const model::SufficientStats stats = model::SufficientStats::from_data(data);
    const Eigen::VectorXd base = least_squares_start(stats);
    const double spread = std::max(1e-3, base.cwiseAbs().mean());

    Rng rng(options.seed);
    std::vector<Eigen::VectorXd> starts{base};
    for (int s = 1; s < options.starts; ++s) {
        Eigen::VectorXd v = base;
        for (Eigen::Index j = 0; j < v.size(); ++j) v(j) += 0.5 * spread * rng.normal();
        starts.push_back(std::move(v));
    }

    ClassicalBridgeFit fit;
    fit.nu_star = nu_grid.front();
    double best_gcv = std::numeric_limits<double>::infinity();
    std::size_t best = 0;
    for (double nu : nu_grid) {
        BridgePath winner{};
        bool all_converged = true;
        bool have = false;
        for (const auto& start : starts) {
            BridgePath path = minimize_bridge(data, nu, alpha, start, options);
            all_converged = all_converged && path.converged;
            if (!have || path.objective < winner.objective) {
                winner = std::move(path);
                have = true;
            }
            if (nu == 0.0) break;
        }
        winner.converged = all_converged;
        if (winner.gcv < best_gcv || fit.path.empty()) {
            if (winner.gcv < best_gcv) best_gcv = winner.gcv;
            best = fit.path.size();
        }
        fit.path.push_back(std::move(winner));
    }
    fit.nu_star = fit.path[best].nu;
    fit.beta = fit.path[best].beta;
    return fit;
}

std::vector<double> default_nu_grid(const model::RegressionData& data, int points) {
    detail::require(points >= 2, "grid needs at least two points");
    const double top = std::max((data.X.transpose() * data.y).lpNorm<Eigen::Infinity>(), 1e-8);
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) {
        const double e = -5.0 + 6.0 * i / (points - 1);
        grid.push_back(top * std::pow(10.0, e));
    }
    return grid;
}

}  // namespace bridge::harness
