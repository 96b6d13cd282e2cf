#include "bridge/harness/diagnostics.hpp"

#include "bridge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bridge::harness {

namespace {

double log_phi_cdf(double x) {
    if (x > -30.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
    const double x2 = x * x;
    return -0.5 * x2 - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(-x) +
           std::log1p(-1.0 / x2 + 3.0 / (x2 * x2));
}

/// log(Phi(b) - Phi(a)) for a < b, without cancellation in either tail.
double log_normal_mass(double a, double b) {
    if (a >= 0.0) return log_normal_mass(-b, -a);
    if (b <= 0.0) {
        const double lb = log_phi_cdf(b);
        if (std::isinf(a)) return lb;
        return lb + std::log1p(-std::exp(log_phi_cdf(a) - lb));
    }
    const double lower = std::isinf(a) ? 0.0 : 0.5 * std::erfc(-a / std::numbers::sqrt2);
    const double upper = std::isinf(b) ? 0.0 : 0.5 * std::erfc(b / std::numbers::sqrt2);
    return std::log1p(-(lower + upper));
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::vector<double> autocorrelation(const Eigen::VectorXd& series, int max_lag) {
    const Eigen::Index n = series.size();
    detail::require(n >= 1, "series is empty");
    detail::require(max_lag >= 0, "max lag must be nonnegative");
    const Eigen::Index lags = std::min<Eigen::Index>(max_lag, n - 1);
    const Eigen::VectorXd c = series.array() - series.mean();
    const double c0 = c.squaredNorm();
    std::vector<double> acf(static_cast<std::size_t>(lags + 1), 0.0);
    acf[0] = 1.0;
    if (!(c0 > 0.0)) return acf;
    for (Eigen::Index k = 1; k <= lags; ++k) {
        acf[static_cast<std::size_t>(k)] = c.head(n - k).dot(c.tail(n - k)) / c0;
    }
    return acf;
}

double effective_sample_size(const Eigen::VectorXd& series) {
    const Eigen::Index n = series.size();
    detail::require(n >= 1, "series is empty");
    const Eigen::VectorXd c = series.array() - series.mean();
    const double c0 = c.squaredNorm();
    if (!(c0 > 0.0) || n < 4) return static_cast<double>(n);
    auto rho = [&](Eigen::Index k) { return c.head(n - k).dot(c.tail(n - k)) / c0; };
    // sum of Gamma_m = rho_2m + rho_2m+1 while positive; tau = -1 + 2 sum Gamma_m
    double sum = 0.0;
    for (Eigen::Index m = 0; 2 * m + 1 < n; ++m) {
        const double gamma = (m == 0 ? 1.0 : rho(2 * m)) + rho(2 * m + 1);
        if (!(gamma > 0.0)) break;
        sum += gamma;
    }
    const double tau = std::max(-1.0 + 2.0 * sum, 1.0 / static_cast<double>(n));
    return static_cast<double>(n) / tau;
}

ExperimentReport diagnostics(const DrawsStore& draws) {
    detail::require(draws.size() > 0, "draws store is empty");
    ExperimentReport report;
    report.kind = "diagnostics";
    auto add = [&](const std::string& name, const Eigen::VectorXd& s) {
        report.diagnostics.push_back({name, autocorrelation(s, 100), effective_sample_size(s)});
    };
    add("tau", draws.tau);
    add("nu", draws.nu);
    add("sigma2", draws.sigma2);
    add("alpha", draws.alpha);
    for (Eigen::Index j = 0; j < draws.p(); ++j)
        add(draws.names[static_cast<std::size_t>(j)], draws.beta.col(j));
    report.scalars["records"] = static_cast<double>(draws.size());
    report.notes["method"] = to_string(draws.meta.method);
    return report;
}

double truncated_normal_density(double x, double mean, double sd, double bound) {
    if (std::abs(x) > bound) return 0.0;
    if (std::isinf(sd)) return 0.5 / bound;
    const double z = (x - mean) / sd;
    const double log_kernel = -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(sd);
    if (std::isinf(bound)) return std::exp(log_kernel);
    return std::exp(log_kernel - log_normal_mass((-bound - mean) / sd, (bound - mean) / sd));
}

ExperimentReport summarize(const DrawsStore& draws, const GridSpec& grid) {
    detail::require(draws.size() > 0, "draws store is empty");
    ExperimentReport report;
    report.kind = "summary";
    const Eigen::Index records = draws.size();
    for (Eigen::Index j = 0; j < draws.p(); ++j) {
        const Eigen::VectorXd col = draws.beta.col(j);
        std::vector<double> v(col.data(), col.data() + col.size());
        CoefficientSummary s;
        s.name = draws.names[static_cast<std::size_t>(j)];
        s.mean = col.mean();
        s.sd = records > 1 ? std::sqrt((col.array() - s.mean).square().sum() / (records - 1)) : 0.0;
        s.q025 = quantile(v, 0.025);
        s.q50 = quantile(v, 0.5);
        s.q975 = quantile(v, 0.975);
        report.coefficients.push_back(s);
    }
    if (!draws.has_conditionals()) {
        report.notes["densities"] = "no recorded conditionals";
        return report;
    }
    detail::require(grid.points >= 2, "grid needs at least two points");
    for (Eigen::Index j = 0; j < draws.p(); ++j) {
        double lo = grid.lower;
        double hi = grid.upper;
        if (grid.automatic) {
            lo = std::numeric_limits<double>::infinity();
            hi = -lo;
            for (Eigen::Index r = 0; r < records; ++r) {
                const double m = draws.cond_mean(r, j);
                const double sd = draws.cond_sd(r, j);
                const double b = draws.cond_bound(r, j);
                lo = std::min(lo, std::max(m - 8.0 * sd, -b));
                hi = std::max(hi, std::min(m + 8.0 * sd, b));
            }
        }
        detail::require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "invalid density grid range");
        DensityGrid d;
        d.name = draws.names[static_cast<std::size_t>(j)];
        d.grid.resize(static_cast<std::size_t>(grid.points));
        d.density.assign(d.grid.size(), 0.0);
        for (int g = 0; g < grid.points; ++g)
            d.grid[static_cast<std::size_t>(g)] = lo + (hi - lo) * g / (grid.points - 1);
        for (Eigen::Index r = 0; r < records; ++r) {
            const double m = draws.cond_mean(r, j);
            const double sd = draws.cond_sd(r, j);
            const double b = draws.cond_bound(r, j);
            for (std::size_t g = 0; g < d.grid.size(); ++g)
                d.density[g] += truncated_normal_density(d.grid[g], m, sd, b);
        }
        for (double& v : d.density) v /= static_cast<double>(records);
        report.densities.push_back(std::move(d));
    }
    return report;
}

StratifiedSeries mode_stratified_draws(const DrawsStore& draws, Eigen::Index coefficient) {
    if (!draws.has_labels()) {
        throw InputError("draws carry no omega component labels (stable-method store)");
    }
    detail::require(coefficient >= 0 && coefficient < draws.p(), "coefficient index out of range");
    StratifiedSeries out;
    for (Eigen::Index r = 0; r < draws.size(); ++r) {
        const double b = draws.beta(r, coefficient);
        if (draws.labels(r, coefficient) == 1) {
            out.first.push_back(b);
        } else {
            out.second.push_back(b);
        }
    }
    return out;
}

double stratum_separation(const StratifiedSeries& series) {
    const auto n1 = series.first.size();
    const auto n2 = series.second.size();
    if (n1 < 2 || n2 < 2) return 0.0;
    auto moments = [](const std::vector<double>& v, double& mean, double& ss) {
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
    };
    double m1, s1, m2, s2;
    moments(series.first, m1, s1);
    moments(series.second, m2, s2);
    const double pooled = std::sqrt((s1 + s2) / static_cast<double>(n1 + n2 - 2));
    if (!(pooled > 0.0)) return 0.0;
    return std::abs(m1 - m2) / pooled;
}

}  // namespace bridge::harness
