#include "bridge/monotone_mixture.hpp"

#include "bridge/errors.hpp"
#include "bridge/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bridge::mixture {

using detail::require;

namespace {

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

double binomial(int n, int k) {
    return std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
}

double gamma_pdf(double x, double shape) {
    if (x <= 0.0) return 0.0;
    return std::exp((shape - 1.0) * std::log(x) - x - std::lgamma(shape));
}

/// Integral over [lo, inf) whose first segment is mapped through
/// s = lo + w t^8, which regularizes integrable power singularities at lo.
/// The mapped segment stops at the first breakpoint past lo.
double integrate_from(const quadrature::Integrand& f, double lo, double width,
                      const std::vector<double>& breakpoints,
                      const quadrature::Options& options = {}) {
    for (double b : breakpoints) {
        if (b > lo && b < lo + width) width = b - lo;
    }
    auto mapped = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double t7 = std::pow(t, 7);
        return f(lo + width * t7 * t) * 8.0 * width * t7;
    };
    const double head = quadrature::integrate(mapped, 0.0, 1.0, {}, options).value;
    std::vector<double> cuts;
    for (double b : breakpoints) {
        if (b > lo + width) cuts.push_back(b);
    }
    const double tail = quadrature::integrate_to_infinity(f, lo + width, cuts, options).value;
    return head + tail;
}

quadrature::Options tolerance_options(double abs_tol) {
    quadrature::Options options;
    options.abs_tol = abs_tol;
    options.rel_tol = std::min(1e-6, 1e-2 * abs_tol);
    return options;
}

}  // namespace

double finite_difference(const ScalarFn& f, int k, double x) {
    require(k >= 0, "derivative order must be nonnegative");
    if (k == 0) return f(x);
    require(x > 0.0, "finite differences are taken on (0, inf)");
    const double eps = std::numeric_limits<double>::epsilon();
    double h = std::max(1e-4, std::pow(eps, 1.0 / (k + 2))) * std::max(1.0, x);
    h = std::min(h, 0.1 * x / k);  // keep the stencil well inside (0, inf)
    auto stencil = [&](double step) {
        double sum = 0.0;
        for (int i = 0; i <= k; ++i) {
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            sum += sign * binomial(k, i) * f(x + (0.5 * k - i) * step);
        }
        return sum / std::pow(step, k);
    };
    return (4.0 * stencil(0.5 * h) - stencil(h)) / 3.0;
}

double MonotoneDensity::derivative_at(int j, double x) const {
    if (derivative) return (*derivative)(j, x);
    return finite_difference(f, j, x);
}

double MonotoneDensity::normalizing_constant() const {
    if (normalizer) return *normalizer;
    const double half = integrate_from(f, 0.0, 1.0, breakpoints);
    return 1.0 / (2.0 * half);
}

void MonotoneDensity::validate(std::optional<int> up_to_order) const {
    require(static_cast<bool>(f), "monotone density has no function");
    require(order >= 1, "monotone order must be at least 1");
    require(std::abs(f(0.0) - 1.0) <= 1e-12, name + ": f(0) must equal 1");
    const int top = up_to_order.value_or(order);
    for (int i = 0; i < 60; ++i) {
        const double x = 0.01 * std::pow(2000.0, i / 59.0);
        require(std::abs(f(x) - f(-x)) <= 1e-12 * std::max(1.0, std::abs(f(x))),
                name + ": f is not symmetric");
        for (int j = 0; j < top; ++j) {
            bool skip = false;
            for (double b : breakpoints) {
                if (std::abs(x - b) < 1e-3 * std::max(1.0, b)) skip = true;
            }
            if (skip) continue;
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            const double value = sign * derivative_at(j, x);
            if (value < -1e-10) {
                std::ostringstream msg;
                msg << name << ": monotonicity certificate fails at order " << j << ", x = " << x
                    << " (value " << value << ")";
                throw InputError(msg.str());
            }
        }
    }
}

struct MixingDensity::Table {
    std::vector<double> s;
    std::vector<double> cdf;
};

MixingDensity MixingDensity::from_density(ScalarFn g, int kernel_order,
                                          std::vector<double> breakpoints, double tolerance) {
    require(kernel_order >= 1, "kernel order must be at least 1");
    MixingDensity out;
    out.g_ = std::move(g);
    out.kernel_order_ = kernel_order;
    out.breakpoints_ = std::move(breakpoints);
    out.tolerance_ = tolerance;

    // cumulative masses on s = t / (1 - t), t uniform on [0, 1)
    auto table = std::make_shared<Table>();
    constexpr int kCells = 2048;
    table->s.reserve(kCells + 1);
    table->cdf.reserve(kCells + 1);
    table->s.push_back(0.0);
    table->cdf.push_back(0.0);
    const quadrature::Options loose = tolerance_options(std::max(tolerance, 1e-9));
    for (int i = 1; i < kCells; ++i) {
        const double t = static_cast<double>(i) / kCells;
        const double s = t / (1.0 - t);
        const double piece =
            quadrature::integrate(out.g_, table->s.back(), s, out.breakpoints_, loose).value;
        table->cdf.push_back(table->cdf.back() + std::max(piece, 0.0));
        table->s.push_back(s);
    }
    const double tail =
        quadrature::integrate_to_infinity(out.g_, table->s.back(), out.breakpoints_, loose).value;
    table->cdf.push_back(table->cdf.back() + std::max(tail, 0.0));
    table->s.push_back(std::numeric_limits<double>::infinity());
    out.table_ = std::move(table);
    return out;
}

MixingDensity MixingDensity::point_mass(double atom, int kernel_order) {
    require(std::isfinite(atom) && atom > 0.0, "point mass must sit at a positive scale");
    require(kernel_order >= 1, "kernel order must be at least 1");
    MixingDensity out;
    out.atom_ = atom;
    out.kernel_order_ = kernel_order;
    return out;
}

double MixingDensity::atom() const {
    require(atom_.has_value(), "mixing density is not a point mass");
    return *atom_;
}

double MixingDensity::density(double s) const {
    if (atom_ || s <= 0.0) return 0.0;
    return g_(s);
}

double MixingDensity::total_mass() const {
    if (atom_) return 1.0;
    return integrate_from(g_, 0.0, 1.0, breakpoints_, tolerance_options(tolerance_));
}

double MixingDensity::sample(Rng& rng) const {
    if (atom_) return *atom_;
    const auto& s = table_->s;
    const auto& cdf = table_->cdf;
    const double target = rng.uniform() * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    const auto hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        it - cdf.begin(), 1, static_cast<std::ptrdiff_t>(cdf.size()) - 1));
    const std::size_t lo = hi - 1;
    if (!std::isfinite(s[hi])) return s[lo];
    const double span = cdf[hi] - cdf[lo];
    const double frac = span > 0.0 ? (target - cdf[lo]) / span : 0.5;
    return s[lo] + frac * (s[hi] - s[lo]);
}

MixingDensity invert_mixing(const MonotoneDensity& fd, int k) {
    require(k >= 1 && k <= fd.order, "mixing order k must satisfy 1 <= k <= order");
    fd.validate(std::min(k, fd.order));
    if (fd.kernel_scale && k == fd.order) {
        return MixingDensity::point_mass(*fd.kernel_scale, k);
    }

    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double log_kfact = log_factorial(k);
    MonotoneDensity copy = fd;
    auto raw = [copy, k, sign, log_kfact](double s) {
        if (s <= 0.0) return 0.0;
        return sign * std::exp(k * std::log(s) - log_kfact) * copy.derivative_at(k, s);
    };

    // nonnegativity on an evaluation grid, relative to the largest value
    double peak = 0.0;
    double lowest = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double s = 1e-3 * std::pow(1e5, i / 199.0);
        const double v = raw(s);
        peak = std::max(peak, v);
        lowest = std::min(lowest, v);
    }
    if (lowest < -1e-8 * std::max(peak, 1e-300)) {
        std::ostringstream msg;
        msg << fd.name << ": mixing density is negative on the grid (min " << lowest << ")";
        throw InputError(msg.str());
    }

    // differenced derivatives carry roundoff noise growing with the order
    const double tolerance = fd.derivative ? 1e-11 : 1e-8 * std::pow(100.0, std::max(0, k - 2));
    const double mass =
        integrate_from(raw, 0.0, 1.0, fd.breakpoints, tolerance_options(tolerance));
    if (!(mass > 0.0)) throw NumericalError(fd.name + ": mixing density has no mass");
    auto g = [raw, mass](double s) { return std::max(raw(s), 0.0) / mass; };
    return MixingDensity::from_density(g, k, fd.breakpoints, tolerance);
}

double reconstruct_density(const MixingDensity& g, double x) {
    const int k = g.kernel_order();
    const double ax = std::abs(x);
    if (g.is_point_mass()) {
        const double s = g.atom();
        if (ax >= s) return 0.0;
        return k / (2.0 * s) * std::pow(1.0 - ax / s, k - 1);
    }
    auto integrand = [&g, k, ax](double s) {
        if (s <= ax) return 0.0;
        return k / (2.0 * s) * std::pow(1.0 - ax / s, k - 1) * g.density(s);
    };
    return integrate_from(integrand, ax, std::max(1.0, ax), g.breakpoints(),
                          tolerance_options(g.tolerance()));
}

EpOmegaMixture::EpOmegaMixture(double a)
    : alpha(a),
      weight_first(0.5 * (1.0 + a)),
      weight_second(0.5 * (1.0 - a)),
      shape_first(2.0 + 1.0 / a),
      shape_second(1.0 + 1.0 / a) {
    require(std::isfinite(a) && a > 0.0 && a <= 1.0, "alpha must lie in (0, 1]");
}

double ep_omega_density(double omega, double alpha) {
    const EpOmegaMixture mix(alpha);
    require(std::isfinite(omega) && omega > 0.0, "omega must be positive");
    double out = mix.weight_first * gamma_pdf(omega, mix.shape_first);
    if (mix.weight_second > 0.0) out += mix.weight_second * gamma_pdf(omega, mix.shape_second);
    return out;
}

OmegaPriorDraw sample_omega_prior(double alpha, Rng& rng) {
    const EpOmegaMixture mix(alpha);
    if (rng.uniform() < mix.weight_first) return {rng.gamma(mix.shape_first), 1};
    return {rng.gamma(mix.shape_second), 2};
}

double ep_mixture_reconstruction(double x, double tau, double alpha) {
    require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
    const EpOmegaMixture mix(alpha);
    const double ax = std::abs(x);
    const double lo = std::pow(ax / tau, alpha);
    auto integrand = [=](double omega) {
        if (omega <= 0.0) return 0.0;
        const double width = tau * std::pow(omega, 1.0 / alpha);
        const double tri = 1.0 - ax / width;
        if (tri <= 0.0) return 0.0;
        return tri / width * ep_omega_density(omega, alpha);
    };
    return integrate_from(integrand, lo, std::max(1.0, lo), {});
}

ExtremeValueCheck extreme_value_mixture_check(double x) {
    require(std::isfinite(x), "x must be finite");
    const double c = std::exp(-x);
    ExtremeValueCheck out{};
    out.lhs = std::exp(-c);
    auto printed = [c](double w) { return w > c ? (1.0 - c / w) * std::exp(-w) : 0.0; };
    auto corollary = [c](double w) { return w > c ? (1.0 - c / w) * w * std::exp(-w) : 0.0; };
    out.printed_rhs = integrate_from(printed, c, std::max(1.0, c), {});
    out.corollary_rhs = integrate_from(corollary, c, std::max(1.0, c), {});
    return out;
}

double beta_kernel_approximation(const BernsteinMeasure& measure, int k, double x) {
    require(k >= 1, "kernel order must be at least 1");
    require(x >= 0.0, "x must be nonnegative");
    auto kernel = [k, x](double u) {
        const double base = 1.0 - u * x / k;
        return base > 0.0 ? std::pow(base, k - 1) : 0.0;
    };
    if (measure.atom) return kernel(*measure.atom);
    auto integrand = [&](double u) { return kernel(u) * measure.density(u); };
    if (x > 0.0) return quadrature::integrate(integrand, 0.0, k / x).value;
    return quadrature::integrate_to_infinity(integrand, 0.0).value;
}

namespace {

MonotoneDensity exp_density() {
    MonotoneDensity fd;
    fd.name = "exp";
    fd.f = [](double x) { return std::exp(-std::abs(x)); };
    fd.derivative = [](int j, double x) {
        return ((j % 2 == 0) ? 1.0 : -1.0) * std::exp(-x);
    };
    fd.order = 32;
    fd.normalizer = 0.5;
    return fd;
}

MonotoneDensity ep_density(double alpha) {
    require(alpha > 0.0 && alpha <= 1.0, "ep shape needs alpha in (0, 1]");
    MonotoneDensity fd;
    std::ostringstream name;
    name << "ep:" << alpha;
    fd.name = name.str();
    fd.f = [alpha](double x) { return std::exp(-std::pow(std::abs(x), alpha)); };
    // f = exp(h), h = -x^a; f^(n+1) = sum_i C(n, i) h^(i+1) f^(n-i)
    fd.derivative = [alpha](int j, double x) {
        std::vector<double> h(j + 1);
        double falling = 1.0;
        for (int m = 1; m <= j; ++m) {
            falling *= (alpha - (m - 1));
            h[m] = -falling * std::pow(x, alpha - m);
        }
        std::vector<double> d(j + 1);
        d[0] = std::exp(-std::pow(x, alpha));
        for (int n = 0; n < j; ++n) {
            double sum = 0.0;
            for (int i = 0; i <= n; ++i) sum += binomial(n, i) * h[i + 1] * d[n - i];
            d[n + 1] = sum;
        }
        return d[j];
    };
    fd.order = 32;
    fd.normalizer = 1.0 / (2.0 * std::tgamma(1.0 + 1.0 / alpha));
    return fd;
}

MonotoneDensity rational_density() {
    MonotoneDensity fd;
    fd.name = "rational";
    fd.f = [](double x) { return 1.0 / ((1.0 + std::abs(x)) * (1.0 + std::abs(x))); };
    fd.derivative = [](int j, double x) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        return sign * std::exp(log_factorial(j + 1) - (j + 2) * std::log1p(x));
    };
    fd.order = 32;
    fd.normalizer = 0.5;
    return fd;
}

MonotoneDensity kernel_density(int m) {
    require(m >= 1, "kernel order must be at least 1");
    MonotoneDensity fd;
    fd.name = "kernel:" + std::to_string(m);
    fd.f = [m](double x) {
        const double base = 1.0 - std::abs(x);
        if (base <= 0.0) return 0.0;
        return m == 1 ? 1.0 : std::pow(base, m - 1);
    };
    fd.derivative = [m](int j, double x) {
        if (x >= 1.0 || j > m - 1) return 0.0;
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        return sign * std::exp(log_factorial(m - 1) - log_factorial(m - 1 - j)) *
               std::pow(1.0 - x, m - 1 - j);
    };
    fd.order = m;
    fd.normalizer = 0.5 * m;
    fd.kernel_scale = 1.0;
    fd.breakpoints = {1.0};
    return fd;
}

}  // namespace

MonotoneDensity registered_density(std::string_view name) {
    std::string base(name);
    bool finite_differences = false;
    if (base.size() > 3 && base.ends_with("/fd")) {
        finite_differences = true;
        base.resize(base.size() - 3);
    }
    MonotoneDensity fd;
    if (base == "exp") {
        fd = exp_density();
    } else if (base == "rational") {
        fd = rational_density();
    } else if (base.starts_with("ep:")) {
        fd = ep_density(std::stod(base.substr(3)));
    } else if (base.starts_with("kernel:")) {
        fd = kernel_density(std::stoi(base.substr(7)));
    } else {
        throw InputError("unknown monotone density '" + std::string(name) + "'");
    }
    if (finite_differences) {
        fd.derivative.reset();
        fd.name += "/fd";
        // higher orders are beyond what differencing resolves
        fd.order = std::min(fd.order, 3);
    }
    return fd;
}

}  // namespace bridge::mixture
