#include "bridge/triangle_gibbs.hpp"

#include "bridge/errors.hpp"
#include "bridge/truncated_normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bridge::triangle {

namespace {

/// |beta| / (tau omega^(1/alpha)), formed in logs so omega^(1/alpha) never overflows.
double support_ratio(double beta_j, double omega_j, double tau, double alpha) {
    if (beta_j == 0.0) return 0.0;
    return std::exp(std::log(std::abs(beta_j)) - std::log(tau) - std::log(omega_j) / alpha);
}

/// e^(-a) (1 + alpha a) up to the common factor e^(-a0).
double survival_ratio(double t, double a0, double alpha) {
    return std::exp(-(t - a0)) * (1.0 + alpha * t) / (1.0 + alpha * a0);
}

void check_domain(double tau, double alpha) {
    model::check_alpha(alpha);
    detail::require(std::isfinite(tau) && tau > 0.0, "tau must be positive and finite");
}

}  // namespace

void TriangleState::check_invariants() const {
    for (Eigen::Index j = 0; j < p(); ++j) {
        const double r = support_ratio(beta(j), omega(j), tau, alpha);
        if (!(omega(j) > 0.0) || !(r < 1.0) || !(u(j) >= 0.0) || !(u(j) < 1.0 - r)) {
            std::ostringstream msg;
            msg << "triangle state outside support at coordinate " << j << ": beta=" << beta(j)
                << " omega=" << omega(j) << " u=" << u(j);
            throw NumericalError(msg.str());
        }
    }
}

double sample_slice_u(double beta_j, double omega_j, double tau, double alpha, Rng& rng) {
    check_domain(tau, alpha);
    detail::require(omega_j > 0.0, "omega must be positive");
    const double width = 1.0 - support_ratio(beta_j, omega_j, tau, alpha);
    if (!(width > 0.0)) {
        std::ostringstream msg;
        msg << "beta " << beta_j << " outside the triangle support for omega " << omega_j;
        throw NumericalError(msg.str());
    }
    return width * rng.uniform();
}

SliceBound invert_slice(double beta_j, double u_j, double omega_j, double tau, double alpha) {
    check_domain(tau, alpha);
    detail::require(u_j >= 0.0 && u_j < 1.0, "slice variable must lie in [0, 1)");
    detail::require(omega_j > 0.0, "omega must be positive");
    const double rest = 1.0 - u_j;
    const double a = std::pow(std::abs(beta_j / tau) / rest, alpha);
    const double b = tau * rest * std::exp(std::log(omega_j) / alpha);
    return {a, b};
}

SliceBounds invert_slices(const TriangleState& state, double tau, double alpha) {
    SliceBounds bounds{Eigen::VectorXd(state.p()), Eigen::VectorXd(state.p())};
    for (Eigen::Index j = 0; j < state.p(); ++j) {
        const SliceBound s = invert_slice(state.beta(j), state.u(j), state.omega(j), tau, alpha);
        bounds.a(j) = s.a;
        bounds.b(j) = s.b;
    }
    return bounds;
}

double second_component_weight(double a, double alpha) { return alpha / (1.0 + alpha * a); }

OmegaDraw sample_omega_truncated(double a_j, double alpha, Rng& rng) {
    model::check_alpha(alpha);
    detail::require(std::isfinite(a_j) && a_j >= 0.0, "omega truncation point must be >= 0");
    if (rng.uniform() < second_component_weight(a_j, alpha)) {
        return {a_j + rng.gamma(2.0), 2};
    }
    return {a_j + rng.exponential(), 1};
}

LatentDraw sample_latents_joint(double beta_j, double tau, double alpha, Rng& rng) {
    check_domain(tau, alpha);
    const double a0 = std::pow(std::abs(beta_j / tau), alpha);
    if (a0 == 0.0) {
        const double u = rng.uniform();
        const OmegaDraw w = sample_omega_truncated(0.0, alpha, rng);
        return {u, w.omega, w.label};
    }
    // t = a(u) has density proportional to e^(-t) (1 + alpha t) t^(-1/alpha - 1) on [a0, inf)
    const double power = 1.0 / alpha + 1.0;
    double t;
    for (;;) {
        if (alpha * a0 < 1.0) {
            // 1 - u uniform, t = a0 (1 - u)^(-alpha); accept by the survival ratio
            t = a0 * std::pow(rng.uniform(), -alpha);
            if (rng.uniform() <= survival_ratio(t, a0, alpha)) break;
        } else {
            t = a0 + rng.exponential();
            const double ratio = (1.0 + alpha * t) / (1.0 + alpha * a0) * std::pow(a0 / t, power);
            if (rng.uniform() <= ratio) break;
        }
    }
    const double u = 1.0 - std::pow(a0 / t, 1.0 / alpha);
    const OmegaDraw w = sample_omega_truncated(t, alpha, rng);
    return {std::max(u, 0.0), w.omega, w.label};
}

TruncatedGaussianDesign::TruncatedGaussianDesign(const model::SufficientStats& stats)
    : p_(stats.p()), likelihood_(stats.likelihood) {
    detail::require(p_ >= 1, "need at least one coefficient");
    if (!likelihood_) {
        XtX_ = Eigen::MatrixXd::Zero(p_, p_);
        beta_ls_ = Eigen::VectorXd::Zero(p_);
        return;
    }
    XtX_ = stats.XtX;
    Eigen::LLT<Eigen::MatrixXd> llt(XtX_);
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-13) {
        std::ostringstream msg;
        msg << "X'X is singular or numerically singular (p = " << p_ << ", n = " << stats.n
            << "); the triangle sampler needs an invertible X'X";
        throw InputError(msg.str());
    }
    beta_ls_ = llt.solve(stats.Xty);
}

Eigen::VectorXd sample_beta_truncated(const TruncatedGaussianDesign& design, double sigma2,
                                      const Eigen::VectorXd& b, Eigen::VectorXd beta, Rng& rng,
                                      CoefficientConditionals* conditionals) {
    const Eigen::Index p = design.p();
    detail::require(beta.size() == p && b.size() == p, "dimension mismatch in beta update");
    detail::require(sigma2 > 0.0, "sigma^2 must be positive");
    for (Eigen::Index j = 0; j < p; ++j) {
        detail::require(b(j) > 0.0 && std::abs(beta(j)) <= b(j),
                        "current beta lies outside the truncation box");
    }
    if (conditionals) {
        conditionals->mean.resize(p);
        conditionals->sd.resize(p);
        conditionals->bound = b;
    }
    if (!design.likelihood()) {
        for (Eigen::Index j = 0; j < p; ++j) {
            beta(j) = sample_truncated_normal(0.0, std::numeric_limits<double>::infinity(), -b(j),
                                              b(j), rng);
            if (conditionals) {
                conditionals->mean(j) = 0.0;
                conditionals->sd(j) = std::numeric_limits<double>::infinity();
            }
        }
        return beta;
    }
    const Eigen::MatrixXd& A = design.XtX();
    const Eigen::VectorXd& ls = design.beta_ls();
    // r = X'X (beta - beta_ls), kept current as coordinates move
    Eigen::VectorXd r = A * (beta - ls);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double ajj = A(j, j);
        const double mean = ls(j) - (r(j) - ajj * (beta(j) - ls(j))) / ajj;
        const double sd = std::sqrt(sigma2 / ajj);
        const double next = sample_truncated_normal(mean, sd, -b(j), b(j), rng);
        r += A.col(j) * (next - beta(j));
        beta(j) = next;
        if (conditionals) {
            conditionals->mean(j) = mean;
            conditionals->sd(j) = sd;
        }
    }
    return beta;
}

TriangleState initialize(const TruncatedGaussianDesign& design, const model::BridgeParams& params,
                         Rng& rng) {
    const double tau = params.tau();
    const double alpha = params.alpha();
    check_domain(tau, alpha);
    const Eigen::Index p = design.p();
    TriangleState state;
    state.beta = 0.5 * design.beta_ls();
    state.omega.resize(p);
    state.u = Eigen::VectorXd::Zero(p);
    state.labels.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const OmegaDraw w =
            sample_omega_truncated(std::pow(std::abs(state.beta(j) / tau), alpha), alpha, rng);
        state.omega(j) = w.omega;
        state.labels(j) = w.label;
    }
    state.conditionals.mean = state.beta;
    state.conditionals.sd = Eigen::VectorXd::Zero(p);
    state.conditionals.bound = Eigen::VectorXd::Zero(p);
    state.tau = tau;
    state.alpha = alpha;
    return state;
}

void triangle_sweep(TriangleState& state, const TruncatedGaussianDesign& design,
                    const model::BridgeParams& params, Rng& rng) {
    const double tau = params.tau();
    const double alpha = params.alpha();
    check_domain(tau, alpha);
    const Eigen::Index p = state.p();
    detail::require(p == design.p(), "state and design dimensions differ");

    if (tau != state.tau || alpha != state.alpha) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const LatentDraw d = sample_latents_joint(state.beta(j), tau, alpha, rng);
            state.u(j) = d.u;
            state.omega(j) = d.omega;
            state.labels(j) = d.label;
        }
        state.tau = tau;
        state.alpha = alpha;
    }

    Eigen::VectorXd b(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        state.u(j) = sample_slice_u(state.beta(j), state.omega(j), tau, alpha, rng);
        const double rest = 1.0 - state.u(j);
        const double a = std::pow(std::abs(state.beta(j) / tau) / rest, alpha);
        const OmegaDraw w = sample_omega_truncated(a, alpha, rng);
        state.omega(j) = w.omega;
        state.labels(j) = w.label;
        b(j) = tau * rest * std::exp(std::log(w.omega) / alpha);
        // rounding in the exp/log round trip can land b a hair below |beta|
        b(j) = std::max(b(j), std::abs(state.beta(j)));
    }
    state.beta = sample_beta_truncated(design, params.sigma2(), b, std::move(state.beta), rng,
                                       &state.conditionals);
}

}  // namespace bridge::triangle
