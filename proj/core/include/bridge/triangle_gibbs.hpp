#pragma once

#include "bridge/model.hpp"
#include "bridge/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace bridge::triangle {

/// Label of the shifted gamma component that produced omega_j:
/// 1 for Gamma(1, 1), 2 for Gamma(2, 1).
using ComponentLabel = std::uint8_t;

/// Conditional of one coefficient given everything else at its last update:
/// N(mean, sd^2) restricted to [-bound, bound]. sd is +infinity when there is
/// no data term (the conditional is then uniform).
struct CoefficientConditionals {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;
    Eigen::VectorXd bound;
};

/// Chain state for the triangle-kernel sampler.
///
/// Invariants, for every j: |beta_j| < tau omega_j^(1/alpha) and
/// 0 <= u_j < 1 - |beta_j| / (tau omega_j^(1/alpha)).
/// tau and alpha record the values the latents were last drawn against; a
/// sweep under different values first redraws (u, omega) jointly given beta.
struct TriangleState {
    Eigen::VectorXd beta;
    Eigen::VectorXd omega;
    Eigen::VectorXd u;
    Eigen::Matrix<ComponentLabel, Eigen::Dynamic, 1> labels;
    CoefficientConditionals conditionals;
    double tau = 1.0;
    double alpha = 1.0;

    Eigen::Index p() const { return beta.size(); }
    /// Throws NumericalError naming the first coordinate outside the support.
    void check_invariants() const;
};

struct SliceBounds {
    Eigen::VectorXd a;  ///< lower truncation for omega
    Eigen::VectorXd b;  ///< half-width of the box for beta
};

struct SliceBound {
    double a;
    double b;
};

struct OmegaDraw {
    double omega;
    ComponentLabel label;
};

struct LatentDraw {
    double u;
    double omega;
    ComponentLabel label;
};

/// u_j uniform on (0, 1 - |beta_j| / (tau omega_j^(1/alpha))).
double sample_slice_u(double beta_j, double omega_j, double tau, double alpha, Rng& rng);

/// a_j = (|beta_j/tau| / (1 - u_j))^alpha, b_j = tau (1 - u_j) omega_j^(1/alpha).
SliceBound invert_slice(double beta_j, double u_j, double omega_j, double tau, double alpha);
SliceBounds invert_slices(const TriangleState& state, double tau, double alpha);

/// omega_j = a_j + w with w ~ Gamma(1, 1) with probability
/// (1 - alpha (1 - a_j)) / (1 + alpha a_j), else Gamma(2, 1).
OmegaDraw sample_omega_truncated(double a_j, double alpha, Rng& rng);

/// Weight of the Gamma(2, 1) component at truncation point a.
double second_component_weight(double a, double alpha);

/// Exact draw of (u_j, omega_j) from their joint conditional given beta_j.
LatentDraw sample_latents_joint(double beta_j, double tau, double alpha, Rng& rng);

/// Precomputed quantities of N(beta_ls, sigma^2 (X'X)^-1). Built once per chain.
class TruncatedGaussianDesign {
public:
    /// Throws InputError when X'X is singular or numerically so.
    explicit TruncatedGaussianDesign(const model::SufficientStats& stats);

    Eigen::Index p() const { return p_; }
    bool likelihood() const { return likelihood_; }
    const Eigen::VectorXd& beta_ls() const { return beta_ls_; }
    const Eigen::MatrixXd& XtX() const { return XtX_; }

private:
    Eigen::Index p_;
    bool likelihood_;
    Eigen::MatrixXd XtX_;
    Eigen::VectorXd beta_ls_;
};

/// One component-wise Gibbs pass over N(beta_ls, sigma^2 (X'X)^-1) restricted
/// to the box |beta_j| <= b_j. Records each coordinate's conditional.
Eigen::VectorXd sample_beta_truncated(const TruncatedGaussianDesign& design, double sigma2,
                                      const Eigen::VectorXd& b, Eigen::VectorXd beta, Rng& rng,
                                      CoefficientConditionals* conditionals = nullptr);

/// Valid starting state: beta at half the least-squares solution (zero
/// without data), omega from its prior truncated at |beta_j/tau|^alpha, u = 0.
TriangleState initialize(const TruncatedGaussianDesign& design, const model::BridgeParams& params,
                         Rng& rng);

/// u -> omega -> beta, using alpha, tau and sigma^2 from params.
void triangle_sweep(TriangleState& state, const TruncatedGaussianDesign& design,
                    const model::BridgeParams& params, Rng& rng);

}  // namespace bridge::triangle
