#pragma once

#include "bridge/rng.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bridge::mixture {

using ScalarFn = std::function<double(double)>;
/// f^(j)(x) for x > 0.
using DerivativeFn = std::function<double(int, double)>;

/// A symmetric density shape f with f(0) = 1 that is `order`-monotone on
/// (0, inf): (-1)^j f^(j) >= 0 for j < order.
struct MonotoneDensity {
    std::string name;
    ScalarFn f;
    /// Analytic derivatives; when absent, central differences with
    /// Richardson extrapolation are used.
    std::optional<DerivativeFn> derivative;
    int order = 1;
    /// C = {2 int_0^inf f}^(-1); computed by quadrature when absent.
    std::optional<double> normalizer;
    /// Set when f is exactly the beta kernel (1 - |x|/s)_+^(order-1) with
    /// this scale; its order-`order` mixing measure is a point mass.
    std::optional<double> kernel_scale;
    /// Finite points where f or its derivatives are not smooth.
    std::vector<double> breakpoints;

    double derivative_at(int j, double x) const;
    double normalizing_constant() const;

    /// Checks f(0) = 1, symmetry and the monotonicity certificate up to
    /// `up_to_order` (defaults to `order`). Throws InputError on failure.
    void validate(std::optional<int> up_to_order = std::nullopt) const;
};

/// Central-difference k-th derivative with one Richardson step.
double finite_difference(const ScalarFn& f, int k, double x);

/// A mixing measure over the scale s of the beta kernel
/// (k / 2s) (1 - |x|/s)_+^(k-1), which is itself a density on the real line.
/// Either an evaluable density or an explicit point mass.
class MixingDensity {
public:
    /// `tolerance` is the absolute quadrature tolerance used for integrals
    /// of g (looser when g comes from differenced derivatives).
    static MixingDensity from_density(ScalarFn g, int kernel_order,
                                      std::vector<double> breakpoints = {},
                                      double tolerance = 1e-11);
    static MixingDensity point_mass(double atom, int kernel_order);

    int kernel_order() const { return kernel_order_; }
    bool is_point_mass() const { return atom_.has_value(); }
    double atom() const;
    /// Density value; zero everywhere for a point mass.
    double density(double s) const;
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    double tolerance() const { return tolerance_; }
    /// Total mass by quadrature (exactly 1 for a point mass).
    double total_mass() const;
    /// Draw by tabulated inverse CDF (exact for a point mass).
    double sample(Rng& rng) const;

private:
    struct Table;

    MixingDensity() = default;

    ScalarFn g_;
    std::optional<double> atom_;
    int kernel_order_ = 1;
    std::vector<double> breakpoints_;
    double tolerance_ = 1e-11;
    std::shared_ptr<const Table> table_;
};

/// Mixing density g with C f(x) = int (k/2s)(1 - |x|/s)_+^(k-1) g(s) ds,
/// from g(s) proportional to (-1)^k s^k f^(k)(s) / k!, normalized by
/// quadrature.
MixingDensity invert_mixing(const MonotoneDensity& fd, int k);

/// Quadrature of the kernel mixture at x. Equals C f(x) for an inverted g.
double reconstruct_density(const MixingDensity& g, double x);

/// Two-component gamma mixture over omega = s^alpha paired with the
/// triangle kernel: (1+a)/2 Ga(2+1/a, 1) + (1-a)/2 Ga(1+1/a, 1).
struct EpOmegaMixture {
    explicit EpOmegaMixture(double alpha);

    double alpha;
    double weight_first;   ///< (1 + alpha)/2, shape 2 + 1/alpha
    double weight_second;  ///< (1 - alpha)/2, shape 1 + 1/alpha
    double shape_first;
    double shape_second;
};

double ep_omega_density(double omega, double alpha);

struct OmegaPriorDraw {
    double omega;
    int component;  ///< 1: shape 2 + 1/alpha, 2: shape 1 + 1/alpha
};

OmegaPriorDraw sample_omega_prior(double alpha, Rng& rng);

/// Normalized exponential-power density recovered from the omega mixture:
/// int (1/(tau w^(1/a))) (1 - |x|/(tau w^(1/a)))_+ p(w | a) dw.
double ep_mixture_reconstruction(double x, double tau, double alpha);

struct ExtremeValueCheck {
    double lhs;            ///< exp(-e^(-x))
    double printed_rhs;    ///< int (1/w)(1 - e^(-x)/w)_+ w e^(-w) dw
    double corollary_rhs;  ///< int (1/w)(1 - e^(-x)/w)_+ w^2 e^(-w) dw
};

/// Gumbel cdf written as a gamma mixture of triangles. The integrand with a
/// single factor of w does not reproduce the left side; the one carrying
/// the Bartlett-Fejer mixing density s^2 f''(s) = w^2 e^(-w) does.
ExtremeValueCheck extreme_value_mixture_check(double x);

/// A Bernstein (exponential-kernel) representation f(x) = int e^(-ux) dP(u)
/// of a completely monotone target.
struct BernsteinMeasure {
    std::optional<double> atom;  ///< point mass location
    ScalarFn density;            ///< used when atom is empty
};

/// int (1 - u x / k)_+^(k-1) dP(u): the order-k beta-kernel approximation
/// that tends to the exponential-kernel mixture as k grows.
double beta_kernel_approximation(const BernsteinMeasure& measure, int k, double x);

/// Built-in shapes, by name: "exp", "ep:<alpha>", "rational", "kernel:<m>".
/// The suffix "/fd" drops analytic derivatives.
MonotoneDensity registered_density(std::string_view name);

}  // namespace bridge::mixture
