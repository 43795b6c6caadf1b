#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "modlab/grid.hpp"

namespace modlab {

// Half-space points carry d spatial coordinates followed by xi.
constexpr int kMaxExtDim = 8;
using HalfPoint = std::array<double, kMaxExtDim>;

struct ExtensionParams {
    double alpha = 0.5;
    int dim = 3;
    int j = 0;
    double gamma = 0.0;
};

/// j = floor((d - alpha)/2), gamma = alpha - d + 2j + 1. Integer (d - alpha)/2 throws PolyharmonicCase.
ExtensionParams gamma_exponent(double alpha, int dim);

/// C_l = prod_{q<l} (alpha+2q)(2j-2q), so that (-Delta_gamma)^l K_0 = C_l K_l.
double recursion_coefficient(const ExtensionParams& p, int level);

struct IdentityReport {
    std::string id;
    std::string params;
    double left = 0.0;
    double right = 0.0;
    double residual = 0.0;
    double resolution = 0.0;
    double order = 0.0;  // NaN when no refinement pair applies
    double tail = 0.0;   // truncation estimate where a domain is cut off
};

double relative_residual(double left, double right);

/// sum_i w_i |(x - x_i, xi)|^{-(alpha + 2 level)} for xi > 0.
class PointSourceKernel {
public:
    PointSourceKernel(int dim, double alpha, int level, std::vector<std::vector<double>> points,
                      std::vector<double> weights);

    int dim() const { return dim_; }
    int level() const { return level_; }
    double alpha() const { return alpha_; }
    double beta() const { return alpha_ + 2 * level_; }
    PointSourceKernel at_level(int level) const;

    double value(const HalfPoint& z) const;
    /// Partial derivative along axes (0..d-1 spatial, d = xi), any order.
    double derivative(const HalfPoint& z, std::span<const int> axes) const;
    /// Delta_{(x,xi)} + (gamma/xi) d_xi in closed form.
    double delta_gamma(const HalfPoint& z, double gamma) const;

    const std::vector<std::vector<double>>& points() const { return points_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    int dim_;
    double alpha_;
    int level_;
    std::vector<std::vector<double>> points_;
    std::vector<double> weights_;
};

/// Random cloud of up to `count` sources in the unit cube with signed weights.
PointSourceKernel random_sources(int dim, double alpha, int count, std::mt19937_64& rng);

/// Velocity field u = c + L x + sum_m a_m sin(k_m . x + phase_m) with closed-form derivatives.
struct SmoothVelocity {
    struct Mode {
        std::vector<double> k;
        std::vector<double> amplitude;
        double phase = 0.0;
    };
    int dim = 1;
    std::vector<double> constant;
    std::vector<std::vector<double>> linear;
    std::vector<Mode> modes;

    static SmoothVelocity zero(int dim);
    static SmoothVelocity random(int dim, int mode_count, std::mt19937_64& rng);

    /// Delta_x^laplacian_power d_{axes} u_component at x.
    double derivative(int component, std::span<const int> axes, int laplacian_power,
                      std::span<const double> x) const;
};

/// Finite-difference Delta_gamma of an evaluator at z with step delta (second order).
template <class F>
double delta_gamma_fd(F&& f, const HalfPoint& z, int dim, double gamma, double delta);

/// Closed-form check of Delta_gamma K_l = -(alpha+2l)(2j-2l) K_{l+1} at z; level in 0..j-1.
IdentityReport recursion_residual(const PointSourceKernel& src, int level, const ExtensionParams& p,
                                  const HalfPoint& z);
/// Same identity with Delta_gamma by central differences at steps delta and delta/2.
IdentityReport recursion_residual_fd(const PointSourceKernel& src, int level, const ExtensionParams& p,
                                     const HalfPoint& z, double delta);
/// Delta_gamma^l K = (-1)^l C_l K_l with the left side by nested differences in quad precision.
IdentityReport iterated_recursion_residual(const PointSourceKernel& src, int level, const ExtensionParams& p,
                                           const HalfPoint& z, double delta);

/// Leibniz expansion of Delta_gamma^m ((u,0).grad K); the left side by nested differences
/// in quad precision at steps delta and delta/2, the right side in closed form.
IdentityReport leibniz_residual(int m, const SmoothVelocity& u, const PointSourceKernel& src,
                                const ExtensionParams& p, const HalfPoint& z, double delta);
/// Closed-form right side of the Leibniz expansion.
double leibniz_rhs(int m, const SmoothVelocity& u, const PointSourceKernel& src, const ExtensionParams& p,
                   const HalfPoint& z);

/// d_xi K / xi against Delta_gamma K / 2 (requires j = 1).
IdentityReport xi_half_relation_residual(const PointSourceKernel& src, const ExtensionParams& p,
                                         const HalfPoint& z);

// ---------------------------------------------------------------------------
// Gridded half-space fields.

struct HalfSpaceField {
    GridSpec xgrid;
    int n_xi = 32;
    double xi_max = 1.0;
    double gamma = 0.0;
    std::vector<double> values;  // index = x_flat * n_xi + q

    HalfSpaceField() = default;
    HalfSpaceField(const GridSpec& g, int n_xi, double xi_max, double gamma);
    double dxi() const { return xi_max / n_xi; }
    double xi(int q) const { return (q + 0.5) * dxi(); }
    double& at(std::size_t x, int q) { return values[x * n_xi + q]; }
    double at(std::size_t x, int q) const { return values[x * n_xi + q]; }
};

/// Sample fn(x, xi) on the grid.
template <class F>
HalfSpaceField sample_half_space(const GridSpec& g, int n_xi, double xi_max, double gamma, F&& fn);

/// Second-order central stencil for Delta_gamma; x is periodic, cells with q < 2 or
/// q > n_xi - 3 are left NaN.
HalfSpaceField delta_gamma_apply(const HalfSpaceField& f);
/// Divergence form xi^-gamma div(xi^gamma grad f) on the same stencil footprint.
HalfSpaceField divergence_form_apply(const HalfSpaceField& f);

/// sum over cells of f * (int_cell xi^exponent dxi) * h^d; NaN cells are rejected.
double weighted_integral(const HalfSpaceField& f, double exponent);

// ---------------------------------------------------------------------------
// Integral identities on mollified atoms g = sum_a w_a G_{sigma_a}.

struct Atom {
    double sigma = 1.0;
    double weight = 1.0;
};

struct QuadratureSpec {
    int n_r = 240;
    int n_xi = 240;
    double radius = 40.0;  // truncation in r and xi
    double core = 0.5;     // grading scale of the sinh-mapped cells
};

/// int g K*g dx in closed form (raw kernel).
double atom_interaction(const std::vector<Atom>& atoms, double alpha, int dim);

/// Normalisation kappa/c_{d,alpha}: the extended representation equals this factor times int g K*g.
double representation_factor(const ExtensionParams& p);

enum class IdentityId { WeightedIBP, EnergyRewrite, HessianSplit, XiDerivative, EnergyRepOdd, EnergyRepEven, Polyharmonic };

std::string to_string(IdentityId id);

struct IdentityConfig {
    double alpha = 0.5;
    int dim = 3;
    std::vector<Atom> atoms{{0.5, 1.0}, {1.0, -1.0}};
    QuadratureSpec quadrature{};
    // Grid identities.
    int n_x = 32;
    int n_xi = 64;
    double xi_max = 6.0;
    // Polyharmonic.
    int poly_m = 2;
    int poly_n = 8;
    std::uint64_t seed = 1;
};

/// Runs one identity at the configured resolution and at half of it, reporting the order.
IdentityReport identity_residual(IdentityId id, const IdentityConfig& config);

/// Measured ratio int xi^g |grad^2 K_l|^2 / int xi^g |Delta_gamma K_l|^2 (claim with p = 2),
/// expected 1 - gamma/(2j-2l)^2.
IdentityReport hessian_ratio(const ExtensionParams& p, int level, const std::vector<Atom>& atoms,
                             const QuadratureSpec& q);
/// The p = 2 product-form inequality: left <= (1 - gamma/(2j-2l)^2) right.
IdentityReport product_inequality(const ExtensionParams& p, int level, const std::vector<Atom>& atoms,
                                  const QuadratureSpec& q);
/// int g K*g against int xi^gamma |Delta_gamma K|^2 / factor for j = 1, with Delta_gamma
/// assembled from second derivatives.
IdentityReport energy_rewrite(const ExtensionParams& p, const std::vector<Atom>& atoms, const QuadratureSpec& q);
/// Extended weighted norm / factor against int g K*g (odd or even j).
IdentityReport energy_representation(const ExtensionParams& p, const std::vector<Atom>& atoms,
                                     const QuadratureSpec& q);

// ---------------------------------------------------------------------------
// Polyharmonic case and functional-inequality probes (periodic grids).

/// int (K*rho) rho against (1/c) ||(-Delta)^{m/2} K*rho||^2 (or the gradient form for odd m),
/// with alpha = d - 2m. Flags m = 1 (Coulomb boundary) in params.
IdentityReport polyharmonic_residual(int dim, int m, const ScalarField& rho);

/// ||grad^k(fg) - f grad^k g||_2 / (||grad^{k-1} f||_2 (||grad g||_inf + ||grad^k g||_{d/(k-1)})).
double moser_ratio(const ScalarField& f, const ScalarField& g, int k);
/// ||f||_{d/k} / ||grad f||_{d/(k+1)} for mean-zero f, k + 1 < d.
double gn_ratio(const ScalarField& f, int k);

}  // namespace modlab

#include "modlab/extension_ops_impl.hpp"
