#pragma once

#include <random>
#include <span>

#include "modlab/grid.hpp"

namespace modlab {

enum class Normalization { raw, coulomb };

/// free_space: compactly supported data, exact zero-padded convolution against the
/// tabulated kernel. periodic: torus semantics through the Fourier symbol with the
/// zero mode dropped.
enum class Boundary { free_space, periodic };

struct KernelParams {
    double alpha = 0.5;
    int dim = 1;
    Normalization normalization = Normalization::raw;

    void validate() const;
    /// Multiplier applied to |x|^-alpha (1 for raw, 1/c_{d,alpha} for coulomb).
    double kernel_scale() const;
};

/// c_{d,alpha} in  FT(|x|^-alpha)(k) = c_{d,alpha} |k|^{alpha-d}.
double riesz_constant(int dim, double alpha);

/// Fourier multiplier of the (scaled) kernel at wavevector k; 0 at k = 0.
double riesz_symbol(const KernelParams& params, std::span<const double> k);

/// Mean of |x|^-alpha over the cube [-h/2, h/2]^d.
double singular_cell_average(int dim, double alpha, double h);

ScalarField riesz_convolve(const ScalarField& rho, const KernelParams& params,
                           Boundary boundary = Boundary::free_space);
VectorField riesz_gradient(const ScalarField& rho, const KernelParams& params,
                           Boundary boundary = Boundary::free_space);

/// 1/2 int rho K*rho dx.
double interaction_energy(const ScalarField& rho, const KernelParams& params,
                          Boundary boundary = Boundary::free_space);

struct ModulatedEnergy {
    double value = 0.0;
    bool mass_mismatch = false;
};

/// 1/2 int (rho - rhobar) K*(rho - rhobar) dx by Parseval on the torus.
ModulatedEnergy modulated_interaction_energy(const ScalarField& rho, const ScalarField& rhobar,
                                             const KernelParams& params);

/// Explicit O(N^2) sum against the same kernel table as the free-space path.
ScalarField direct_convolution_oracle(const ScalarField& rho, const KernelParams& params);

struct CommutatorRatio {
    double lhs = 0.0;
    double energy = 0.0;
    double ratio = 0.0;
};

/// lhs = int (rho-rhobar) u . grad K*(rho-rhobar), energy = int (rho-rhobar) K*(rho-rhobar),
/// both on the torus.
CommutatorRatio commutator_bound_ratio(const ScalarField& rho, const ScalarField& rhobar,
                                       const VectorField& u, const KernelParams& params);

/// Fraction of |rho| mass lying outside the central half-box.
double support_leakage(const ScalarField& rho);

/// max over grid points of the nuclear norm (sum of singular values) of grad u.
double gradient_sup_norm(const VectorField& u);

/// Spectral gradient of a periodic field.
VectorField periodic_gradient(const ScalarField& f);

/// Random real trigonometric polynomial with integer modes |m|_inf <= max_mode and
/// amplitudes decaying like 1/(1+|m|^2).
ScalarField band_limited_field(const GridSpec& g, int max_mode, std::mt19937_64& rng);

}  // namespace modlab
