#pragma once

#include <span>
#include <vector>

#include "modlab/grid.hpp"
#include "modlab/spectral_riesz.hpp"

namespace modlab {

/// Density and velocity of a limit system on the 1-d torus.
struct MacroState {
    ScalarField rho;
    VectorField u;
    double pressure = 0.0;  // c_P
    double gamma = 1.0;

    const ScalarField& velocity() const { return u.components.at(0); }
    ScalarField momentum() const;
};

MacroState make_macro_state(ScalarField rho, ScalarField u, double pressure, double gamma);

/// u = -(1/gamma) d_x K*rho on the torus (cell centres).
VectorField aggregation_velocity(const ScalarField& rho, const KernelParams& params, double gamma);
/// The same velocity at the faces x_i + h/2 by a spectral half-cell shift.
std::vector<double> aggregation_face_velocity(const ScalarField& rho, const KernelParams& params, double gamma);

/// Velocity with which an upwind flux empties a cell, from its left and right face velocities:
/// the downwind face value when both point the same way, 0 between two inflow faces, and
/// left + right (the mean of a split into both outflows) when both faces drain the cell.
double upwind_cell_velocity(double left, double right);
/// The same per cell; entry i of `face` is the velocity at x_i + h/2.
std::vector<double> upwind_cell_velocity(std::span<const double> face);

/// Largest stable step for the explicit aggregation update: the Courant bound max|u| dt/h <= 1/2
/// and the linearised fractional-diffusion bound of the face-velocity upwind scheme.
double aggregation_stable_dt(const ScalarField& rho, const KernelParams& params, double gamma);

/// One conservative finite-volume step of d_t rho + d_x(rho u) = 0, u from the face velocity.
/// First-order upwind (forward Euler) or MUSCL with MC slopes (SSP-RK2). Throws CflViolation
/// when max|u| dt / h > 1.
ScalarField step_aggregation(const ScalarField& rho, double dt, const KernelParams& params, double gamma,
                             bool muscl = false);

/// Largest step with dt max(|u| + sqrt(c_P)) / h <= cfl.
double euler_riesz_stable_dt(const MacroState& state, double cfl);

/// One step of the damped Euler-Riesz system: local Lax-Friedrichs flux for the convective and
/// pressure part, explicit Riesz force source, exact damping factor e^{-gamma dt} (Strang).
/// First order (forward Euler) or MUSCL on (rho, u) with SSP-RK2. Throws CflViolation.
MacroState step_euler_riesz(const MacroState& state, double dt, const KernelParams& params, bool muscl = false);

/// e = (u_after - u_before)/dt + u du/dx at the midpoint velocity (spectral derivative).
VectorField error_field_e(const MacroState& before, const MacroState& after, double dt);

/// Conservative restriction from a grid refined by `factor` (even) to the coarse cells:
/// fine nodes strictly inside a coarse cell count fully, the two on its faces by half.
ScalarField restrict_average(const ScalarField& fine, int factor);
/// Fine values at the coarse nodes.
ScalarField restrict_sample(const ScalarField& fine, int factor);
/// Fine values at the coarse faces x_i + H/2 (factor even).
std::vector<double> restrict_face_sample(const ScalarField& fine, int factor);

}  // namespace modlab
