#pragma once

#include <string>
#include <vector>

#include "modlab/grid.hpp"
#include "modlab/kinetic_solver.hpp"
#include "modlab/spectral_riesz.hpp"

namespace modlab::harness {

/// Gaussian bump of width 0.5 centred at 0 on a floor of 1e-3 of its peak, total mass 0.4.
/// The limit grid samples it; the kinetic density is its conservative restriction, so the
/// initial modulated interaction energy vanishes up to round-off.
struct Preset {
    std::string id;
    std::string description;
    bool derived_velocity = true;  // u0 = -(1/gamma) d_x K*rho0, otherwise u0 = 0
    bool unit_width = false;       // Maxwellian of variance 1, otherwise variance eps
    bool monokinetic = false;      // rho0 deposited at u0 (no thermal width)
    std::vector<Regime> regimes;

    bool supports(Regime r) const;
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& id);

struct InitialData {
    ScalarField rho_fine;
    ScalarField u_fine;  // at the fine nodes
    ScalarField rho;     // kinetic grid, restricted
    ScalarField u;       // kinetic grid, fine value at the node
    double u_max = 0.0;
};

InitialData make_initial_data(const Preset& preset, const GridSpec& coarse, int refine, const KernelParams& kernel,
                              double gamma);

/// Velocity half-width: thermal tails to 7 sigma (8.5 for unit width) beyond max|u0| plus a
/// 0.25 margin for the narrow presets.
double preset_v_max(const Preset& preset, double u_max, double eps);

PhaseField initial_kinetic_state(const Preset& preset, const InitialData& data, const PhaseGrid& grid, double eps);

}  // namespace modlab::harness
