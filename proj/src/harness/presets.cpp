#include "modlab/harness/presets.hpp"

#include <algorithm>
#include <cmath>

#include "modlab/limit_solvers.hpp"

namespace modlab::harness {

namespace {

constexpr double bump_width = 0.5;
constexpr double bump_mass = 0.4;
constexpr double bump_floor = 1e-3;

}  // namespace

bool Preset::supports(Regime r) const { return std::find(regimes.begin(), regimes.end(), r) != regimes.end(); }

const std::vector<Preset>& presets()
{
    static const std::vector<Preset> all{
        {"bump-inertia-v1", "bump, u0 from the aggregation velocity, Maxwellian of variance eps", true, false, false,
         {Regime::small_inertia}},
        {"bump-monokinetic-v1", "bump, u0 from the aggregation velocity, mono-kinetic", true, false, true,
         {Regime::small_inertia}},
        {"bump-hydro-v1", "bump, u0 from the aggregation velocity, unit Maxwellian", true, true, false,
         {Regime::hydro_sigma0, Regime::hydro_sigma_eps}},
        {"bump-hydro-rest-v1", "bump at rest, unit Maxwellian", false, true, false,
         {Regime::hydro_sigma0, Regime::hydro_sigma_eps}},
    };
    return all;
}

const Preset* find_preset(const std::string& id)
{
    for (const auto& p : presets())
        if (p.id == id) return &p;
    return nullptr;
}

InitialData make_initial_data(const Preset& preset, const GridSpec& coarse, int refine, const KernelParams& kernel,
                              double gamma)
{
    const GridSpec fine{1, coarse.n * refine, coarse.length};
    InitialData d;
    d.rho_fine = sample(fine, [](std::span<const double> x) {
        return std::exp(-x[0] * x[0] / (2 * bump_width * bump_width)) + bump_floor;
    });
    d.rho_fine *= bump_mass / d.rho_fine.mass();
    d.u_fine = preset.derived_velocity ? aggregation_velocity(d.rho_fine, kernel, gamma).components[0]
                                       : ScalarField(fine);
    d.rho = restrict_average(d.rho_fine, refine);
    d.u = restrict_sample(d.u_fine, refine);
    d.u_max = d.u.max_abs();
    return d;
}

double preset_v_max(const Preset& preset, double u_max, double eps)
{
    if (preset.unit_width) return u_max + 8.5;
    return u_max + 7.0 * std::sqrt(eps) + 0.25;
}

PhaseField initial_kinetic_state(const Preset& preset, const InitialData& data, const PhaseGrid& grid, double eps)
{
    if (preset.monokinetic) return monokinetic(grid, data.rho.values(), data.u.values());
    return local_maxwellian(grid, data.rho.values(), data.u.values(), preset.unit_width ? 1.0 : eps);
}

}  // namespace modlab::harness
