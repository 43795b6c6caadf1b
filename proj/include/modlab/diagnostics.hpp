#pragma once

#include <span>
#include <string>
#include <vector>

#include "modlab/grid.hpp"
#include "modlab/kinetic_solver.hpp"
#include "modlab/limit_solvers.hpp"

namespace modlab {

struct EnergyReport {
    double t = 0.0;
    double eps = 0.0;
    double mke = 0.0;    // int int |v - u|^2 f
    double mie = 0.0;    // 1/2 int (rho - rho_eps) K*(rho - rho_eps)
    double rel_h = 0.0;  // int H(rho_eps | rho)
    double rel_e = 0.0;  // int E(U_eps | U)
    double w1 = 0.0;
    double bl_ub = 0.0;
    double free_energy = 0.0;
    double dissipation = 0.0;
};

/// int int |v - u(x)|^2 f by the midpoint rule.
double modulated_kinetic_energy(const PhaseField& f, const VectorField& u);
double modulated_kinetic_energy(const PhaseField& f, std::span<const double> u);

/// int [rhobar log rhobar - rho log rho - (1 + log rho)(rhobar - rho)]; rejects rho <= 0.
double relative_entropy_density(const ScalarField& rhobar, const ScalarField& rho);

/// int E(Ubar | U) from the closed form rhobar |ubar - u|^2 / 2 + c_P H(rhobar | rho).
double relative_entropy_macro(const MacroState& bar, const MacroState& ref);
/// The same quantity from E(Ubar) - E(U) - DE(U)(Ubar - U) with E = m^2/(2 rho) + c_P rho log rho.
double relative_entropy_macro_defining(const MacroState& bar, const MacroState& ref);

/// int |CDF_mu - CDF_nu| on the line through the grid nodes; masses must agree to 1e-10.
double wasserstein1_1d(const ScalarField& mu, const ScalarField& nu);
/// sum |mu - nu| h.
double total_variation(const ScalarField& mu, const ScalarField& nu);
/// min(W1, TV): an upper bound for d_BL between measures of equal mass.
double bl_upper_bound(const ScalarField& mu, const ScalarField& nu);
/// Upper bound for d_BL of signed measures of any masses on the torus:
/// |mass difference| + min_c int |G - c|, G the primitive of the mean-free part; capped by TV.
double signed_bl_upper_bound(const ScalarField& mu, const ScalarField& nu);
/// Upper bound for d_BL(f, rho (x) delta_u) on phase space:
/// min(int int |v - u| f + sqrt(1 + ||u'||^2) W1(rho_f, rho), mass(f) + mass(rho)).
double phase_bl_upper_bound(const PhaseField& f, const ScalarField& rho, const ScalarField& u);

struct RateFit {
    std::vector<double> eps;
    std::vector<double> values;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool reliable() const { return r2 >= 0.9; }
};

/// Least-squares slope of log(value) against log(eps). Needs >= 4 strictly decreasing eps and
/// positive values.
RateFit fit_rate(std::vector<double> eps, std::vector<double> values);

struct InequalityCheck {
    std::string item;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds() const { return lhs <= rhs + 1e-12 * (1.0 + std::abs(rhs)); }
};

/// Lemma suite for the mono-kinetic limit, items (i) moments and (ii) phase-space distance.
/// d_BL is bounded above on the left and replaced by W1 on the right; constants are explicit
/// in ||u||_inf and ||u'||_inf.
std::vector<InequalityCheck> small_inertia_lemma_suite(const PhaseField& f, const ScalarField& rho,
                                                       const ScalarField& u);
/// Lemma suite for the hydrodynamic limit, items (i)-(v); (iv) only for c_P = 1.
std::vector<InequalityCheck> hydro_lemma_suite(const PhaseField& f, const ScalarField& rho, const ScalarField& u,
                                               double pressure);

/// max |u| and max |u'| (spectral derivative) on the torus.
double sup_norm(const ScalarField& u);
double derivative_sup_norm(const ScalarField& u);

}  // namespace modlab
