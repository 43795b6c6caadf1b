#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "modlab/grid.hpp"
#include "modlab/spectral_riesz.hpp"

namespace modlab {

class Fft;

/// Periodic x in [-L/2, L/2) with n_x cells centred at (i - n_x/2) dx; velocity cells
/// centred at -V + (j + 1/2) dv on [-V, V].
struct PhaseGrid {
    int n_x = 128;
    double length = 4.0;
    int n_v = 128;
    double v_max = 4.0;

    double dx() const { return length / n_x; }
    double dv() const { return 2.0 * v_max / n_v; }
    double x(int i) const { return (i - n_x / 2) * dx(); }
    double v(int j) const { return -v_max + (j + 0.5) * dv(); }
    std::size_t size() const { return static_cast<std::size_t>(n_x) * n_v; }
    GridSpec space() const { return {1, n_x, length}; }
    void validate() const;

    bool operator==(const PhaseGrid&) const = default;
};

class PhaseField {
public:
    PhaseField() = default;
    explicit PhaseField(const PhaseGrid& grid);
    PhaseField(const PhaseGrid& grid, std::vector<double> values);

    const PhaseGrid& grid() const { return grid_; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    double& at(int i, int j) { return values_[static_cast<std::size_t>(i) * grid_.n_v + j]; }
    double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * grid_.n_v + j]; }
    std::span<double> row(int i) { return {values_.data() + static_cast<std::size_t>(i) * grid_.n_v, static_cast<std::size_t>(grid_.n_v)}; }
    std::span<const double> row(int i) const { return {values_.data() + static_cast<std::size_t>(i) * grid_.n_v, static_cast<std::size_t>(grid_.n_v)}; }

    double mass() const;
    double min_value() const;

private:
    PhaseGrid grid_;
    std::vector<double> values_;
};

enum class Regime { small_inertia, hydro_sigma0, hydro_sigma_eps };

std::string to_string(Regime r);
Regime parse_regime(const std::string& name);

/// x-slopes of the transport reconstruction. `coherent` gives every velocity row of a cell the
/// relative slope of the MC-limited density, so near mono-kinetic states (rows narrower than the
/// velocity change across a cell) are advected like a MUSCL density. `per_row` limits each row on
/// its own and is second order for data smooth in x at fixed v.
enum class SlopeRule { coherent, per_row };

std::string to_string(SlopeRule r);
SlopeRule parse_slope_rule(const std::string& name);

struct KineticConfig {
    double eps = 0.1;
    double gamma = 1.0;
    KernelParams kernel{};
    Regime regime = Regime::small_inertia;
    double dt = 1e-3;
    double t_end = 1.0;
    double cfl = 1.0;
    SlopeRule slopes = SlopeRule::coherent;
    /// Permitted cumulative mass leaving [-V, V], relative to the total.
    double flux_tolerance = 1e-8;

    /// c_P: 1 in the diffusive hydrodynamic regime, 0 otherwise.
    double pressure() const { return regime == Regime::hydro_sigma_eps ? 1.0 : 0.0; }
    /// Throws CflViolation when dt > cfl dx / V, invalid_argument on nonpositive eps, gamma, dt.
    void validate(const PhaseGrid& grid) const;
};

struct Moments {
    ScalarField rho;
    ScalarField momentum;
    ScalarField second;

    /// momentum / rho, zero where rho <= 1e-300.
    ScalarField velocity() const;
};

/// Midpoint velocity quadrature.
Moments moments(const PhaseField& f);

/// v e^{-g dt/eps} - (F/g)(1 - e^{-g dt/eps}): the characteristic of v' = -(g v + F)/eps.
double exact_damped_velocity_update(double v, double force, double gamma, double eps, double dt);

/// Substep bookkeeping; integrals are along the exact substep characteristics.
struct StepRecord {
    double boundary_flux = 0.0;
    /// (g/eps) int int v^2 f dt for small inertia, g int int v^2 f dt for the hydro drift.
    double damping_work = 0.0;
    /// (1/eps) int D dt over the relaxation substeps.
    double relaxation_dissipation = 0.0;
    /// Mass-weighted variance excess where the requested variance was below the grid floor.
    double variance_defect = 0.0;

    StepRecord& operator+=(const StepRecord& o);
};

/// Owns one kinetic state and its scratch buffers; single-threaded.
class KineticSolver {
public:
    KineticSolver(PhaseField initial, KineticConfig config);
    ~KineticSolver();
    KineticSolver(KineticSolver&&) noexcept;

    const PhaseField& state() const { return f_; }
    const KineticConfig& config() const { return config_; }
    double time() const { return time_; }
    double cumulative_flux() const { return flux_; }

    /// One Strang step of length config().dt for the configured regime.
    /// Throws BoundaryLoss when the cumulative velocity-edge flux exceeds the tolerance.
    StepRecord step();

    /// Conservative flux-form semi-Lagrangian shift of every velocity row by v tau.
    void transport(double tau);
    /// d_x K*rho of the current density at the cell centres.
    std::vector<double> cell_force() const;
    /// d_x K*rho of the current density at the faces x_i + dx/2 (entry i).
    std::vector<double> face_force() const;
    /// Exact damped map v' = -(g v + F)/rate over tau with the force frozen (rate = eps for
    /// small inertia, 1 for the hydro drift); one force value per cell.
    StepRecord damped_substep(double tau, std::span<const double> force, double rate);
    /// The damped map driven by face forces. Each cell relaxes toward the velocity that empties
    /// it through its outflow faces as an upwind flux would: the downwind face velocity when
    /// both faces point the same way, rest between two inflow faces, and a quantile split of
    /// the row between the two faces of a cell that both faces drain.
    StepRecord upwind_damped_substep(double tau, std::span<const double> face_force, double rate);
    /// Relaxation toward the local mean: OU (c_P = 1) or pure contraction (c_P = 0).
    StepRecord relaxation_substep(double tau);

private:
    PhaseField f_;
    KineticConfig config_;
    double time_ = 0.0;
    double flux_ = 0.0;
    std::vector<double> scratch_;
    std::vector<double> slopes_;
    // Velocity convolution for the OU substep, rebuilt when the kernel changes.
    std::unique_ptr<Fft> conv_fft_;
    std::vector<double> kernel_;
    std::vector<std::complex<double>> kernel_hat_;
};

/// One step from f under config (constructs a solver; for tests and one-off use).
PhaseField step_small_inertia(const PhaseField& f, const KineticConfig& config);
PhaseField step_hydro(const PhaseField& f, const KineticConfig& config);

/// 1/2 int int v^2 f + (1/2eps) int rho K*rho for small inertia; otherwise
/// c_P int int f log f + 1/2 int int v^2 f + 1/2 int rho K*rho.
double free_energy_kinetic(const PhaseField& f, const KineticConfig& config);
/// int int (1/f)|c_P d_v f - f(u - v)|^2 with u the local mean velocity; c_P from the regime.
double dissipation(const PhaseField& f, const KineticConfig& config);
double dissipation(const PhaseField& f, double pressure);
/// int int f log f with a 1e-300 floor; throws domain_error if f < -1e-10 anywhere.
double entropy(const PhaseField& f);
/// 1/2 int int v^2 f.
double kinetic_energy(const PhaseField& f);

/// rho(x) times a normalised discrete Gaussian in v of mean u(x) and the given variance.
/// Each velocity row carries exactly rho(x) dv-mass.
PhaseField local_maxwellian(const PhaseGrid& grid, std::span<const double> rho, std::span<const double> u,
                            double variance);
/// rho(x) deposited at v = u(x) by cloud-in-cell.
PhaseField monokinetic(const PhaseGrid& grid, std::span<const double> rho, std::span<const double> u);

/// Discrete Gaussian weights w_k, |k| <= half_width, sum 1, with sum k^2 w_k dv^2 = variance.
std::vector<double> discrete_gaussian_kernel(double variance, double dv, int max_half_width);

}  // namespace modlab
