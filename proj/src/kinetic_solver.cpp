#include "modlab/kinetic_solver.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cstdint>
#include <cmath>
#include <complex>
#include <fmt/format.h>
#include <stdexcept>

#include "modlab/errors.hpp"
#include "modlab/fft.hpp"
#include "modlab/limit_solvers.hpp"

namespace modlab {

void PhaseGrid::validate() const
{
    if (n_x < 4 || n_v < 4) throw std::invalid_argument("phase grid needs n_x, n_v >= 4");
    if (!(length > 0.0) || !(v_max > 0.0)) throw std::invalid_argument("phase grid needs L > 0 and V > 0");
}

PhaseField::PhaseField(const PhaseGrid& grid) : grid_(grid), values_(grid.size(), 0.0) { grid.validate(); }

PhaseField::PhaseField(const PhaseGrid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values))
{
    grid.validate();
    if (values_.size() != grid.size()) throw std::invalid_argument("phase field size does not match grid");
}

double PhaseField::mass() const
{
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.dx() * grid_.dv();
}

double PhaseField::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

std::string to_string(Regime r)
{
    switch (r) {
    case Regime::small_inertia: return "small-inertia";
    case Regime::hydro_sigma0: return "hydro-sigma0";
    case Regime::hydro_sigma_eps: return "hydro-sigma-eps";
    }
    return "?";
}

Regime parse_regime(const std::string& name)
{
    for (Regime r : {Regime::small_inertia, Regime::hydro_sigma0, Regime::hydro_sigma_eps})
        if (to_string(r) == name) return r;
    throw std::invalid_argument("unknown regime '" + name + "'");
}

std::string to_string(SlopeRule r) { return r == SlopeRule::coherent ? "coherent" : "per-row"; }

SlopeRule parse_slope_rule(const std::string& name)
{
    for (SlopeRule r : {SlopeRule::coherent, SlopeRule::per_row})
        if (to_string(r) == name) return r;
    throw std::invalid_argument("unknown slope rule '" + name + "'");
}

void KineticConfig::validate(const PhaseGrid& grid) const
{
    if (!(eps > 0.0) || !(gamma > 0.0) || !(dt > 0.0) || !(cfl > 0.0))
        throw std::invalid_argument("eps, gamma, dt and cfl must be positive");
    if (kernel.dim != 1) throw std::invalid_argument("kinetic runs are one-dimensional");
    kernel.validate();
    const double limit = cfl * grid.dx() / grid.v_max;
    if (dt > limit * (1.0 + 1e-12))
        throw CflViolation(fmt::format("dt = {:.6g} exceeds cfl dx / V = {:.6g}", dt, limit));
}

ScalarField Moments::velocity() const
{
    ScalarField u(rho.grid());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = rho[i] > 1e-300 ? momentum[i] / rho[i] : 0.0;
    return u;
}

Moments moments(const PhaseField& f)
{
    const auto& g = f.grid();
    Moments m{ScalarField(g.space()), ScalarField(g.space()), ScalarField(g.space())};
    for (int i = 0; i < g.n_x; ++i) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (int j = 0; j < g.n_v; ++j) {
            const double w = f.at(i, j), v = g.v(j);
            s0 += w;
            s1 += w * v;
            s2 += w * v * v;
        }
        m.rho[i] = s0 * g.dv();
        m.momentum[i] = s1 * g.dv();
        m.second[i] = s2 * g.dv();
    }
    return m;
}

double exact_damped_velocity_update(double v, double force, double gamma, double eps, double dt)
{
    const double a = std::exp(-gamma * dt / eps);
    return v * a - (force / gamma) * (1.0 - a);
}

StepRecord& StepRecord::operator+=(const StepRecord& o)
{
    boundary_flux += o.boundary_flux;
    damping_work += o.damping_work;
    relaxation_dissipation += o.relaxation_dissipation;
    variance_defect += o.variance_defect;
    return *this;
}

namespace {

struct RowMoments {
    double mass = 0.0;
    double mean = 0.0;
    double var = 0.0;
};

RowMoments row_moments(std::span<const double> row, const PhaseGrid& g)
{
    double s0 = 0.0, s1 = 0.0;
    for (int j = 0; j < g.n_v; ++j) {
        s0 += row[j];
        s1 += row[j] * g.v(j);
    }
    RowMoments m;
    m.mass = s0 * g.dv();
    if (std::abs(s0) < 1e-300) return m;
    m.mean = s1 / s0;
    double s2 = 0.0;
    for (int j = 0; j < g.n_v; ++j) {
        const double d = g.v(j) - m.mean;
        s2 += row[j] * d * d;
    }
    m.var = std::max(0.0, s2 / s0);
    return m;
}

struct RemapOutcome {
    double flux = 0.0;    // mass (per unit x) whose image left [-V, V]
    double defect = 0.0;  // achieved minus requested variance when the floor binds
};

// Cloud-in-cell deposit of the affine image y_j = target_mean + lambda (v_j - mean) of one
// velocity row. lambda is chosen by bisection so that the deposited variance equals the
// requested one; the deposit keeps the mean exactly, so both moments follow the continuous
// map. Images beyond the outer cell centres are folded into the edge cells.
RemapOutcome affine_remap(std::span<double> row, const PhaseGrid& g, const RowMoments& mo, double target_mean,
                          double target_var, std::vector<double>& out)
{
    RemapOutcome result;
    if (std::abs(mo.mass) < 1e-300) return result;
    const int n = g.n_v;
    const double dv = g.dv(), v0 = g.v(0);
    // Entries below 1e-20 of the row maximum change the variance by far less than rounding;
    // the root search skips them, the deposit does not.
    const double peak = *std::max_element(row.begin(), row.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
    const double cut = 1e-20 * std::abs(peak);
    int first = 0, last = n - 1;
    while (first < last && std::abs(row[first]) <= cut) ++first;
    while (last > first && std::abs(row[last]) <= cut) --last;
    auto position = [&](int j, double lambda) {
        const double t = (target_mean + lambda * (g.v(j) - mo.mean) - v0) / dv;
        return std::clamp(t, 0.0, static_cast<double>(n - 1));
    };
    auto deposited_var = [&](double lambda) {
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (int j = first; j <= last; ++j) {
            const double w = row[j];
            const double t = position(j, lambda);
            const double p = t - std::floor(t);
            s0 += w;
            s1 += w * t;
            s2 += w * (t * t + p * (1.0 - p));
        }
        return (s2 / s0 - (s1 / s0) * (s1 / s0)) * dv * dv;
    };

    double lambda = 0.0;
    const double floor_var = deposited_var(0.0);
    if (target_var > floor_var && mo.var > 0.0) {
        // Cloud-in-cell adds between 0 and dv^2/4 to lambda^2 s, which brackets the root.
        double lo = std::sqrt(std::max(0.0, target_var - 0.25 * dv * dv) / mo.var);
        double hi = std::sqrt(target_var / mo.var);
        if (deposited_var(lo) > target_var) lo = 0.0;
        for (int it = 0; it < 30 && deposited_var(hi) < target_var; ++it) hi *= 1.5;
        auto residual = [&](double l) { return deposited_var(l) - target_var; };
        std::uintmax_t iterations = 100;
        const auto root = boost::math::tools::toms748_solve(residual, lo, hi, residual(lo), residual(hi),
                                                            boost::math::tools::eps_tolerance<double>(40),
                                                            iterations);
        lambda = 0.5 * (root.first + root.second);
    } else {
        result.defect = std::max(0.0, floor_var - target_var) * mo.mass;
    }

    std::fill(out.begin(), out.end(), 0.0);
    for (int j = 0; j < n; ++j) {
        const double w = row[j];
        if (w == 0.0) continue;
        const double y = target_mean + lambda * (g.v(j) - mo.mean);
        if (std::abs(y) > g.v_max) result.flux += std::abs(w) * dv;
        const double t = position(j, lambda);
        int k = static_cast<int>(std::floor(t));
        double p = t - k;
        if (k >= n - 1) {
            k = n - 1;
            p = 0.0;
        }
        out[k] += w * (1.0 - p);
        if (p > 0.0) out[k + 1] += w * p;
    }
    std::copy(out.begin(), out.end(), row.begin());
    return result;
}

double minmod3(double a, double b, double c)
{
    if (a > 0.0 && b > 0.0 && c > 0.0) return std::min({a, b, c});
    if (a < 0.0 && b < 0.0 && c < 0.0) return std::max({a, b, c});
    return 0.0;
}

// Sum over the row of f log f + (v - u)^2 f / 2, times dv.
double row_relative_entropy(std::span<const double> row, const PhaseGrid& g, double u)
{
    double s = 0.0;
    for (int j = 0; j < g.n_v; ++j) {
        const double w = row[j], d = g.v(j) - u;
        s += w * std::log(std::max(w, 1e-300)) + 0.5 * d * d * w;
    }
    return s * g.dv();
}

}  // namespace

std::vector<double> discrete_gaussian_kernel(double variance, double dv, int max_half_width)
{
    if (!(variance > 0.0)) return {1.0};
    const double target = variance / (dv * dv);
    auto build = [&](double tau, std::vector<double>& w) {
        const int half = std::min(max_half_width, static_cast<int>(std::ceil(12.0 * tau)) + 1);
        w.assign(2 * half + 1, 0.0);
        double s0 = 0.0, s2 = 0.0;
        for (int k = -half; k <= half; ++k) {
            const double e = std::exp(-0.5 * k * k / (tau * tau));
            w[k + half] = e;
            s0 += e;
            s2 += e * k * k;
        }
        for (double& e : w) e /= s0;
        return s2 / s0;
    };
    std::vector<double> w;
    double lo = std::log(1e-3), hi = std::log(static_cast<double>(max_half_width));
    if (build(std::exp(hi), w) < target)
        throw std::domain_error(fmt::format("kernel variance {:.4g} exceeds the velocity window", variance));
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (build(std::exp(mid), w) < target ? lo : hi) = mid;
    }
    build(std::exp(0.5 * (lo + hi)), w);
    return w;
}

// ---------------------------------------------------------------------------

KineticSolver::KineticSolver(PhaseField initial, KineticConfig config)
    : f_(std::move(initial)), config_(config), scratch_(f_.grid().n_v), slopes_(f_.grid().size())
{
    config_.validate(f_.grid());
}

KineticSolver::~KineticSolver() = default;
KineticSolver::KineticSolver(KineticSolver&&) noexcept = default;

std::vector<double> KineticSolver::cell_force() const
{
    const auto grad = riesz_gradient(moments(f_).rho, config_.kernel, Boundary::periodic);
    const auto& c = grad.components[0].values();
    return {c.begin(), c.end()};
}

std::vector<double> KineticSolver::face_force() const
{
    // A cell-centred force paired with the upwind transport drives a grid-scale instability once
    // the velocity tracks -F stiffly; forces at the faces the mass actually crosses do not.
    return aggregation_face_velocity(moments(f_).rho, config_.kernel, -1.0);
}

void KineticSolver::transport(double tau)
{
    const auto& g = f_.grid();
    const int nx = g.n_x, nv = g.n_v;
    auto vals = f_.values();
    if (config_.slopes == SlopeRule::per_row) {
        for (int i = 0; i < nx; ++i) {
            const int im = (i + nx - 1) % nx, ip = (i + 1) % nx;
            for (int j = 0; j < nv; ++j) {
                const double fm = vals[im * nv + j], f0 = vals[i * nv + j], fp = vals[ip * nv + j];
                slopes_[i * nv + j] = minmod3(2.0 * (f0 - fm), 0.5 * (fp - fm), 2.0 * (fp - f0));
            }
        }
    } else {
        // |MC slope| <= 2 rho_i keeps every row's reconstruction nonnegative.
        std::vector<double> rho(nx, 0.0);
        for (int i = 0; i < nx; ++i)
            for (int j = 0; j < nv; ++j) rho[i] += vals[i * nv + j];
        for (int i = 0; i < nx; ++i) {
            const double rm = rho[(i + nx - 1) % nx], r0 = rho[i], rp = rho[(i + 1) % nx];
            const double rel = r0 > 0.0 ? minmod3(2.0 * (r0 - rm), 0.5 * (rp - rm), 2.0 * (rp - r0)) / r0 : 0.0;
            for (int j = 0; j < nv; ++j) slopes_[i * nv + j] = rel * vals[i * nv + j];
        }
    }
    std::vector<int> offset(nv);
    std::vector<double> theta(nv);
    for (int j = 0; j < nv; ++j) {
        const double s = g.v(j) * tau / g.dx();
        const double whole = std::floor(s);
        theta[j] = s - whole;
        const long shift = static_cast<long>(whole) + 1;
        offset[j] = static_cast<int>(((-shift) % nx + nx) % nx);
    }
    std::vector<double> next(g.size());
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < nv; ++j) {
            const int k0 = (i + offset[j]) % nx, k1 = (k0 + 1) % nx;
            const double th = theta[j], c = 0.5 * th * (1.0 - th);
            const double a = th * vals[k0 * nv + j] + c * slopes_[k0 * nv + j];
            const double b = (1.0 - th) * vals[k1 * nv + j] - c * slopes_[k1 * nv + j];
            next[i * nv + j] = a + b;
        }
    }
    std::copy(next.begin(), next.end(), vals.begin());
}

namespace {

// Damps part of a velocity row toward c by the exact characteristic map and returns the
// record, with the damping work (g/rate) int_0^tau int v(t)^2 f along v(t) = c + (v - c) a(t).
StepRecord damp_row(std::span<double> row, const PhaseGrid& g, double c, double a, double tau, double rate,
                    double gamma, std::vector<double>& scratch)
{
    StepRecord rec;
    const auto mo = row_moments(row, g);
    if (std::abs(mo.mass) < 1e-300) return rec;
    const double d = mo.mean - c;
    const double work = c * c * tau + 2.0 * c * d * (rate / gamma) * (1.0 - a) +
                        (mo.var + d * d) * (rate / (2.0 * gamma)) * (1.0 - a * a);
    rec.damping_work = (gamma / rate) * work * mo.mass * g.dx();
    const auto out = affine_remap(row, g, mo, a * mo.mean + (1.0 - a) * c, a * a * mo.var, scratch);
    rec.boundary_flux = out.flux * g.dx();
    rec.variance_defect = out.defect * g.dx();
    return rec;
}

}  // namespace

StepRecord KineticSolver::damped_substep(double tau, std::span<const double> force, double rate)
{
    const auto& g = f_.grid();
    const double gam = config_.gamma;
    const double a = std::exp(-gam * tau / rate);
    StepRecord rec;
    for (int i = 0; i < g.n_x; ++i) rec += damp_row(f_.row(i), g, -force[i] / gam, a, tau, rate, gam, scratch_);
    return rec;
}

StepRecord KineticSolver::upwind_damped_substep(double tau, std::span<const double> face_force, double rate)
{
    const auto& g = f_.grid();
    const int n = g.n_x, nv = g.n_v;
    const double gam = config_.gamma;
    const double a = std::exp(-gam * tau / rate);
    StepRecord rec;
    std::vector<double> lower(nv), upper(nv);
    for (int i = 0; i < n; ++i) {
        auto row = f_.row(i);
        const double left = -face_force[(i + n - 1) % n] / gam, right = -face_force[i] / gam;
        if (!(left < 0.0 && right > 0.0)) {
            rec += damp_row(row, g, upwind_cell_velocity(left, right), a, tau, rate, gam, scratch_);
            continue;
        }
        // Both faces drain the cell: the slower fraction -left / (right - left) of the row
        // heads left and the rest right, each at speed right - left, which reproduces both
        // upwind fluxes in the stiff limit.
        const double spread = right - left;
        double total = 0.0;
        for (double w : row) total += w;
        double need = total * (-left / spread);
        for (int j = 0; j < nv; ++j) {
            const double take = std::clamp(need, 0.0, row[j]);
            lower[j] = take;
            upper[j] = row[j] - take;
            need -= take;
        }
        rec += damp_row(lower, g, -spread, a, tau, rate, gam, scratch_);
        rec += damp_row(upper, g, spread, a, tau, rate, gam, scratch_);
        for (int j = 0; j < nv; ++j) row[j] = lower[j] + upper[j];
    }
    return rec;
}

StepRecord KineticSolver::relaxation_substep(double tau)
{
    const auto& g = f_.grid();
    const double a = std::exp(-tau / config_.eps);
    const bool diffusive = config_.pressure() > 0.0;
    StepRecord rec;

    std::vector<double> kernel;
    int half = 0;
    if (diffusive) {
        kernel = discrete_gaussian_kernel(1.0 - a * a, g.dv(), g.n_v);
        half = static_cast<int>(kernel.size() / 2);
        if (!conv_fft_ || kernel != kernel_) {
            int n = 1;
            while (n < g.n_v + 2 * half + 1) n *= 2;
            const int shape[] = {n};
            conv_fft_ = std::make_unique<Fft>(shape);
            auto buf = conv_fft_->data();
            std::fill(buf.begin(), buf.end(), 0.0);
            for (int k = -half; k <= half; ++k) buf[(k + n) % n] = kernel[k + half];
            conv_fft_->forward();
            kernel_hat_.assign(buf.begin(), buf.end());
            kernel_ = kernel;
        }
    }

    for (int i = 0; i < g.n_x; ++i) {
        auto row = f_.row(i);
        const auto mo = row_moments(row, g);
        if (std::abs(mo.mass) < 1e-300) continue;
        const double h_before = diffusive ? row_relative_entropy(row, g, mo.mean) : 0.0;
        const auto out = affine_remap(row, g, mo, mo.mean, a * a * mo.var, scratch_);
        rec.boundary_flux += out.flux * g.dx();
        rec.variance_defect += out.defect * g.dx();
        if (!diffusive) {
            const auto after = row_moments(row, g);
            rec.relaxation_dissipation += 0.5 * (mo.var - after.var) * mo.mass * g.dx();
            continue;
        }
        auto buf = conv_fft_->data();
        const int n = static_cast<int>(buf.size());
        std::fill(buf.begin(), buf.end(), 0.0);
        for (int j = 0; j < g.n_v; ++j) buf[half + j] = row[j];
        conv_fft_->forward();
        for (int k = 0; k < n; ++k) buf[k] *= kernel_hat_[k];
        conv_fft_->backward();
        const double scale = 1.0 / n;
        double lost = 0.0;
        std::fill(row.begin(), row.end(), 0.0);
        for (int t = 0; t < g.n_v + 2 * half; ++t) {
            const double w = buf[t].real() * scale;
            const int j = t - half;
            if (j < 0) {
                row[0] += w;
                lost += std::abs(w);
            } else if (j >= g.n_v) {
                row[g.n_v - 1] += w;
                lost += std::abs(w);
            } else {
                row[j] += w;
            }
        }
        rec.boundary_flux += lost * g.dv() * g.dx();
        rec.relaxation_dissipation += (h_before - row_relative_entropy(row, g, mo.mean)) * g.dx();
    }
    return rec;
}

StepRecord KineticSolver::step()
{
    const double dt = config_.dt;
    StepRecord rec;
    transport(0.5 * dt);
    if (config_.regime == Regime::small_inertia) {
        rec += upwind_damped_substep(dt, face_force(), config_.eps);
    } else {
        // The drift is not stiff here and the flow need not follow -F, so the force stays
        // cell-centred.
        const auto F = cell_force();
        rec += damped_substep(0.5 * dt, F, 1.0);
        rec += relaxation_substep(dt);
        rec += damped_substep(0.5 * dt, F, 1.0);
    }
    transport(0.5 * dt);
    time_ += dt;
    flux_ += rec.boundary_flux;
    if (flux_ > config_.flux_tolerance * std::max(f_.mass(), 1e-300))
        throw BoundaryLoss(fmt::format("velocity-edge flux {:.3e} exceeds tolerance at t = {:.4f}", flux_, time_));
    return rec;
}

PhaseField step_small_inertia(const PhaseField& f, const KineticConfig& config)
{
    KineticConfig c = config;
    c.regime = Regime::small_inertia;
    KineticSolver s(f, c);
    s.step();
    return s.state();
}

PhaseField step_hydro(const PhaseField& f, const KineticConfig& config)
{
    if (config.regime == Regime::small_inertia) throw std::invalid_argument("step_hydro needs a hydrodynamic regime");
    KineticSolver s(f, config);
    s.step();
    return s.state();
}

// ---------------------------------------------------------------------------

double entropy(const PhaseField& f)
{
    double s = 0.0;
    for (double w : f.values()) {
        if (w < -1e-10) throw std::domain_error("negative phase density in entropy");
        s += w * std::log(std::max(w, 1e-300));
    }
    return s * f.grid().dx() * f.grid().dv();
}

double kinetic_energy(const PhaseField& f)
{
    const auto& g = f.grid();
    double s = 0.0;
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_v; ++j) s += g.v(j) * g.v(j) * f.at(i, j);
    return 0.5 * s * g.dx() * g.dv();
}

double free_energy_kinetic(const PhaseField& f, const KineticConfig& config)
{
    const auto m = moments(f);
    const double inter = interaction_energy(m.rho, config.kernel, Boundary::periodic);
    double value;
    if (config.regime == Regime::small_inertia) {
        value = kinetic_energy(f) + inter / config.eps;
    } else {
        value = kinetic_energy(f) + inter;
        if (config.pressure() > 0.0) value += config.pressure() * entropy(f);
    }
    if (!std::isfinite(value)) throw std::domain_error("free energy is not finite");
    return value;
}

double dissipation(const PhaseField& f, double pressure)
{
    const auto& g = f.grid();
    const auto u = moments(f).velocity();
    const int nv = g.n_v;
    const double dv = g.dv();
    double total = 0.0;
    std::vector<double> logf(nv);
    for (int i = 0; i < g.n_x; ++i) {
        const auto row = f.row(i);
        if (pressure == 0.0) {
            for (int j = 0; j < nv; ++j) {
                const double d = g.v(j) - u[i];
                total += d * d * row[j];
            }
            continue;
        }
        for (int j = 0; j < nv; ++j) {
            if (row[j] < -1e-10) throw std::domain_error("negative phase density in dissipation");
            logf[j] = std::log(std::max(row[j], 1e-300));
        }
        // f |c_P d_v log f + (v - u)|^2; the stencils are exact on quadratics, so a
        // sampled Maxwellian gives zero.
        for (int j = 0; j < nv; ++j) {
            double dlog;
            if (j == 0)
                dlog = (-3.0 * logf[0] + 4.0 * logf[1] - logf[2]) / (2.0 * dv);
            else if (j == nv - 1)
                dlog = (3.0 * logf[nv - 1] - 4.0 * logf[nv - 2] + logf[nv - 3]) / (2.0 * dv);
            else
                dlog = (logf[j + 1] - logf[j - 1]) / (2.0 * dv);
            const double r = pressure * dlog + (g.v(j) - u[i]);
            total += std::max(row[j], 0.0) * r * r;
        }
    }
    total *= g.dx() * dv;
    if (!std::isfinite(total)) throw std::domain_error("dissipation is not finite");
    return total;
}

double dissipation(const PhaseField& f, const KineticConfig& config) { return dissipation(f, config.pressure()); }

PhaseField local_maxwellian(const PhaseGrid& grid, std::span<const double> rho, std::span<const double> u,
                            double variance)
{
    if (variance <= 0.0) return monokinetic(grid, rho, u);
    PhaseField f(grid);
    for (int i = 0; i < grid.n_x; ++i) {
        auto row = f.row(i);
        double s = 0.0;
        for (int j = 0; j < grid.n_v; ++j) {
            const double d = grid.v(j) - u[i];
            row[j] = std::exp(-0.5 * d * d / variance);
            s += row[j];
        }
        const double scale = rho[i] / (s * grid.dv());
        for (double& w : row) w *= scale;
    }
    return f;
}

PhaseField monokinetic(const PhaseGrid& grid, std::span<const double> rho, std::span<const double> u)
{
    PhaseField f(grid);
    for (int i = 0; i < grid.n_x; ++i) {
        const double t = std::clamp((u[i] - grid.v(0)) / grid.dv(), 0.0, grid.n_v - 1.0);
        int k = static_cast<int>(std::floor(t));
        double p = t - k;
        if (k >= grid.n_v - 1) {
            k = grid.n_v - 1;
            p = 0.0;
        }
        f.at(i, k) += rho[i] / grid.dv() * (1.0 - p);
        if (p > 0.0) f.at(i, k + 1) += rho[i] / grid.dv() * p;
    }
    return f;
}

}  // namespace modlab
