#include "modlab/limit_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fmt/format.h>
#include <stdexcept>

#include "modlab/errors.hpp"
#include "modlab/fft.hpp"

namespace modlab {

namespace {

void require_1d(const GridSpec& g)
{
    if (g.dim != 1) throw std::invalid_argument("limit solvers are one-dimensional");
}

double mc_slope(double fm, double f0, double fp)
{
    const double a = 2.0 * (f0 - fm), b = 0.5 * (fp - fm), c = 2.0 * (fp - f0);
    if (a > 0.0 && b > 0.0 && c > 0.0) return std::min({a, b, c});
    if (a < 0.0 && b < 0.0 && c < 0.0) return std::max({a, b, c});
    return 0.0;
}

// Left and right face states at x_{i+1/2}: piecewise constant or MC-limited linear.
void face_states(std::span<const double> q, bool muscl, std::vector<double>& left, std::vector<double>& right)
{
    const int n = static_cast<int>(q.size());
    left.assign(n, 0.0);
    right.assign(n, 0.0);
    std::vector<double> slope(n, 0.0);
    if (muscl)
        for (int i = 0; i < n; ++i) slope[i] = mc_slope(q[(i + n - 1) % n], q[i], q[(i + 1) % n]);
    for (int i = 0; i < n; ++i) {
        const int ip = (i + 1) % n;
        left[i] = q[i] + 0.5 * slope[i];
        right[i] = q[ip] - 0.5 * slope[ip];
    }
}

double velocity_of(double rho, double m) { return rho > 1e-12 ? m / rho : 0.0; }

}  // namespace

ScalarField MacroState::momentum() const
{
    ScalarField m(rho.grid());
    const auto& v = velocity();
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = rho[i] * v[i];
    return m;
}

MacroState make_macro_state(ScalarField rho, ScalarField u, double pressure, double gamma)
{
    require_1d(rho.grid());
    if (!(rho.grid() == u.grid())) throw std::invalid_argument("rho and u grids differ");
    MacroState s;
    s.u = VectorField(rho.grid());
    s.u.components[0] = std::move(u);
    s.rho = std::move(rho);
    s.pressure = pressure;
    s.gamma = gamma;
    return s;
}

VectorField aggregation_velocity(const ScalarField& rho, const KernelParams& params, double gamma)
{
    require_1d(rho.grid());
    auto u = riesz_gradient(rho, params, Boundary::periodic);
    u.components[0] *= -1.0 / gamma;
    return u;
}

std::vector<double> aggregation_face_velocity(const ScalarField& rho, const KernelParams& params, double gamma)
{
    const auto& g = rho.grid();
    require_1d(g);
    const auto potential = riesz_convolve(rho, params, Boundary::periodic);
    Spectral spec(g);
    auto modes = spec.transform(potential.values());
    const auto k = wavenumbers(g);
    for (std::size_t j = 0; j < modes.size(); ++j) {
        if (static_cast<int>(j) == g.n / 2) {
            modes[j] = 0.0;
            continue;
        }
        modes[j] *= std::complex<double>(0.0, -k[j] / gamma) * std::polar(1.0, 0.5 * k[j] * g.h());
    }
    return spec.inverse(modes);
}

double upwind_cell_velocity(double left, double right)
{
    if (left >= 0.0 && right >= 0.0) return right;
    if (left <= 0.0 && right <= 0.0) return left;
    return left > 0.0 ? 0.0 : left + right;
}

std::vector<double> upwind_cell_velocity(std::span<const double> face)
{
    const std::size_t n = face.size();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = upwind_cell_velocity(face[(i + n - 1) % n], face[i]);
    return u;
}

double aggregation_stable_dt(const ScalarField& rho, const KernelParams& params, double gamma)
{
    const auto& g = rho.grid();
    const double h = g.h();
    double rho_max = 0.0;
    for (double r : rho.values()) rho_max = std::max(rho_max, r);
    double stiff = 0.0;
    for (double k : wavenumbers(g)) {
        const double kk[] = {k};
        stiff = std::max(stiff, 2.0 * std::abs(std::sin(0.5 * k * h)) / h * std::abs(k) * riesz_symbol(params, kk));
    }
    stiff *= rho_max / gamma;
    double umax = 0.0;
    for (double u : aggregation_face_velocity(rho, params, gamma)) umax = std::max(umax, std::abs(u));
    return std::min(0.9 / (stiff + 2.0 * umax / h), umax > 0.0 ? 0.5 * h / umax : 1e300);
}

namespace {

// -(d/dx) of the upwind flux rho u through faces with velocity uf.
std::vector<double> aggregation_rhs(std::span<const double> rho, std::span<const double> uf, double h, bool muscl)
{
    const int n = static_cast<int>(rho.size());
    std::vector<double> left, right;
    face_states(rho, muscl, left, right);
    std::vector<double> flux(n), out(n);
    for (int i = 0; i < n; ++i) flux[i] = uf[i] * (uf[i] >= 0.0 ? left[i] : right[i]);
    for (int i = 0; i < n; ++i) out[i] = -(flux[i] - flux[(i + n - 1) % n]) / h;
    return out;
}

}  // namespace

ScalarField step_aggregation(const ScalarField& rho, double dt, const KernelParams& params, double gamma, bool muscl)
{
    const auto& g = rho.grid();
    require_1d(g);
    const double h = g.h();
    auto stage = [&](const ScalarField& r) {
        const auto uf = aggregation_face_velocity(r, params, gamma);
        double umax = 0.0;
        for (double u : uf) umax = std::max(umax, std::abs(u));
        if (umax * dt / h > 1.0 + 1e-12)
            throw CflViolation(fmt::format("aggregation step: max|u| dt/h = {:.4g} > 1", umax * dt / h));
        const auto rhs = aggregation_rhs(r.values(), uf, h, muscl);
        ScalarField next = r;
        for (std::size_t i = 0; i < next.size(); ++i) next[i] += dt * rhs[i];
        return next;
    };
    if (!muscl) return stage(rho);
    const auto one = stage(rho);
    auto two = stage(one);
    for (std::size_t i = 0; i < two.size(); ++i) two[i] = 0.5 * (rho[i] + two[i]);
    return two;
}

double euler_riesz_stable_dt(const MacroState& state, double cfl)
{
    double speed = 0.0;
    for (double u : state.velocity().values()) speed = std::max(speed, std::abs(u) + std::sqrt(state.pressure));
    return speed > 0.0 ? cfl * state.rho.grid().h() / speed : 1e300;
}

namespace {

struct Conserved {
    std::vector<double> rho;
    std::vector<double> m;
};

// Flux divergence plus Riesz force, for (rho, m).
Conserved euler_rhs(const Conserved& U, const GridSpec& g, const KernelParams& params, double pressure, bool muscl,
                    double dt)
{
    const int n = g.n;
    const double h = g.h();
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = velocity_of(U.rho[i], U.m[i]);
    std::vector<double> rl, rr, ul, ur;
    face_states(U.rho, muscl, rl, rr);
    face_states(u, muscl, ul, ur);
    const double c = std::sqrt(pressure);
    std::vector<double> f_rho(n), f_m(n);
    double speed = 0.0;
    for (int i = 0; i < n; ++i) {
        const double ml = rl[i] * ul[i], mr = rr[i] * ur[i];
        const double a = std::max(std::abs(ul[i]), std::abs(ur[i])) + c;
        speed = std::max(speed, a);
        f_rho[i] = 0.5 * (ml + mr) - 0.5 * a * (rr[i] - rl[i]);
        f_m[i] = 0.5 * (ml * ul[i] + pressure * rl[i] + mr * ur[i] + pressure * rr[i]) - 0.5 * a * (mr - ml);
    }
    if (speed * dt / h > 1.0 + 1e-12)
        throw CflViolation(fmt::format("Euler-Riesz step: max(|u| + c) dt/h = {:.4g} > 1", speed * dt / h));
    ScalarField rho_field(g, U.rho);
    const auto grad = riesz_gradient(rho_field, params, Boundary::periodic).components[0];
    Conserved out{std::vector<double>(n), std::vector<double>(n)};
    for (int i = 0; i < n; ++i) {
        const int im = (i + n - 1) % n;
        out.rho[i] = -(f_rho[i] - f_rho[im]) / h;
        out.m[i] = -(f_m[i] - f_m[im]) / h - U.rho[i] * grad[i];
    }
    return out;
}

}  // namespace

MacroState step_euler_riesz(const MacroState& state, double dt, const KernelParams& params, bool muscl)
{
    const auto& g = state.rho.grid();
    require_1d(g);
    const int n = g.n;
    Conserved U{std::vector<double>(state.rho.values().begin(), state.rho.values().end()), std::vector<double>(n)};
    const auto& v = state.velocity();
    const double half_damp = std::exp(-0.5 * state.gamma * dt);
    for (int i = 0; i < n; ++i) U.m[i] = state.rho[i] * v[i] * half_damp;

    auto advance = [&](const Conserved& from) {
        const auto rhs = euler_rhs(from, g, params, state.pressure, muscl, dt);
        Conserved next = from;
        for (int i = 0; i < n; ++i) {
            next.rho[i] += dt * rhs.rho[i];
            next.m[i] += dt * rhs.m[i];
        }
        return next;
    };
    Conserved W = advance(U);
    if (muscl) {
        const Conserved W2 = advance(W);
        for (int i = 0; i < n; ++i) {
            W.rho[i] = 0.5 * (U.rho[i] + W2.rho[i]);
            W.m[i] = 0.5 * (U.m[i] + W2.m[i]);
        }
    }
    ScalarField rho(g, W.rho), u(g);
    for (int i = 0; i < n; ++i) u[i] = velocity_of(W.rho[i], W.m[i] * half_damp);
    return make_macro_state(std::move(rho), std::move(u), state.pressure, state.gamma);
}

VectorField error_field_e(const MacroState& before, const MacroState& after, double dt)
{
    const auto& g = before.rho.grid();
    require_1d(g);
    if (!(after.rho.grid() == g)) throw std::invalid_argument("states on different grids");
    const auto& ub = before.velocity();
    const auto& ua = after.velocity();
    ScalarField mid(g);
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (ub[i] + ua[i]);
    const auto du = periodic_gradient(mid).components[0];
    VectorField e(g);
    for (std::size_t i = 0; i < mid.size(); ++i) e.components[0][i] = (ua[i] - ub[i]) / dt + mid[i] * du[i];
    return e;
}

ScalarField restrict_average(const ScalarField& fine, int factor)
{
    const auto& g = fine.grid();
    require_1d(g);
    if (factor < 2 || factor % 2 != 0 || g.n % factor != 0)
        throw std::invalid_argument("restriction factor must be even and divide n");
    const int nc = g.n / factor, half = factor / 2;
    ScalarField coarse(GridSpec{1, nc, g.length});
    for (int i = 0; i < nc; ++i) {
        double s = 0.0;
        for (int m = -half; m <= half; ++m) {
            const double w = (m == -half || m == half) ? 0.5 : 1.0;
            s += w * fine[((factor * i + m) % g.n + g.n) % g.n];
        }
        coarse[i] = s / factor;
    }
    return coarse;
}

ScalarField restrict_sample(const ScalarField& fine, int factor)
{
    const auto& g = fine.grid();
    require_1d(g);
    if (factor < 1 || g.n % factor != 0) throw std::invalid_argument("restriction factor must divide n");
    const int nc = g.n / factor;
    ScalarField coarse(GridSpec{1, nc, g.length});
    for (int i = 0; i < nc; ++i) coarse[i] = fine[factor * i];
    return coarse;
}

std::vector<double> restrict_face_sample(const ScalarField& fine, int factor)
{
    const auto& g = fine.grid();
    require_1d(g);
    if (factor < 2 || factor % 2 != 0 || g.n % factor != 0)
        throw std::invalid_argument("restriction factor must be even and divide n");
    std::vector<double> coarse(g.n / factor);
    for (std::size_t i = 0; i < coarse.size(); ++i) coarse[i] = fine[(factor * i + factor / 2) % g.n];
    return coarse;
}

}  // namespace modlab
