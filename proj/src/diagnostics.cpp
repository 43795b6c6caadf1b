#include "modlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <stdexcept>

#include "modlab/errors.hpp"
#include "modlab/spectral_riesz.hpp"

namespace modlab {

namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b)
{
    if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
    if (a.grid().dim != 1) throw std::invalid_argument("one-dimensional fields expected");
}

void require_positive(const ScalarField& rho)
{
    for (double r : rho.values())
        if (!(r > 0.0)) throw std::domain_error("reference density must be positive");
}

double entropy_density(double bar, double ref)
{
    const double lb = bar > 0.0 ? bar * std::log(std::max(bar, 1e-300)) : 0.0;
    return lb - ref * std::log(ref) - (1.0 + std::log(ref)) * (bar - ref);
}

ScalarField product(const ScalarField& a, const ScalarField& b)
{
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

double l1_distance(const ScalarField& a, const ScalarField& b) { return total_variation(a, b); }

}  // namespace

double modulated_kinetic_energy(const PhaseField& f, std::span<const double> u)
{
    const auto& g = f.grid();
    if (static_cast<int>(u.size()) != g.n_x) throw std::invalid_argument("velocity field does not match the x grid");
    double s = 0.0;
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_v; ++j) {
            const double d = g.v(j) - u[i];
            s += d * d * f.at(i, j);
        }
    return s * g.dx() * g.dv();
}

double modulated_kinetic_energy(const PhaseField& f, const VectorField& u)
{
    if (!(u.grid == f.grid().space())) throw std::invalid_argument("velocity field does not match the x grid");
    return modulated_kinetic_energy(f, u.components.at(0).values());
}

double relative_entropy_density(const ScalarField& rhobar, const ScalarField& rho)
{
    require_same_grid(rhobar, rho);
    require_positive(rho);
    double s = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rhobar[i] < -1e-12) throw std::domain_error("negative density in relative entropy");
        s += entropy_density(rhobar[i], rho[i]);
    }
    return s * rho.grid().cell_volume();
}

double relative_entropy_macro(const MacroState& bar, const MacroState& ref)
{
    if (bar.pressure != ref.pressure) throw std::invalid_argument("pressure flags differ");
    require_same_grid(bar.rho, ref.rho);
    if (ref.pressure > 0.0) require_positive(ref.rho);
    const auto& ub = bar.velocity();
    const auto& u = ref.velocity();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = ub[i] - u[i];
        s += 0.5 * bar.rho[i] * d * d;
        if (ref.pressure > 0.0) s += ref.pressure * entropy_density(bar.rho[i], ref.rho[i]);
    }
    return s * ref.rho.grid().cell_volume();
}

double relative_entropy_macro_defining(const MacroState& bar, const MacroState& ref)
{
    if (bar.pressure != ref.pressure) throw std::invalid_argument("pressure flags differ");
    require_same_grid(bar.rho, ref.rho);
    require_positive(ref.rho);
    const double cp = ref.pressure;
    auto energy = [cp](double r, double m) {
        return (r > 0.0 ? 0.5 * m * m / r : 0.0) + (r > 0.0 ? cp * r * std::log(r) : 0.0);
    };
    const auto& ub = bar.velocity();
    const auto& u = ref.velocity();
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double rb = bar.rho[i], mb = rb * ub[i];
        const double r = ref.rho[i], m = r * u[i];
        const double d_rho = -0.5 * m * m / (r * r) + cp * (1.0 + std::log(r));
        const double d_m = m / r;
        s += energy(rb, mb) - energy(r, m) - d_rho * (rb - r) - d_m * (mb - m);
    }
    return s * ref.rho.grid().cell_volume();
}

double wasserstein1_1d(const ScalarField& mu, const ScalarField& nu)
{
    require_same_grid(mu, nu);
    const double ma = mu.mass(), mb = nu.mass();
    if (std::abs(ma - mb) > 1e-10 * std::max(1.0, std::abs(ma)))
        throw MassMismatch(fmt::format("W1 needs equal masses ({:.12g} vs {:.12g})", ma, mb));
    const double h = mu.grid().h();
    double cdf = 0.0, w = 0.0;
    for (std::size_t i = 0; i + 1 < mu.size(); ++i) {
        cdf += (mu[i] - nu[i]) * h;
        w += std::abs(cdf) * h;
    }
    return w;
}

double total_variation(const ScalarField& mu, const ScalarField& nu)
{
    require_same_grid(mu, nu);
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - nu[i]);
    return s * mu.grid().h();
}

double bl_upper_bound(const ScalarField& mu, const ScalarField& nu)
{
    return std::min(wasserstein1_1d(mu, nu), total_variation(mu, nu));
}

double signed_bl_upper_bound(const ScalarField& mu, const ScalarField& nu)
{
    require_same_grid(mu, nu);
    const std::size_t n = mu.size();
    const double h = mu.grid().h();
    double m = 0.0;
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = (mu[i] - nu[i]) * h;
        m += d[i];
    }
    // A test function with |phi| <= 1 and Lip <= 1 pairs with the uniform part for at most
    // |m| and with the mean-free part through its primitive, up to an additive constant.
    std::vector<double> primitive(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += d[i] - m / static_cast<double>(n);
        primitive[i] = acc;
    }
    std::vector<double> sorted = primitive;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const double median = sorted[n / 2];
    double spread = 0.0;
    for (double p : primitive) spread += std::abs(p - median);
    return std::min(std::abs(m) + h * spread, total_variation(mu, nu));
}

double sup_norm(const ScalarField& u) { return u.max_abs(); }

double derivative_sup_norm(const ScalarField& u) { return periodic_gradient(u).components[0].max_abs(); }

double phase_bl_upper_bound(const PhaseField& f, const ScalarField& rho, const ScalarField& u)
{
    const auto& g = f.grid();
    if (!(rho.grid() == g.space()) || !(u.grid() == g.space()))
        throw std::invalid_argument("limit fields do not match the x grid");
    double transport = 0.0;
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_v; ++j) transport += std::abs(g.v(j) - u[i]) * f.at(i, j);
    transport *= g.dx() * g.dv();
    const double du = derivative_sup_norm(u);
    const auto rho_f = moments(f).rho;
    const double bound = transport + std::sqrt(1.0 + du * du) * wasserstein1_1d(rho_f, rho);
    return std::min(bound, f.mass() + rho.mass());
}

RateFit fit_rate(std::vector<double> eps, std::vector<double> values)
{
    if (eps.size() != values.size()) throw std::invalid_argument("eps and values differ in length");
    if (eps.size() < 4) throw std::invalid_argument("a rate fit needs at least four eps values");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0) || !(values[i] > 0.0)) throw std::domain_error("rate fit needs positive eps and values");
        if (i > 0 && !(eps[i] < eps[i - 1])) throw std::invalid_argument("eps must be strictly decreasing");
    }
    const std::size_t n = eps.size();
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += std::log(eps[i]);
        sy += std::log(values[i]);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(eps[i]) - mx, dy = std::log(values[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::log(values[i]) - (fit.intercept + fit.slope * std::log(eps[i]));
        ss_res += r * r;
    }
    fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.eps = std::move(eps);
    fit.values = std::move(values);
    return fit;
}

std::vector<InequalityCheck> small_inertia_lemma_suite(const PhaseField& f, const ScalarField& rho,
                                                       const ScalarField& u)
{
    const auto mo = moments(f);
    const double mass = f.mass();
    const double mke = modulated_kinetic_energy(f, u.values());
    const double w1 = wasserstein1_1d(mo.rho, rho);
    const double un = sup_norm(u), dun = derivative_sup_norm(u);
    const double lip2 = 1.0 + dun * dun;

    std::vector<InequalityCheck> out;
    out.push_back({"si-i moments", signed_bl_upper_bound(mo.momentum, product(rho, u)),
                   std::sqrt(mass * mke) + (un + dun) * w1});
    const double c2 = 2.0 * std::max(mass, lip2);
    const double phase = phase_bl_upper_bound(f, rho, u);
    out.push_back({"si-ii monokinetic", phase * phase, c2 * mke + c2 * w1 * w1});
    return out;
}

std::vector<InequalityCheck> hydro_lemma_suite(const PhaseField& f, const ScalarField& rho, const ScalarField& u,
                                               double pressure)
{
    const auto mo = moments(f);
    const auto ue = mo.velocity();
    const double me = mo.rho.mass(), m = rho.mass();
    const double h_rel = relative_entropy_density(mo.rho, rho);
    double k2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) k2 += mo.rho[i] * (ue[i] - u[i]) * (ue[i] - u[i]);
    k2 *= rho.grid().h();
    const double un = sup_norm(u), dun = derivative_sup_norm(u);
    const double w1 = wasserstein1_1d(mo.rho, rho);
    const double l1 = l1_distance(mo.rho, rho);
    const auto ju = product(rho, u);
    ScalarField je2(rho.grid()), ju2(rho.grid());
    for (std::size_t i = 0; i < u.size(); ++i) {
        je2[i] = mo.rho[i] * ue[i] * ue[i];
        ju2[i] = rho[i] * u[i] * u[i];
    }
    const double sq = std::sqrt(me * k2);

    std::vector<InequalityCheck> out;
    out.push_back({"h-i densities", l1, std::sqrt(2.0 * (me + m) * std::max(h_rel, 0.0))});
    out.push_back({"h-ii moments L1", l1_distance(mo.momentum, ju), sq + un * l1});
    out.push_back({"h-ii moments BL", signed_bl_upper_bound(mo.momentum, ju), sq + (un + dun) * w1});
    out.push_back({"h-iii convection L1", l1_distance(je2, ju2), k2 + 2.0 * un * sq + 3.0 * un * un * l1});
    out.push_back({"h-iii convection BL", signed_bl_upper_bound(je2, ju2),
                   k2 + 2.0 * un * sq + (un * un + 2.0 * un * dun) * w1});
    if (pressure > 0.0) {
        const auto maxw = local_maxwellian(f.grid(), rho.values(), u.values(), 1.0);
        double l1f = 0.0, hf = 0.0;
        const auto fv = f.values();
        const auto mv = maxw.values();
        for (std::size_t k = 0; k < fv.size(); ++k) {
            const double a = std::max(fv[k], 0.0), b = mv[k];
            l1f += std::abs(fv[k] - b);
            hf += (a > 0.0 ? a * std::log(a / b) : 0.0) - a + b;
        }
        const double cell = f.grid().dx() * f.grid().dv();
        l1f *= cell;
        hf *= cell;
        out.push_back({"h-iv maxwellian", l1f, std::sqrt(2.0 * (f.mass() + maxw.mass()) * std::max(hf, 0.0))});
    }
    double spread = 0.0;
    const auto& g = f.grid();
    for (int i = 0; i < g.n_x; ++i)
        for (int j = 0; j < g.n_v; ++j) spread += (g.v(j) - ue[i]) * (g.v(j) - ue[i]) * f.at(i, j);
    spread *= g.dx() * g.dv();
    out.push_back({"h-v monokinetic", phase_bl_upper_bound(f, rho, u),
                   std::sqrt(me) * (std::sqrt(spread) + std::sqrt(k2)) + std::sqrt(1.0 + dun * dun) * w1});
    return out;
}

}  // namespace modlab
