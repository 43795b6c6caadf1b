#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "modlab/extension_ops.hpp"
#include "modlab/fft.hpp"
#include "modlab/spectral_riesz.hpp"

namespace modlab {

HalfSpaceField::HalfSpaceField(const GridSpec& g, int n, double xmax, double gam)
    : xgrid(g), n_xi(n), xi_max(xmax), gamma(gam), values(g.size() * static_cast<std::size_t>(n), 0.0)
{
    g.validate();
    if (n < 5 || !(xmax > 0)) throw std::invalid_argument("xi grid needs at least 5 cells and xi_max > 0");
}

namespace {

std::size_t shifted(const GridSpec& g, std::size_t i, int axis, int step)
{
    auto idx = multi_index(g, i);
    idx[axis] = (idx[axis] + step + g.n) % g.n;
    return flat_index(g, idx);
}

double x_laplacian(const HalfSpaceField& f, std::size_t i, int q)
{
    const auto& g = f.xgrid;
    const double h2 = g.h() * g.h();
    double lap = 0.0;
    for (int a = 0; a < g.dim; ++a)
        lap += (f.at(shifted(g, i, a, 1), q) - 2 * f.at(i, q) + f.at(shifted(g, i, a, -1), q)) / h2;
    return lap;
}

double cell_moment(double a, double b, double exponent)
{
    return (std::pow(b, exponent + 1) - std::pow(a, exponent + 1)) / (exponent + 1);
}

// Synthetic separable test functions A cos(k.x + phase) exp(-xi^2 / (2 s^2)) on a periodic box.
struct SyntheticTerm {
    std::vector<double> k;
    double phase = 0.0;
    double amplitude = 1.0;
    double width = 1.0;
};

struct Synthetic {
    std::vector<SyntheticTerm> terms;

    enum class Part { value, delta_gamma, dxi, dxi_over_xi, dxi_delta_gamma, grad_x_dxi_sq, dxixi };

    // Returns the requested quantity; grad_x_dxi_sq is |grad_x d_xi f|^2.
    double eval(std::span<const double> x, double xi, double gamma, Part part) const
    {
        double scalar = 0.0;
        std::vector<double> grad(x.size(), 0.0);
        for (const auto& t : terms) {
            double theta = t.phase, k2 = 0.0;
            for (std::size_t a = 0; a < x.size(); ++a) {
                theta += t.k[a] * x[a];
                k2 += t.k[a] * t.k[a];
            }
            const double s2 = t.width * t.width;
            const double e = std::exp(-xi * xi / (2 * s2));
            const double e1 = -xi / s2 * e;
            const double e2 = (xi * xi / (s2 * s2) - 1 / s2) * e;
            const double e3 = (3 * xi / (s2 * s2) - xi * xi * xi / (s2 * s2 * s2)) * e;
            const double c = t.amplitude * std::cos(theta), s = t.amplitude * std::sin(theta);
            switch (part) {
            case Part::value: scalar += c * e; break;
            case Part::delta_gamma: scalar += c * (-k2 * e + e2 - gamma * e / s2); break;
            case Part::dxi: scalar += c * e1; break;
            case Part::dxi_over_xi: scalar += -c * e / s2; break;
            case Part::dxi_delta_gamma: scalar += c * (-k2 * e1 + e3 + gamma * xi * e / (s2 * s2)); break;
            case Part::dxixi: scalar += c * e2; break;
            case Part::grad_x_dxi_sq:
                for (std::size_t a = 0; a < x.size(); ++a) grad[a] += -s * t.k[a] * e1;
                break;
            }
        }
        if (part == Part::grad_x_dxi_sq) {
            double g2 = 0.0;
            for (double v : grad) g2 += v * v;
            return g2;
        }
        return scalar;
    }
};

Synthetic random_synthetic(int dim, double length, int terms, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> wave(-2, 2);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> width(0.6, 1.2);
    std::normal_distribution<double> normal;
    Synthetic s;
    for (int i = 0; i < terms; ++i) {
        SyntheticTerm t;
        for (int a = 0; a < dim; ++a) t.k.push_back(2 * std::numbers::pi / length * wave(rng));
        t.phase = angle(rng);
        t.amplitude = normal(rng);
        t.width = width(rng);
        s.terms.push_back(t);
    }
    return s;
}

double synthetic_integral(const Synthetic& f, const Synthetic* g, const GridSpec& xg, int n_xi, double xi_max,
                          double gamma, double exponent, Synthetic::Part fpart, Synthetic::Part gpart)
{
    auto field = sample_half_space(xg, n_xi, xi_max, gamma, [&](std::span<const double> x, double xi) {
        const double a = f.eval(x, xi, gamma, fpart);
        return g ? a * g->eval(x, xi, gamma, gpart) : a;
    });
    return weighted_integral(field, exponent);
}

IdentityReport weighted_ibp(const IdentityConfig& c, int n_xi)
{
    const GridSpec xg{c.dim, c.n_x, 2 * std::numbers::pi};
    std::mt19937_64 rng(c.seed);
    const auto f = random_synthetic(c.dim, xg.length, 3, rng);
    // Same wave vectors so the pairing does not vanish by orthogonality.
    auto g = random_synthetic(c.dim, xg.length, 3, rng);
    for (std::size_t i = 0; i < g.terms.size(); ++i) g.terms[i].k = f.terms[i].k;
    const double gamma = gamma_exponent(c.alpha, c.dim).gamma;
    using P = Synthetic::Part;
    IdentityReport r;
    r.id = "WeightedIBP";
    r.params = fmt::format("d={} gamma={} n_xi={}", c.dim, gamma, n_xi);
    r.left = synthetic_integral(f, &g, xg, n_xi, c.xi_max, gamma, gamma, P::delta_gamma, P::value);
    r.right = synthetic_integral(f, &g, xg, n_xi, c.xi_max, gamma, gamma, P::value, P::delta_gamma);
    r.residual = relative_residual(r.left, r.right);
    r.resolution = c.xi_max / n_xi;
    return r;
}

IdentityReport xi_derivative(const IdentityConfig& c, int n_xi)
{
    const GridSpec xg{c.dim, c.n_x, 2 * std::numbers::pi};
    std::mt19937_64 rng(c.seed);
    const auto f = random_synthetic(c.dim, xg.length, 3, rng);
    const double gamma = gamma_exponent(c.alpha, c.dim).gamma;
    using P = Synthetic::Part;
    IdentityReport r;
    r.id = "XiDerivative";
    r.params = fmt::format("d={} gamma={} n_xi={}", c.dim, gamma, n_xi);
    r.left = synthetic_integral(f, &f, xg, n_xi, c.xi_max, gamma, gamma, P::dxi_delta_gamma, P::dxi);
    const double singular = synthetic_integral(f, &f, xg, n_xi, c.xi_max, gamma, gamma, P::dxi_over_xi, P::dxi_over_xi);
    const double mixed = synthetic_integral(f, nullptr, xg, n_xi, c.xi_max, gamma, gamma, P::grad_x_dxi_sq, P::value);
    const double second = synthetic_integral(f, &f, xg, n_xi, c.xi_max, gamma, gamma, P::dxixi, P::dxixi);
    r.right = -gamma * singular - mixed - second;
    r.residual = relative_residual(r.left, r.right);
    r.resolution = c.xi_max / n_xi;
    return r;
}

IdentityReport with_order(IdentityReport fine, const IdentityReport& coarse)
{
    const double e1 = std::abs(coarse.left - coarse.right), e2 = std::abs(fine.left - fine.right);
    fine.order = (e1 > 0 && e2 > 0) ? std::log2(e1 / e2) : std::numeric_limits<double>::quiet_NaN();
    return fine;
}

QuadratureSpec halved(QuadratureSpec q)
{
    q.n_r /= 2;
    q.n_xi /= 2;
    return q;
}

// Per-mode wave numbers and Nyquist mask, tabulated once per transform shape.
struct ModeTable {
    std::vector<std::vector<double>> k;
    std::vector<char> nyquist;

    explicit ModeTable(const Spectral& sp) : k(sp.grid().dim), nyquist(sp.grid().size())
    {
        for (int a = 0; a < sp.grid().dim; ++a) {
            k[a].resize(sp.grid().size());
            for (std::size_t m = 0; m < nyquist.size(); ++m) k[a][m] = sp.k_component(m, a);
        }
        for (std::size_t m = 0; m < nyquist.size(); ++m) nyquist[m] = sp.on_nyquist(m);
    }

    // i^n prod_a k_a times v for the n axes of a tuple; odd orders drop Nyquist modes.
    // Written out in real arithmetic: the checked complex product dominates otherwise.
    std::complex<double> apply(std::size_t m, std::span<const int> axes, std::complex<double> v) const
    {
        if (axes.size() % 2 == 1 && nyquist[m]) return 0.0;
        double mag = 1.0;
        for (int a : axes) mag *= k[a][m];
        const double re = v.real() * mag, im = v.imag() * mag;
        switch (axes.size() % 4) {
        case 0: return {re, im};
        case 1: return {-im, re};
        case 2: return {-re, -im};
        default: return {im, -re};
        }
    }
};

// Two real derivatives with one inverse transform: the spectra are packed as a + i b.
std::pair<std::vector<double>, std::vector<double>> spectral_partials(
    Spectral& sp, const ModeTable& table, const std::vector<std::complex<double>>& a, std::span<const int> axes_a,
    const std::vector<std::complex<double>>& b, std::span<const int> axes_b)
{
    std::vector<std::complex<double>> packed(a.size());
    for (std::size_t m = 0; m < a.size(); ++m) {
        const auto da = table.apply(m, axes_a, a[m]), db = table.apply(m, axes_b, b[m]);
        packed[m] = {da.real() - db.imag(), da.imag() + db.real()};
    }
    return sp.inverse_pair(packed);
}

// Sorted index tuples of length k with their multiplicity in the full tensor.
std::vector<std::pair<std::vector<int>, double>> symmetric_tuples(int dim, int k)
{
    std::vector<std::pair<std::vector<int>, double>> out;
    std::vector<int> t(k, 0);
    while (true) {
        double mult = std::tgamma(k + 1.0);
        for (int a = 0; a < dim; ++a) mult /= std::tgamma(std::count(t.begin(), t.end(), a) + 1.0);
        out.emplace_back(t, mult);
        int pos = k - 1;
        while (pos >= 0 && t[pos] == dim - 1) --pos;
        if (pos < 0) break;
        ++t[pos];
        for (int i = pos + 1; i < k; ++i) t[i] = t[pos];
    }
    return out;
}

// Pointwise Frobenius norm of the k-th derivative tensor.
std::vector<double> tensor_norm(Spectral& sp, const ModeTable& table, const std::vector<std::complex<double>>& modes,
                                int dim, int k)
{
    std::vector<double> sq(sp.grid().size(), 0.0);
    const auto tuples = symmetric_tuples(dim, k);
    for (std::size_t t = 0; t < tuples.size(); t += 2) {
        const auto& [ta, ma] = tuples[t];
        const bool paired = t + 1 < tuples.size();
        const auto& [tb, mb] = paired ? tuples[t + 1] : tuples[t];
        const auto [pa, pb] = spectral_partials(sp, table, modes, ta, modes, tb);
        for (std::size_t i = 0; i < sq.size(); ++i) sq[i] += ma * pa[i] * pa[i] + (paired ? mb * pb[i] * pb[i] : 0.0);
    }
    for (auto& v : sq) v = std::sqrt(v);
    return sq;
}

double lp_norm(const std::vector<double>& v, double p, double cell)
{
    if (std::isinf(p)) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    double s = 0.0;
    if (p == 2.0)
        for (double x : v) s += x * x;
    else
        for (double x : v) s += std::pow(std::abs(x), p);
    return std::pow(s * cell, 1 / p);
}

}  // namespace

HalfSpaceField delta_gamma_apply(const HalfSpaceField& f)
{
    HalfSpaceField out = f;
    const double dxi = f.dxi();
    for (std::size_t i = 0; i < f.xgrid.size(); ++i)
        for (int q = 0; q < f.n_xi; ++q) {
            if (q < 2 || q > f.n_xi - 3) {
                out.at(i, q) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const double up = f.at(i, q + 1), mid = f.at(i, q), down = f.at(i, q - 1);
            out.at(i, q) = x_laplacian(f, i, q) + (up - 2 * mid + down) / (dxi * dxi) +
                           f.gamma / f.xi(q) * (up - down) / (2 * dxi);
        }
    return out;
}

HalfSpaceField divergence_form_apply(const HalfSpaceField& f)
{
    HalfSpaceField out = f;
    const double dxi = f.dxi();
    for (std::size_t i = 0; i < f.xgrid.size(); ++i)
        for (int q = 0; q < f.n_xi; ++q) {
            if (q < 2 || q > f.n_xi - 3) {
                out.at(i, q) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            const double wp = std::pow(f.xi(q) + dxi / 2, f.gamma), wm = std::pow(f.xi(q) - dxi / 2, f.gamma);
            const double flux = wp * (f.at(i, q + 1) - f.at(i, q)) - wm * (f.at(i, q) - f.at(i, q - 1));
            out.at(i, q) = x_laplacian(f, i, q) + flux / (dxi * dxi) / std::pow(f.xi(q), f.gamma);
        }
    return out;
}

double weighted_integral(const HalfSpaceField& f, double exponent)
{
    const double dxi = f.dxi();
    std::vector<double> w(f.n_xi);
    for (int q = 0; q < f.n_xi; ++q) w[q] = cell_moment(q * dxi, (q + 1) * dxi, exponent);
    double total = 0.0;
    for (std::size_t i = 0; i < f.xgrid.size(); ++i)
        for (int q = 0; q < f.n_xi; ++q) {
            const double v = f.at(i, q);
            if (!std::isfinite(v)) throw std::domain_error("weighted integral over an undefined cell");
            total += v * w[q];
        }
    return total * f.xgrid.cell_volume();
}

std::string to_string(IdentityId id)
{
    switch (id) {
    case IdentityId::WeightedIBP: return "WeightedIBP";
    case IdentityId::EnergyRewrite: return "EnergyRewrite";
    case IdentityId::HessianSplit: return "HessianSplit";
    case IdentityId::XiDerivative: return "XiDerivative";
    case IdentityId::EnergyRepOdd: return "EnergyRepOdd";
    case IdentityId::EnergyRepEven: return "EnergyRepEven";
    case IdentityId::Polyharmonic: return "Polyharmonic";
    }
    return "unknown";
}

IdentityReport identity_residual(IdentityId id, const IdentityConfig& c)
{
    switch (id) {
    case IdentityId::WeightedIBP: return with_order(weighted_ibp(c, c.n_xi), weighted_ibp(c, c.n_xi / 2));
    case IdentityId::XiDerivative: return with_order(xi_derivative(c, c.n_xi), xi_derivative(c, c.n_xi / 2));
    case IdentityId::HessianSplit: {
        const auto p = gamma_exponent(c.alpha, c.dim);
        if (p.j != 1) throw std::invalid_argument("HessianSplit needs d-4 < alpha < d-2");
        auto fine = hessian_ratio(p, 0, c.atoms, c.quadrature);
        const auto coarse = hessian_ratio(p, 0, c.atoms, halved(c.quadrature));
        return with_order(fine, coarse);
    }
    case IdentityId::EnergyRewrite: {
        const auto p = gamma_exponent(c.alpha, c.dim);
        return with_order(energy_rewrite(p, c.atoms, c.quadrature), energy_rewrite(p, c.atoms, halved(c.quadrature)));
    }
    case IdentityId::EnergyRepOdd:
    case IdentityId::EnergyRepEven: {
        const auto p = gamma_exponent(c.alpha, c.dim);
        if ((p.j % 2 == 1) != (id == IdentityId::EnergyRepOdd))
            throw std::invalid_argument("energy representation parity does not match j");
        return with_order(energy_representation(p, c.atoms, c.quadrature),
                          energy_representation(p, c.atoms, halved(c.quadrature)));
    }
    case IdentityId::Polyharmonic: {
        const GridSpec g{c.dim, c.poly_n, 2 * std::numbers::pi};
        std::mt19937_64 rng(c.seed);
        return polyharmonic_residual(c.dim, c.poly_m, band_limited_field(g, c.poly_n / 2 - 1, rng));
    }
    }
    throw std::invalid_argument("unknown identity");
}

IdentityReport polyharmonic_residual(int dim, int m, const ScalarField& rho)
{
    if (m < 1 || 2 * m >= dim) throw std::invalid_argument("polyharmonic case needs 1 <= 2m < d");
    if (rho.grid().dim != dim) throw std::invalid_argument("field dimension");
    const double alpha = dim - 2 * m;
    const KernelParams params{alpha, dim};
    const auto phi = riesz_convolve(rho, params, Boundary::periodic);
    const auto& g = rho.grid();
    double left = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) left += rho[i] * phi[i];
    left *= g.cell_volume();

    Spectral sp(g);
    // psi = (-Delta)^{floor(m/2)} phi by repeated spectral Laplacians.
    std::vector<double> psi(phi.values().begin(), phi.values().end());
    for (int r = 0; r < m / 2; ++r) {
        std::vector<double> lap(psi.size(), 0.0);
        for (int a = 0; a < dim; ++a) {
            const int axes[] = {a, a};
            const auto part = sp.derivative(psi, axes);
            for (std::size_t i = 0; i < lap.size(); ++i) lap[i] -= part[i];
        }
        psi = std::move(lap);
    }
    double norm = 0.0;
    if (m % 2 == 0) {
        for (double v : psi) norm += v * v;
    } else {
        for (int a = 0; a < dim; ++a) {
            const int axes[] = {a};
            for (double v : sp.derivative(psi, axes)) norm += v * v;
        }
    }
    norm *= g.cell_volume();
    IdentityReport r;
    r.id = "Polyharmonic";
    r.params = fmt::format("d={} m={} alpha={} n={}{}", dim, m, alpha, g.n, m == 1 ? " coulomb-boundary" : "");
    r.left = left;
    r.right = norm / riesz_constant(dim, alpha);
    r.residual = relative_residual(r.left, r.right);
    r.resolution = g.h();
    r.order = std::numeric_limits<double>::quiet_NaN();
    return r;
}

double moser_ratio(const ScalarField& f, const ScalarField& g, int k)
{
    const auto& grid = f.grid();
    const int d = grid.dim;
    if (k < 1 || d < 2 * k) throw std::invalid_argument("Moser probe needs d >= 2k");
    if (!(g.grid() == grid)) throw std::invalid_argument("grid mismatch");
    Spectral sp(grid);
    std::vector<double> product(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) product[i] = f[i] * g[i];
    const auto pm = sp.transform(product);
    const auto gm = sp.transform(g.values());
    const auto fm = sp.transform(f.values());
    const double cell = grid.cell_volume();
    const ModeTable table(sp);

    std::vector<double> lhs_sq(f.size(), 0.0);
    std::vector<double> hess_sq(f.size(), 0.0);
    for (const auto& [tuple, mult] : symmetric_tuples(d, k)) {
        const auto [dp, dg] = spectral_partials(sp, table, pm, tuple, gm, tuple);
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double v = dp[i] - f[i] * dg[i];
            lhs_sq[i] += mult * v * v;
            hess_sq[i] += mult * dg[i] * dg[i];
        }
    }
    for (auto& v : hess_sq) v = std::sqrt(v);
    double lhs = 0.0;
    for (double v : lhs_sq) lhs += v;
    lhs = std::sqrt(lhs * cell);

    const double f_norm = k == 1 ? lp_norm(std::vector<double>(f.values().begin(), f.values().end()), 2, cell)
                                 : lp_norm(tensor_norm(sp, table, fm, d, k - 1), 2, cell);
    const double grad_g = lp_norm(tensor_norm(sp, table, gm, d, 1), std::numeric_limits<double>::infinity(), cell);
    const double p = k == 1 ? std::numeric_limits<double>::infinity() : double(d) / (k - 1);
    const double hess_g = lp_norm(hess_sq, p, cell);
    const double bracket = f_norm * (grad_g + hess_g);
    return bracket == 0.0 ? 0.0 : lhs / bracket;
}

double gn_ratio(const ScalarField& f, int k)
{
    const auto& grid = f.grid();
    const int d = grid.dim;
    if (k < 1 || k + 1 >= d) throw std::invalid_argument("Gagliardo-Nirenberg probe needs k + 1 < d");
    Spectral sp(grid);
    const auto fm = sp.transform(f.values());
    const double cell = grid.cell_volume();
    const ModeTable table(sp);
    const double top = lp_norm(std::vector<double>(f.values().begin(), f.values().end()), double(d) / k, cell);
    const double bottom = lp_norm(tensor_norm(sp, table, fm, d, 1), double(d) / (k + 1), cell);
    return top / bottom;
}

}  // namespace modlab
