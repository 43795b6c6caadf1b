#include "modlab/spectral_riesz.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <spdlog/spdlog.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "modlab/errors.hpp"
#include "modlab/fft.hpp"

namespace modlab {

using cplx = std::complex<double>;

void KernelParams::validate() const
{
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("kernel dimension out of range");
    if (!(alpha > 0.0 && alpha < dim)) throw std::invalid_argument("alpha must lie in (0, d)");
    if (normalization == Normalization::coulomb && (dim < 3 || std::abs(alpha - (dim - 2)) > 1e-12))
        throw std::invalid_argument("coulomb normalization requires d >= 3 and alpha = d - 2");
}

double KernelParams::kernel_scale() const
{
    return normalization == Normalization::coulomb ? 1.0 / riesz_constant(dim, alpha) : 1.0;
}

double riesz_constant(int dim, double alpha)
{
    const double d = dim;
    return std::pow(std::numbers::pi, d / 2) * std::pow(2.0, d - alpha) * std::tgamma((d - alpha) / 2) /
           std::tgamma(alpha / 2);
}

double riesz_symbol(const KernelParams& params, std::span<const double> k)
{
    params.validate();
    double k2 = 0.0;
    for (double c : k) k2 += c * c;
    if (k2 == 0.0) return 0.0;
    return params.kernel_scale() * riesz_constant(params.dim, params.alpha) *
           std::pow(k2, (params.alpha - params.dim) / 2);
}

namespace {

// int_{[0,1]^m} (1+|s|^2)^{-alpha/2} ds; the integrand is analytic so a fixed
// Gauss-Legendre rule per axis is accurate to rounding.
double unit_cube_integral(int m, double alpha)
{
    using Rule = boost::math::quadrature::gauss<double, 30>;
    std::function<double(int, double)> level = [&](int remaining, double s2) -> double {
        if (remaining == 0) return std::pow(1.0 + s2, -alpha / 2);
        return Rule::integrate([&](double s) { return level(remaining - 1, s2 + s * s); }, 0.0, 1.0);
    };
    return level(m, 0.0);
}

std::vector<int> shape_of(int dim, int n) { return std::vector<int>(dim, n); }

// Padded-grid kernel table: axis index p maps to offset p (p < n) or p - 2n.
std::vector<double> kernel_table(const GridSpec& g, const KernelParams& params)
{
    const int n2 = 2 * g.n;
    std::size_t total = 1;
    for (int a = 0; a < g.dim; ++a) total *= n2;
    std::vector<double> table(total);
    const double scale = params.kernel_scale();
    const double h = g.h();
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            const int p = static_cast<int>(rem % n2);
            rem /= n2;
            const int m = p < g.n ? p : p - n2;
            r2 += double(m) * m;
        }
        table[i] = r2 == 0.0 ? scale * singular_cell_average(g.dim, params.alpha, h)
                             : scale * std::pow(r2 * h * h, -params.alpha / 2);
    }
    return table;
}

using KernelKey = std::tuple<int, int, double, double, int>;

// Transformed kernel tables are reused across calls; the cache is internal only.
std::vector<cplx> kernel_spectrum(const GridSpec& g, const KernelParams& params)
{
    static std::mutex mutex;
    static std::map<KernelKey, std::vector<cplx>> cache;
    const KernelKey key{g.dim, g.n, g.length, params.alpha, static_cast<int>(params.normalization)};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    const auto table = kernel_table(g, params);
    Fft fft(shape_of(g.dim, 2 * g.n));
    auto buf = fft.data();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = table[i];
    fft.forward();
    std::vector<cplx> spectrum(buf.begin(), buf.end());
    std::lock_guard lock(mutex);
    if (cache.size() > 32) cache.clear();
    cache.emplace(key, spectrum);
    return spectrum;
}

void warn_on_leakage(const ScalarField& rho)
{
    const double leak = support_leakage(rho);
    if (leak > 1e-10)
        spdlog::warn("density mass outside the central half-box: {:.3e} of total", leak);
}

// Zero-padded free-space convolution of the values of f.
ScalarField free_space_convolve(const ScalarField& f, const KernelParams& params)
{
    const auto& g = f.grid();
    const int n2 = 2 * g.n;
    const auto spectrum = kernel_spectrum(g, params);
    Fft fft(shape_of(g.dim, n2));
    auto buf = fft.data();
    std::fill(buf.begin(), buf.end(), cplx{});
    GridSpec padded{g.dim, n2, 2 * g.length};
    for (std::size_t i = 0; i < f.size(); ++i) buf[flat_index(padded, multi_index(g, i))] = f[i];
    fft.forward();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= spectrum[i];
    fft.backward();
    ScalarField out(g);
    const double w = g.cell_volume() / static_cast<double>(buf.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[flat_index(padded, multi_index(g, i))].real() * w;
    return out;
}

std::vector<double> periodic_multipliers(Spectral& sp, const KernelParams& params)
{
    const auto& g = sp.grid();
    std::vector<double> mult(g.size());
    const double c = params.kernel_scale() * riesz_constant(params.dim, params.alpha);
    for (std::size_t m = 0; m < mult.size(); ++m) {
        const double k2 = sp.k_squared(m);
        mult[m] = k2 == 0.0 ? 0.0 : c * std::pow(k2, (params.alpha - params.dim) / 2);
    }
    return mult;
}

void check_dims(const ScalarField& rho, const KernelParams& params)
{
    params.validate();
    rho.grid().validate();
    if (rho.grid().dim != params.dim) throw std::invalid_argument("field and kernel dimensions differ");
    if (!rho.all_finite()) throw std::invalid_argument("density has non-finite values");
}

}  // namespace

double singular_cell_average(int dim, double alpha, double h)
{
    if (!(alpha > 0.0 && alpha < dim)) throw std::invalid_argument("alpha must lie in (0, d)");
    static std::mutex mutex;
    static std::map<std::pair<int, double>, double> cache;
    double cube = 0.0;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find({dim, alpha}); it != cache.end()) cube = it->second;
    }
    if (cube == 0.0) {
        cube = dim / (dim - alpha) * unit_cube_integral(dim - 1, alpha);
        std::lock_guard lock(mutex);
        cache[{dim, alpha}] = cube;
    }
    return std::pow(h / 2, -alpha) * cube;
}

ScalarField riesz_convolve(const ScalarField& rho, const KernelParams& params, Boundary boundary)
{
    check_dims(rho, params);
    if (boundary == Boundary::free_space) {
        warn_on_leakage(rho);
        return free_space_convolve(rho, params);
    }
    Spectral sp(rho.grid());
    auto modes = sp.transform(rho.values());
    const auto mult = periodic_multipliers(sp, params);
    for (std::size_t m = 0; m < modes.size(); ++m) modes[m] *= mult[m];
    return ScalarField(rho.grid(), sp.inverse(modes));
}

VectorField riesz_gradient(const ScalarField& rho, const KernelParams& params, Boundary boundary)
{
    check_dims(rho, params);
    const auto& g = rho.grid();
    VectorField out(g);
    if (boundary == Boundary::free_space) {
        warn_on_leakage(rho);
        // K * (d rho): differentiating the smooth density avoids a singular kernel derivative.
        const auto drho = periodic_gradient(rho);
        for (int a = 0; a < g.dim; ++a) out.components[a] = free_space_convolve(drho.components[a], params);
        return out;
    }
    Spectral sp(g);
    const auto modes = sp.transform(rho.values());
    const auto mult = periodic_multipliers(sp, params);
    for (int a = 0; a < g.dim; ++a) {
        std::vector<cplx> dk(modes.size());
        for (std::size_t m = 0; m < modes.size(); ++m)
            dk[m] = sp.on_nyquist(m) ? cplx{} : cplx(0.0, sp.k_component(m, a)) * mult[m] * modes[m];
        out.components[a] = ScalarField(g, sp.inverse(dk));
    }
    return out;
}

double interaction_energy(const ScalarField& rho, const KernelParams& params, Boundary boundary)
{
    const auto potential = riesz_convolve(rho, params, boundary);
    double s = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) s += rho[i] * potential[i];
    return 0.5 * s * rho.grid().cell_volume();
}

ModulatedEnergy modulated_interaction_energy(const ScalarField& rho, const ScalarField& rhobar,
                                             const KernelParams& params)
{
    check_dims(rho, params);
    check_dims(rhobar, params);
    const auto diff = rho - rhobar;
    ModulatedEnergy out;
    const double scale = std::max({std::abs(rho.mass()), std::abs(rhobar.mass()), 1e-300});
    out.mass_mismatch = std::abs(rho.mass() - rhobar.mass()) > 1e-10 * scale;
    Spectral sp(diff.grid());
    const auto modes = sp.transform(diff.values());
    const auto mult = periodic_multipliers(sp, params);
    double s = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) s += mult[m] * std::norm(modes[m]);
    out.value = 0.5 * s * diff.grid().cell_volume() / static_cast<double>(modes.size());
    return out;
}

ScalarField direct_convolution_oracle(const ScalarField& rho, const KernelParams& params)
{
    check_dims(rho, params);
    const auto& g = rho.grid();
    if (g.size() > (std::size_t{1} << 20)) throw CostGuard("direct oracle limited to 2^20 grid points");
    const auto table = kernel_table(g, params);
    const int n2 = 2 * g.n;
    std::vector<std::size_t> sources;
    for (std::size_t j = 0; j < rho.size(); ++j)
        if (rho[j] != 0.0) sources.push_back(j);
    std::vector<MultiIndex> source_idx;
    for (auto j : sources) source_idx.push_back(multi_index(g, j));
    ScalarField out(g);
    const double w = g.cell_volume();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto xi = multi_index(g, i);
        double s = 0.0;
        for (std::size_t q = 0; q < sources.size(); ++q) {
            std::size_t t = 0;
            for (int a = 0; a < g.dim; ++a) {
                int off = xi[a] - source_idx[q][a];
                if (off < 0) off += n2;
                t = t * n2 + off;
            }
            s += table[t] * rho[sources[q]];
        }
        out[i] = s * w;
    }
    return out;
}

CommutatorRatio commutator_bound_ratio(const ScalarField& rho, const ScalarField& rhobar,
                                       const VectorField& u, const KernelParams& params)
{
    check_dims(rho, params);
    check_dims(rhobar, params);
    const auto diff = rho - rhobar;
    if (static_cast<int>(u.components.size()) != params.dim) throw std::invalid_argument("velocity dimension");
    CommutatorRatio out;
    const auto potential = riesz_convolve(diff, params, Boundary::periodic);
    const auto force = riesz_gradient(diff, params, Boundary::periodic);
    double lhs = 0.0;
    double energy = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) {
        double dot = 0.0;
        for (int a = 0; a < params.dim; ++a) dot += u.components[a][i] * force.components[a][i];
        lhs += diff[i] * dot;
        energy += diff[i] * potential[i];
    }
    const double w = diff.grid().cell_volume();
    out.lhs = lhs * w;
    out.energy = energy * w;
    const double scale = diff.max_abs() * diff.max_abs() * std::pow(diff.grid().length, diff.grid().dim);
    if (!(out.energy > 1e-14 * scale) || scale == 0.0) throw DegenerateInput("modulated energy vanishes");
    out.ratio = out.lhs / out.energy;
    return out;
}

double support_leakage(const ScalarField& rho)
{
    const auto& g = rho.grid();
    double inside = 0.0;
    double outside = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const auto idx = multi_index(g, i);
        bool central = true;
        for (int a = 0; a < g.dim; ++a)
            if (std::abs(g.coord(idx[a])) >= g.length / 4) central = false;
        (central ? inside : outside) += std::abs(rho[i]);
    }
    const double total = inside + outside;
    return total == 0.0 ? 0.0 : outside / total;
}

VectorField periodic_gradient(const ScalarField& f)
{
    const auto& g = f.grid();
    VectorField out(g);
    Spectral sp(g);
    for (int a = 0; a < g.dim; ++a) {
        const int axis[1] = {a};
        out.components[a] = ScalarField(g, sp.derivative(f.values(), axis));
    }
    return out;
}

double gradient_sup_norm(const VectorField& u)
{
    const int d = static_cast<int>(u.components.size());
    std::vector<VectorField> jac;
    for (const auto& c : u.components) jac.push_back(periodic_gradient(c));
    double best = 0.0;
    Eigen::MatrixXd m(d, d);
    for (std::size_t i = 0; i < u.grid.size(); ++i) {
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) m(r, c) = jac[r].components[c][i];
        const double nuclear = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().sum();
        best = std::max(best, nuclear);
    }
    return best;
}

ScalarField band_limited_field(const GridSpec& g, int max_mode, std::mt19937_64& rng)
{
    if (max_mode < 0 || 2 * max_mode >= g.n) throw std::invalid_argument("max_mode must stay below Nyquist");
    std::normal_distribution<double> normal;
    Spectral sp(g);
    std::vector<cplx> modes(g.size());
    const auto k1 = 2.0 * std::numbers::pi / g.length;
    for (std::size_t m = 0; m < modes.size(); ++m) {
        bool inside = true;
        for (int a = 0; a < g.dim; ++a)
            if (std::abs(sp.k_component(m, a)) > k1 * max_mode + 1e-9) inside = false;
        if (!inside) continue;
        const double decay = 1.0 / (1.0 + sp.k_squared(m) / (k1 * k1));
        const double re = normal(rng);
        const double im = normal(rng);
        modes[m] = cplx(re, im) * decay * static_cast<double>(g.size());
    }
    return ScalarField(g, sp.inverse(modes));
}

}  // namespace modlab
