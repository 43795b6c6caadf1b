#include <quadmath.h>

#include <cmath>
#include <fmt/format.h>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "modlab/errors.hpp"
#include "modlab/extension_ops.hpp"

namespace modlab {

using quad = __float128;

namespace {

inline double rpow(double x, double y) { return std::pow(x, y); }
inline quad rpow(quad x, quad y) { return powq(x, y); }
inline double rsin(double x) { return std::sin(x); }
inline quad rsin(quad x) { return sinq(x); }

// phi^{(k)}(s) for phi(s) = s^{-beta/2}.
double phi_derivative(double s, double beta, int k)
{
    double coeff = 1.0;
    for (int i = 0; i < k; ++i) coeff *= -beta / 2 - i;
    return coeff * std::pow(s, -beta / 2 - k);
}

// Accumulates, per block count k, the sum over partitions of `axes` into singletons
// (factor 2 z_a) and pairs (factor 2 delta_ab) of the block products.
void partition_sums(std::vector<int>& remaining, const HalfPoint& z, double product, int blocks,
                    std::vector<double>& by_blocks)
{
    if (remaining.empty()) {
        by_blocks[blocks] += product;
        return;
    }
    const int first = remaining.back();
    remaining.pop_back();
    partition_sums(remaining, z, product * 2 * z[first], blocks + 1, by_blocks);
    for (std::size_t i = 0; i < remaining.size(); ++i) {
        if (remaining[i] != first) continue;
        std::vector<int> rest = remaining;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
        partition_sums(rest, z, product * 2, blocks + 1, by_blocks);
    }
    remaining.push_back(first);
}

// Real-typed value and x-gradient of the kernel, used by the quad-precision stencils.
template <class Real>
Real kernel_value(const PointSourceKernel& src, const std::array<Real, kMaxExtDim>& z)
{
    const int d = src.dim();
    const Real expo = -Real(src.beta()) / 2;
    Real total = 0;
    for (std::size_t i = 0; i < src.points().size(); ++i) {
        Real s = z[d] * z[d];
        for (int a = 0; a < d; ++a) {
            const Real c = z[a] - Real(src.points()[i][a]);
            s += c * c;
        }
        total += Real(src.weights()[i]) * rpow(s, expo);
    }
    return total;
}

template <class Real>
Real velocity_component(const SmoothVelocity& u, int comp, const std::array<Real, kMaxExtDim>& z)
{
    Real v = Real(u.constant[comp]);
    for (int b = 0; b < u.dim; ++b) v += Real(u.linear[comp][b]) * z[b];
    for (const auto& m : u.modes) {
        Real theta = Real(m.phase);
        for (int b = 0; b < u.dim; ++b) theta += Real(m.k[b]) * z[b];
        v += Real(m.amplitude[comp]) * rsin(theta);
    }
    return v;
}

// (u,0) . grad_(x,xi) K at z.
template <class Real>
Real transport_value(const SmoothVelocity& u, const PointSourceKernel& src, const std::array<Real, kMaxExtDim>& z)
{
    const int d = src.dim();
    const Real expo = -Real(src.beta()) / 2 - 1;
    std::array<Real, kMaxExtDim> grad{};
    for (std::size_t i = 0; i < src.points().size(); ++i) {
        Real s = z[d] * z[d];
        std::array<Real, kMaxExtDim> c{};
        for (int a = 0; a < d; ++a) {
            c[a] = z[a] - Real(src.points()[i][a]);
            s += c[a] * c[a];
        }
        const Real f = -Real(src.beta()) * Real(src.weights()[i]) * rpow(s, expo);
        for (int a = 0; a < d; ++a) grad[a] += f * c[a];
    }
    Real total = 0;
    for (int a = 0; a < d; ++a) total += velocity_component(u, a, z) * grad[a];
    return total;
}

// Delta_gamma^m by nested central differences in quad precision.
quad nested_delta_gamma(const std::function<quad(const std::array<quad, kMaxExtDim>&)>& f,
                        const std::array<quad, kMaxExtDim>& z, int dim, quad gamma, quad delta, int m)
{
    if (m == 0) return f(z);
    const quad centre = nested_delta_gamma(f, z, dim, gamma, delta, m - 1);
    quad lap = 0;
    quad dxi = 0;
    for (int a = 0; a <= dim; ++a) {
        auto plus = z, minus = z;
        plus[a] += delta;
        minus[a] -= delta;
        const quad fp = nested_delta_gamma(f, plus, dim, gamma, delta, m - 1);
        const quad fm = nested_delta_gamma(f, minus, dim, gamma, delta, m - 1);
        lap += (fp - 2 * centre + fm) / (delta * delta);
        if (a == dim) dxi = (fp - fm) / (2 * delta);
    }
    return lap + gamma / z[dim] * dxi;
}

std::array<quad, kMaxExtDim> to_quad(const HalfPoint& z)
{
    std::array<quad, kMaxExtDim> out{};
    for (int a = 0; a < kMaxExtDim; ++a) out[a] = z[a];
    return out;
}

void require_xi_positive(const HalfPoint& z, int dim)
{
    if (!(z[dim] > 0.0)) throw std::domain_error("evaluation requires xi > 0");
}

// Product of the one-step recursion factors taking K_from to K_{from+count}.
double step_factor(const ExtensionParams& p, int from, int count)
{
    double c = 1.0;
    for (int q = from; q < from + count; ++q) c *= -(p.alpha + 2 * q) * (2 * p.j - 2 * q);
    return c;
}

IdentityReport refinement_report(std::string id, std::string params, double coarse, double fine, double right,
                                 double delta)
{
    IdentityReport r;
    r.id = std::move(id);
    r.params = std::move(params);
    r.left = fine;
    r.right = right;
    r.residual = relative_residual(fine, right);
    r.resolution = delta / 2;
    const double e1 = std::abs(coarse - right), e2 = std::abs(fine - right);
    r.order = (e1 > 0 && e2 > 0) ? std::log2(e1 / e2) : std::numeric_limits<double>::quiet_NaN();
    return r;
}

std::string describe(const ExtensionParams& p, int level)
{
    return fmt::format("d={} alpha={} j={} gamma={} l={}", p.dim, p.alpha, p.j, p.gamma, level);
}

}  // namespace

double relative_residual(double left, double right)
{
    return std::abs(left - right) / std::max({std::abs(left), std::abs(right), 1e-300});
}

ExtensionParams gamma_exponent(double alpha, int dim)
{
    if (!(alpha > 0.0 && alpha < dim)) throw std::invalid_argument("alpha must lie in (0, d)");
    const double half = (dim - alpha) / 2;
    if (std::abs(half - std::round(half)) < 1e-12)
        throw PolyharmonicCase("(d - alpha)/2 is an integer: polyharmonic case");
    ExtensionParams p;
    p.alpha = alpha;
    p.dim = dim;
    p.j = static_cast<int>(std::floor(half));
    p.gamma = alpha - dim + 2 * p.j + 1;
    return p;
}

double recursion_coefficient(const ExtensionParams& p, int level)
{
    double c = 1.0;
    for (int q = 0; q < level; ++q) c *= (p.alpha + 2 * q) * (2 * p.j - 2 * q);
    return c;
}

PointSourceKernel::PointSourceKernel(int dim, double alpha, int level, std::vector<std::vector<double>> points,
                                     std::vector<double> weights)
    : dim_(dim), alpha_(alpha), level_(level), points_(std::move(points)), weights_(std::move(weights))
{
    if (dim < 1 || dim + 1 > kMaxExtDim) throw std::invalid_argument("unsupported dimension");
    if (points_.size() != weights_.size()) throw std::invalid_argument("points and weights differ in length");
    for (const auto& x : points_)
        if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("source point dimension");
}

PointSourceKernel PointSourceKernel::at_level(int level) const
{
    return PointSourceKernel(dim_, alpha_, level, points_, weights_);
}

double PointSourceKernel::value(const HalfPoint& z) const
{
    require_xi_positive(z, dim_);
    return kernel_value<double>(*this, z);
}

double PointSourceKernel::derivative(const HalfPoint& z, std::span<const int> axes) const
{
    require_xi_positive(z, dim_);
    double total = 0.0;
    std::vector<double> by_blocks(axes.size() + 1);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        HalfPoint rel{};
        double s = z[dim_] * z[dim_];
        for (int a = 0; a < dim_; ++a) {
            rel[a] = z[a] - points_[i][a];
            s += rel[a] * rel[a];
        }
        rel[dim_] = z[dim_];
        std::fill(by_blocks.begin(), by_blocks.end(), 0.0);
        std::vector<int> remaining(axes.begin(), axes.end());
        partition_sums(remaining, rel, 1.0, 0, by_blocks);
        double acc = 0.0;
        for (std::size_t k = 0; k < by_blocks.size(); ++k)
            if (by_blocks[k] != 0.0) acc += by_blocks[k] * phi_derivative(s, beta(), static_cast<int>(k));
        total += weights_[i] * acc;
    }
    return total;
}

double PointSourceKernel::delta_gamma(const HalfPoint& z, double gamma) const
{
    double lap = 0.0;
    for (int a = 0; a <= dim_; ++a) {
        const int axes[] = {a, a};
        lap += derivative(z, axes);
    }
    const int xi_axis[] = {dim_};
    return lap + gamma / z[dim_] * derivative(z, xi_axis);
}

PointSourceKernel random_sources(int dim, double alpha, int count, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    std::normal_distribution<double> normal;
    std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
    std::vector<double> w(count);
    for (int i = 0; i < count; ++i) {
        for (auto& c : pts[i]) c = unit(rng);
        w[i] = normal(rng);
    }
    return PointSourceKernel(dim, alpha, 0, std::move(pts), std::move(w));
}

SmoothVelocity SmoothVelocity::zero(int dim)
{
    SmoothVelocity u;
    u.dim = dim;
    u.constant.assign(dim, 0.0);
    u.linear.assign(dim, std::vector<double>(dim, 0.0));
    return u;
}

SmoothVelocity SmoothVelocity::random(int dim, int mode_count, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<int> wave(-2, 2);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    auto u = zero(dim);
    for (auto& c : u.constant) c = normal(rng);
    for (auto& row : u.linear)
        for (auto& c : row) c = 0.5 * normal(rng);
    for (int m = 0; m < mode_count; ++m) {
        Mode mode;
        mode.k.resize(dim);
        mode.amplitude.resize(dim);
        for (auto& k : mode.k) k = wave(rng);
        for (auto& a : mode.amplitude) a = 0.5 * normal(rng);
        mode.phase = angle(rng);
        u.modes.push_back(std::move(mode));
    }
    return u;
}

double SmoothVelocity::derivative(int component, std::span<const int> axes, int laplacian_power,
                                  std::span<const double> x) const
{
    double v = 0.0;
    if (laplacian_power == 0 && axes.empty()) {
        v += constant[component];
        for (int b = 0; b < dim; ++b) v += linear[component][b] * x[b];
    }
    if (laplacian_power == 0 && axes.size() == 1) v += linear[component][axes[0]];
    for (const auto& m : modes) {
        double theta = m.phase;
        double k2 = 0.0;
        for (int b = 0; b < dim; ++b) {
            theta += m.k[b] * x[b];
            k2 += m.k[b] * m.k[b];
        }
        double factor = m.amplitude[component] * std::pow(-k2, laplacian_power);
        for (int a : axes) factor *= m.k[a];
        v += factor * std::sin(theta + axes.size() * std::numbers::pi / 2);
    }
    return v;
}

IdentityReport recursion_residual(const PointSourceKernel& src, int level, const ExtensionParams& p,
                                  const HalfPoint& z)
{
    if (level < 0 || level > p.j - 1) throw std::out_of_range("recursion level must lie in [0, j-1]");
    const auto k = src.at_level(level);
    IdentityReport r;
    r.id = "Recursion";
    r.params = describe(p, level);
    r.left = k.delta_gamma(z, p.gamma);
    r.right = step_factor(p, level, 1) * src.at_level(level + 1).value(z);
    r.residual = relative_residual(r.left, r.right);
    r.order = std::numeric_limits<double>::quiet_NaN();
    return r;
}

IdentityReport recursion_residual_fd(const PointSourceKernel& src, int level, const ExtensionParams& p,
                                     const HalfPoint& z, double delta)
{
    if (level < 0 || level > p.j - 1) throw std::out_of_range("recursion level must lie in [0, j-1]");
    const auto k = src.at_level(level);
    auto f = [&](const HalfPoint& y) { return k.value(y); };
    const double right = step_factor(p, level, 1) * src.at_level(level + 1).value(z);
    const double coarse = delta_gamma_fd(f, z, p.dim, p.gamma, delta);
    const double fine = delta_gamma_fd(f, z, p.dim, p.gamma, delta / 2);
    return refinement_report("RecursionFD", describe(p, level), coarse, fine, right, delta);
}

IdentityReport iterated_recursion_residual(const PointSourceKernel& src, int level, const ExtensionParams& p,
                                           const HalfPoint& z, double delta)
{
    if (level < 1 || level > p.j) throw std::out_of_range("iterated level must lie in [1, j]");
    require_xi_positive(z, p.dim);
    const auto k0 = src.at_level(0);
    auto f = [&](const std::array<quad, kMaxExtDim>& y) { return kernel_value<quad>(k0, y); };
    const auto zq = to_quad(z);
    const double coarse = static_cast<double>(nested_delta_gamma(f, zq, p.dim, p.gamma, delta, level));
    const double fine = static_cast<double>(nested_delta_gamma(f, zq, p.dim, p.gamma, quad(delta) / 2, level));
    const double sign = level % 2 == 0 ? 1.0 : -1.0;
    const double right = sign * recursion_coefficient(p, level) * src.at_level(level).value(z);
    return refinement_report("IteratedRecursion", describe(p, level), coarse, fine, right, delta);
}

double leibniz_rhs(int m, const SmoothVelocity& u, const PointSourceKernel& src, const ExtensionParams& p,
                   const HalfPoint& z)
{
    const int d = p.dim;
    std::span<const double> x(z.data(), d);
    double total = 0.0;
    for (int l1 = 0; l1 <= m; ++l1)
        for (int l2 = 0; l1 + l2 <= m; ++l2) {
            const int order = m - l1 - l2;
            const double multinomial =
                std::tgamma(m + 1.0) / (std::tgamma(l1 + 1.0) * std::tgamma(l2 + 1.0) * std::tgamma(order + 1.0));
            const double prefactor = multinomial * std::pow(2.0, order) * step_factor(p, 0, l2);
            const auto kernel = src.at_level(l2);
            // Sum over index tuples (j_1..j_p) in {0..d-1}^p.
            std::vector<int> tuple(order, 0);
            while (true) {
                std::vector<int> axes(tuple);
                axes.push_back(0);
                for (int a = 0; a < d; ++a) {
                    axes.back() = a;
                    total += prefactor * u.derivative(a, tuple, l1, x) * kernel.derivative(z, axes);
                }
                int pos = 0;
                while (pos < order && ++tuple[pos] == d) tuple[pos++] = 0;
                if (pos == order) break;
            }
        }
    return total;
}

IdentityReport leibniz_residual(int m, const SmoothVelocity& u, const PointSourceKernel& src,
                                const ExtensionParams& p, const HalfPoint& z, double delta)
{
    if (m < 0 || m > p.j) throw std::out_of_range("Leibniz order must lie in [0, j]");
    if (src.level() != 0) throw std::invalid_argument("Leibniz expansion starts from level 0");
    require_xi_positive(z, p.dim);
    const double right = leibniz_rhs(m, u, src, p, z);
    auto f = [&](const std::array<quad, kMaxExtDim>& y) { return transport_value<quad>(u, src, y); };
    const auto zq = to_quad(z);
    const double coarse = static_cast<double>(nested_delta_gamma(f, zq, p.dim, p.gamma, delta, m));
    const double fine = static_cast<double>(nested_delta_gamma(f, zq, p.dim, p.gamma, quad(delta) / 2, m));
    return refinement_report("Leibniz", fmt::format("{} m={}", describe(p, 0), m), coarse, fine, right, delta);
}

IdentityReport xi_half_relation_residual(const PointSourceKernel& src, const ExtensionParams& p, const HalfPoint& z)
{
    if (p.j != 1) throw std::invalid_argument("the half relation needs d-4 < alpha < d-2");
    const auto k = src.at_level(0);
    const int xi_axis[] = {p.dim};
    IdentityReport r;
    r.id = "XiHalf";
    r.params = describe(p, 0);
    r.left = k.derivative(z, xi_axis) / z[p.dim];
    r.right = 0.5 * k.delta_gamma(z, p.gamma);
    r.residual = relative_residual(r.left, r.right);
    r.order = std::numeric_limits<double>::quiet_NaN();
    return r;
}

}  // namespace modlab
