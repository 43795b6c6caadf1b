#pragma once
// Template definitions for extension_ops.hpp.

#include <stdexcept>

namespace modlab {

template <class F>
double delta_gamma_fd(F&& f, const HalfPoint& z, int dim, double gamma, double delta)
{
    if (z[dim] <= 0.0) throw std::domain_error("Delta_gamma needs xi > 0");
    const double centre = f(z);
    double lap = 0.0;
    double dxi = 0.0;
    for (int a = 0; a <= dim; ++a) {
        HalfPoint plus = z, minus = z;
        plus[a] += delta;
        minus[a] -= delta;
        const double fp = f(plus), fm = f(minus);
        lap += (fp - 2 * centre + fm) / (delta * delta);
        if (a == dim) dxi = (fp - fm) / (2 * delta);
    }
    return lap + gamma / z[dim] * dxi;
}

template <class F>
HalfSpaceField sample_half_space(const GridSpec& g, int n_xi, double xi_max, double gamma, F&& fn)
{
    HalfSpaceField out(g, n_xi, xi_max, gamma);
    std::array<double, kMaxDim> x{};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto idx = multi_index(g, i);
        for (int a = 0; a < g.dim; ++a) x[a] = g.coord(idx[a]);
        for (int q = 0; q < n_xi; ++q) out.at(i, q) = fn(std::span<const double>(x.data(), g.dim), out.xi(q));
    }
    return out;
}

}  // namespace modlab
