#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "modlab/errors.hpp"
#include "modlab/fft.hpp"
#include "modlab/field_io.hpp"
#include "modlab/spectral_riesz.hpp"
#include "oracles.hpp"

using namespace modlab;

namespace {

ScalarField gaussian(const GridSpec& g, double sigma, double shift = 0.0)
{
    return sample(g, [&](std::span<const double> x) {
        double r2 = 0.0;
        for (double c : x) r2 += (c - shift) * (c - shift);
        return std::exp(-r2 / (2 * sigma * sigma)) / std::pow(2 * std::numbers::pi * sigma * sigma, x.size() / 2.0);
    });
}

double rel_sup_error(const ScalarField& a, const ScalarField& b)
{
    return (a - b).max_abs() / b.max_abs();
}

}  // namespace

TEST_CASE("symbol of |x|^-1/2 on the line matches the oscillatory integral")
{
    const KernelParams p{0.5, 1};
    const double k[] = {1.0};
    const double reference = oracle::half_power_cosine_transform();
    CHECK(reference == doctest::Approx(std::sqrt(2 * std::numbers::pi)).epsilon(1e-9));
    CHECK(riesz_symbol(p, k) == doctest::Approx(reference).epsilon(1e-9));
    CHECK(riesz_symbol(p, k) == doctest::Approx(2.50663).epsilon(1e-5));
}

TEST_CASE("symbol vanishes at the zero mode and rejects alpha outside (0, d)")
{
    const double zero[] = {0.0, 0.0, 0.0};
    CHECK(riesz_symbol({1.0, 3}, zero) == 0.0);
    CHECK(riesz_symbol({1.0, 3, Normalization::coulomb}, zero) == 0.0);
    const double k[] = {1.0};
    CHECK_THROWS(riesz_symbol({1.5, 1}, k));
    CHECK_THROWS(riesz_symbol({0.0, 1}, k));
    CHECK_THROWS(KernelParams{0.5, 3, Normalization::coulomb}.validate());
}

TEST_CASE("coulomb symbol is 1/|k|^2, raw symbol is 4 pi/|k|^2")
{
    const double k[] = {0.3, -1.2, 2.0};
    const double k2 = 0.09 + 1.44 + 4.0;
    CHECK(riesz_symbol({1.0, 3, Normalization::coulomb}, k) == doctest::Approx(1.0 / k2).epsilon(1e-14));
    CHECK(riesz_symbol({1.0, 3}, k) == doctest::Approx(4 * std::numbers::pi / k2).epsilon(1e-14));
}

TEST_CASE("minus Laplacian of the coulomb potential recovers a mean-zero density")
{
    const GridSpec g{3, 16, 2.0};
    std::mt19937_64 rng(7);
    auto rho = band_limited_field(g, 5, rng);
    const double mean = rho.mass() / std::pow(g.length, 3);
    for (auto& v : rho.values()) v -= mean;
    const auto phi = riesz_convolve(rho, {1.0, 3, Normalization::coulomb}, Boundary::periodic);
    Spectral sp(g);
    ScalarField lap(g);
    for (int a = 0; a < 3; ++a) {
        const int axes[] = {a, a};
        lap += ScalarField(g, sp.derivative(phi.values(), axes));
    }
    CHECK(rel_sup_error(-1.0 * lap, rho) < 1e-8);
}

TEST_CASE("singular cell average: closed form on the line, quadrature in higher dimensions")
{
    CHECK(singular_cell_average(1, 0.5, 0.2) == doctest::Approx(std::pow(0.1, -0.5) / 0.5).epsilon(1e-14));
    // Monte-Carlo-free check: the 2-d average of |x|^-1 over [-1/2,1/2]^2 is 4 asinh(1).
    CHECK(singular_cell_average(2, 1.0, 1.0) == doctest::Approx(4 * std::asinh(1.0)).epsilon(1e-12));
    // 3-d, alpha=1: 24 * int_0^1 int_0^1 (1+s^2+t^2)^{-1/2} * (1/2)... compared against a brute tensor rule.
    double brute = 0.0;
    const int m = 400;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k) {
                const double x = (i + 0.5) / m - 0.5, y = (j + 0.5) / m - 0.5, z = (k + 0.5) / m - 0.5;
                brute += 1.0 / std::sqrt(x * x + y * y + z * z);
            }
    brute /= double(m) * m * m;
    CHECK(singular_cell_average(3, 1.0, 1.0) == doctest::Approx(brute).epsilon(2e-4));
}

TEST_CASE("free-space convolution agrees with the direct sum in 1-d")
{
    const GridSpec g{1, 128, 4.0};
    const auto rho = gaussian(g, 0.1);
    for (double alpha : {0.3, 0.5, 0.8}) {
        const KernelParams p{alpha, 1};
        const auto fast = riesz_convolve(rho, p);
        const auto direct = direct_convolution_oracle(rho, p);
        CHECK(rel_sup_error(fast, direct) < 1e-6);
        const std::size_t centre = g.n / 2;
        CHECK(fast[centre] == doctest::Approx(direct[centre]).epsilon(1e-6));
    }
}

TEST_CASE("direct oracle: zero field, unit cell, cost guard")
{
    const GridSpec g{1, 16, 1.0};
    const KernelParams p{0.5, 1};
    CHECK(direct_convolution_oracle(ScalarField(g), p).max_abs() == 0.0);
    ScalarField delta(g);
    delta[8] = 1.0 / g.h();
    const auto out = direct_convolution_oracle(delta, p);
    CHECK(out[8] == doctest::Approx(singular_cell_average(1, 0.5, g.h())).epsilon(1e-14));
    CHECK(out[11] == doctest::Approx(std::pow(3 * g.h(), -0.5)).epsilon(1e-14));
    CHECK_THROWS_AS(direct_convolution_oracle(ScalarField(GridSpec{3, 128, 1.0}), {1.0, 3}), CostGuard);
}

TEST_CASE("free-space convolution: linearity and symmetry")
{
    const GridSpec g{1, 64, 8.0};
    const KernelParams p{0.5, 1};
    CHECK(riesz_convolve(ScalarField(g), p).max_abs() == 0.0);
    const auto rho = gaussian(g, 0.2) + 0.5 * gaussian(g, 0.1, 0.3) + 0.5 * gaussian(g, 0.1, -0.3);
    const auto phi = riesz_convolve(rho, p);
    const auto grad = riesz_gradient(rho, p);
    for (int i = 1; i < g.n; ++i) {
        CHECK(phi[i] == doctest::Approx(phi[g.n - i]).epsilon(1e-12));
        CHECK(grad.components[0][i] == doctest::Approx(-grad.components[0][g.n - i]).scale(phi.max_abs()).epsilon(1e-12));
    }
}

TEST_CASE("gradient matches centred differences of the potential to second order")
{
    auto error_at = [](int n) {
        const GridSpec g{1, n, 4.0};
        const auto rho = gaussian(g, 0.1);
        const KernelParams p{0.5, 1};
        const auto phi = riesz_convolve(rho, p);
        const auto grad = riesz_gradient(rho, p);
        double err = 0.0;
        for (int i = 1; i + 1 < n; ++i)
            err = std::max(err, std::abs((phi[i + 1] - phi[i - 1]) / (2 * g.h()) - grad.components[0][i]));
        return err / grad.components[0].max_abs();
    };
    const double coarse = error_at(128);
    const double fine = error_at(256);
    const double order = std::log2(coarse / fine);
    CHECK(order > 1.7);
    CHECK(order < 2.3);
}

TEST_CASE("periodic fields: constant density produces no force")
{
    const GridSpec g{2, 16, 1.0};
    ScalarField rho(g);
    for (auto& v : rho.values()) v = 3.0;
    const auto grad = riesz_gradient(rho, {0.7, 2}, Boundary::periodic);
    for (const auto& c : grad.components) CHECK(c.max_abs() < 1e-14);
}

TEST_CASE("interaction energy: direct sum, zero field, scaling, bilinearity")
{
    const GridSpec g{1, 128, 4.0};
    const KernelParams p{0.5, 1};
    const auto rho = gaussian(g, 0.1);
    const auto direct = direct_convolution_oracle(rho, p);
    double reference = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) reference += 0.5 * rho[i] * direct[i] * g.h();
    CHECK(interaction_energy(rho, p) == doctest::Approx(reference).epsilon(1e-6));
    CHECK(interaction_energy(ScalarField(g), p) == 0.0);
    CHECK(interaction_energy(3.0 * rho, p) == doctest::Approx(9.0 * interaction_energy(rho, p)).epsilon(1e-12));
    const auto sigma = gaussian(g, 0.1, 0.2);
    const double lhs = interaction_energy(rho + sigma, p) + interaction_energy(rho - sigma, p);
    const double rhs = 2 * interaction_energy(rho, p) + 2 * interaction_energy(sigma, p);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("modulated energy of a sine perturbation: closed form and periodised double sum")
{
    const double alpha = 0.5, length = 2.0, amp = 0.3;
    const GridSpec g{1, 512, length};
    const KernelParams p{alpha, 1};
    const double k = 2 * std::numbers::pi / length;
    auto rho = sample(g, [&](std::span<const double> x) { return 1.0 + amp * std::sin(k * x[0]); });
    auto rhobar = sample(g, [](std::span<const double>) { return 1.0; });
    const auto e = modulated_interaction_energy(rho, rhobar, p);
    CHECK_FALSE(e.mass_mismatch);
    const double closed = 0.5 * riesz_constant(1, alpha) * std::pow(k, alpha - 1) * amp * amp * length / 2;
    CHECK(e.value == doctest::Approx(closed).epsilon(1e-12));

    // Periodised kernel with the zero mode removed, L^-a [zeta(a, x/L) + zeta(a, 1 - x/L)],
    // averaged exactly over each cell through the antiderivative zeta(a-1, .)/(1-a).
    const double h = g.h();
    auto antiderivative = [&](double s) { return oracle::hurwitz_zeta(alpha - 1, s) / (1 - alpha); };
    auto integral = [&](double a0, double a1) {  // int_{a0}^{a1} zeta(a,s)+zeta(a,1-s) ds, 0 <= a0 < a1 <= 1
        return antiderivative(a1) - antiderivative(a0) - antiderivative(1 - a1) + antiderivative(1 - a0);
    };
    const double cell = 1.0 / g.n;
    std::vector<double> kernel(g.n);
    kernel[0] = 2 * integral(0.0, cell / 2) / cell;
    for (int m = 1; m < g.n; ++m) kernel[m] = integral((m - 0.5) * cell, (m + 0.5) * cell) / cell;
    for (auto& v : kernel) v *= std::pow(length, -alpha);
    double sum = 0.0;
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j)
            sum += (rho[i] - 1.0) * (rho[j] - 1.0) * kernel[(i - j + g.n) % g.n];
    CHECK(0.5 * sum * h * h == doctest::Approx(closed).epsilon(1e-4));
}

TEST_CASE("hurwitz zeta oracle reproduces known values")
{
    CHECK(oracle::hurwitz_zeta(2.0, 1.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-13));
    CHECK(oracle::hurwitz_zeta(0.5, 1.0) == doctest::Approx(-1.4603545088095868).epsilon(1e-12));
    CHECK(oracle::hurwitz_zeta(0.0, 0.3) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("modulated energy: identical states, mass flag, positivity")
{
    const GridSpec g{2, 16, 1.0};
    const KernelParams p{1.2, 2};
    std::mt19937_64 rng(11);
    const auto rho = band_limited_field(g, 4, rng);
    CHECK(modulated_interaction_energy(rho, rho, p).value == 0.0);
    auto shifted = rho;
    for (auto& v : shifted.values()) v += 0.1;
    CHECK(modulated_interaction_energy(shifted, rho, p).mass_mismatch);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = band_limited_field(g, 7, rng);
        const auto b = band_limited_field(g, 7, rng);
        const double scale = (a - b).max_abs() * (a - b).max_abs();
        CHECK(modulated_interaction_energy(a, b, p).value >= -1e-12 * scale);
    }
}

TEST_CASE("kernel-table energy converges to the symbol energy at order d - alpha")
{
    // A separated dipole is mean-zero, so on a large torus the periodic images only
    // contribute at O(L^{-alpha-2}).
    const KernelParams p{0.5, 1};
    auto dipole = [](const GridSpec& g) { return gaussian(g, 0.15, -0.25) - gaussian(g, 0.15, 0.25); };
    const GridSpec torus{1, 4096, 64.0};
    const double reference = modulated_interaction_energy(dipole(torus), ScalarField(torus), p).value;
    std::vector<double> err;
    for (int n : {128, 256, 512}) {
        const GridSpec g{1, n, 8.0};
        err.push_back(std::abs(interaction_energy(dipole(g), p) - reference) / reference);
    }
    for (int i = 0; i < 2; ++i) {
        const double order = std::log2(err[i] / err[i + 1]);
        CHECK(order > 0.4);
        CHECK(order < 0.6);
    }
    CHECK(err[2] < 1e-2);
}

TEST_CASE("commutator ratio: constant velocity, degenerate input, coulomb bound")
{
    const GridSpec g{3, 16, 2 * std::numbers::pi};
    const KernelParams p{1.0, 3, Normalization::coulomb};
    std::mt19937_64 rng(3);
    const auto rho = band_limited_field(g, 3, rng);
    const auto rhobar = band_limited_field(g, 3, rng);
    VectorField u(g);
    for (int a = 0; a < 3; ++a)
        for (auto& v : u.components[a].values()) v = 0.5 + a;
    const auto flat = commutator_bound_ratio(rho, rhobar, u, p);
    CHECK(std::abs(flat.lhs) < 1e-12 * flat.energy);
    CHECK_THROWS_AS(commutator_bound_ratio(rho, rho, u, p), DegenerateInput);
    for (int trial = 0; trial < 10; ++trial) {
        VectorField w(g);
        for (int a = 0; a < 3; ++a) w.components[a] = band_limited_field(g, 2, rng);
        const auto r = commutator_bound_ratio(band_limited_field(g, 3, rng), band_limited_field(g, 3, rng), w, p);
        CHECK(std::abs(r.ratio) <= 1.5 * gradient_sup_norm(w) * 1.05);
    }
}

TEST_CASE("field files round-trip")
{
    const GridSpec g{2, 8, 1.5};
    std::mt19937_64 rng(5);
    const auto f = band_limited_field(g, 3, rng);
    const auto path = std::filesystem::temp_directory_path() / "modlab_roundtrip.rmlf";
    write_field(f, path);
    const auto back = read_field(path);
    CHECK(back.grid() == g);
    CHECK((back - f).max_abs() == 0.0);
    std::filesystem::remove(path);
}
