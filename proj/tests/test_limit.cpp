#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "modlab/limit_solvers.hpp"

using namespace modlab;

namespace {

ScalarField bump(const GridSpec& g, double width = 0.4, double floor = 0.02)
{
    return sample(g, [&](std::span<const double> x) { return std::exp(-x[0] * x[0] / (2 * width * width)) + floor; });
}

ScalarField constant(const GridSpec& g, double value)
{
    ScalarField f(g);
    for (auto& v : f.values()) v = value;
    return f;
}

double mirror_defect(const ScalarField& f)
{
    const int n = f.grid().n;
    double d = 0.0;
    for (int i = 1; i < n; ++i) d = std::max(d, std::abs(f[i] - f[n - i]));
    return d;
}

}  // namespace

TEST_CASE("upwind cell velocity picks the outflow face")
{
    CHECK(upwind_cell_velocity(0.5, 1.5) == 1.5);
    CHECK(upwind_cell_velocity(-1.5, -0.5) == -1.5);
    CHECK(upwind_cell_velocity(1.0, -1.0) == 0.0);
    CHECK(upwind_cell_velocity(-1.0, 2.0) == 1.0);
    const std::vector<double> face{0.5, 1.5, -1.0, -2.0};
    const auto cell = upwind_cell_velocity(face);
    // Cell i sits between faces i-1 and i (periodic).
    CHECK(cell[0] == upwind_cell_velocity(-2.0, 0.5));
    CHECK(cell[1] == 1.5);
    CHECK(cell[2] == 0.0);
    CHECK(cell[3] == -1.0);
}

TEST_CASE("aggregation velocity matches centred differences of the potential")
{
    const KernelParams p{0.5, 1};
    std::vector<double> err;
    for (int n : {256, 512}) {
        const GridSpec g{1, n, 4.0};
        const auto rho = bump(g);
        const auto potential = riesz_convolve(rho, p, Boundary::periodic);
        const auto u = aggregation_velocity(rho, p, 2.0).components[0];
        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            const double grad = (potential[(i + 1) % n] - potential[(i + n - 1) % n]) / (2 * g.h());
            e = std::max(e, std::abs(u[i] + grad / 2.0));
        }
        err.push_back(e);
    }
    CHECK(err[1] <= 1e-3 * aggregation_velocity(bump(GridSpec{1, 512, 4.0}), p, 2.0).components[0].max_abs());
    CHECK(std::log2(err[0] / err[1]) >= 1.8);
}

TEST_CASE("aggregation: mass, symmetry and energy decay over 1000 steps")
{
    const GridSpec g{1, 128, 4.0};
    const KernelParams p{0.5, 1};
    auto rho = bump(g);
    const double m0 = rho.mass();
    const double dt = 0.9 * aggregation_stable_dt(rho, p, 1.0);
    double e = interaction_energy(rho, p, Boundary::periodic);
    bool decays = true;
    for (int n = 0; n < 1000; ++n) {
        rho = step_aggregation(rho, dt, p, 1.0);
        const double next = interaction_energy(rho, p, Boundary::periodic);
        decays = decays && next <= e + 1e-13 * std::abs(e);
        e = next;
    }
    CHECK(decays);
    CHECK(std::abs(rho.mass() - m0) <= 1e-12 * m0);
    CHECK(mirror_defect(rho) <= 1e-10 * rho.max_abs());
    CHECK(rho.values()[0] >= 0.0);
}

TEST_CASE("MUSCL aggregation conserves mass and stays positive")
{
    const GridSpec g{1, 128, 4.0};
    const KernelParams p{0.5, 1};
    auto rho = bump(g, 0.2, 1e-3);
    const double m0 = rho.mass();
    const double dt = 0.9 * aggregation_stable_dt(rho, p, 1.0);
    for (int n = 0; n < 200; ++n) rho = step_aggregation(rho, dt, p, 1.0, true);
    CHECK(std::abs(rho.mass() - m0) <= 1e-12 * m0);
    for (double v : rho.values()) CHECK(v >= 0.0);
}

TEST_CASE("Euler-Riesz: uniform state damps exactly")
{
    const GridSpec g{1, 64, 4.0};
    const KernelParams p{0.5, 1};
    auto s = make_macro_state(constant(g, 0.3), constant(g, 0.8), 1.0, 1.5);
    const double dt = euler_riesz_stable_dt(s, 0.4);
    for (int n = 0; n < 20; ++n) s = step_euler_riesz(s, dt, p);
    const double expected = 0.8 * std::exp(-1.5 * 20 * dt);
    for (int i = 0; i < g.n; ++i) {
        CHECK(s.rho[i] == doctest::Approx(0.3).epsilon(1e-13));
        CHECK(s.velocity()[i] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("Euler-Riesz: mass conservation and self-convergence in L1")
{
    const KernelParams p{0.5, 1};
    const double t_end = 0.25;
    auto solve = [&](int n, bool muscl) {
        const GridSpec g{1, n, 4.0};
        const auto rho = bump(g);
        auto s = make_macro_state(rho, aggregation_velocity(rho, p, 1.0).components[0], 1.0, 1.0);
        const double m0 = s.rho.mass();
        // A common step for every grid keeps the comparison spatial.
        const int steps = 1024;
        for (int k = 0; k < steps; ++k) s = step_euler_riesz(s, t_end / steps, p, muscl);
        CHECK(std::abs(s.rho.mass() - m0) <= 1e-12 * m0);
        return s.rho;
    };
    auto l1 = [](const ScalarField& f) {
        double s = 0.0;
        for (double v : f.values()) s += std::abs(v);
        return s * f.grid().h();
    };
    // The first-order flux is still pre-asymptotic here: its observed order climbs toward 1
    // (0.73 on 128/256/512, 0.82 on 256/512/1024).
    for (bool muscl : {false, true}) {
        const auto r1 = solve(256, muscl), r2 = solve(512, muscl), r4 = solve(1024, muscl);
        const double order = std::log2(l1(restrict_average(r2, 2) - r1) / l1(restrict_average(r4, 2) - r2));
        INFO("muscl " << muscl);
        CHECK(order >= (muscl ? 1.8 : 0.75));
    }
}

TEST_CASE("error field of a frozen velocity is its convective derivative")
{
    const GridSpec g{1, 64, 2 * std::numbers::pi};
    const auto u = sample(g, [](std::span<const double> x) { return std::sin(x[0]); });
    const auto s = make_macro_state(constant(g, 1.0), u, 0.0, 1.0);
    const auto e = error_field_e(s, s, 0.1).components[0];
    for (int i = 0; i < g.n; ++i) {
        const double x = g.coord(i);
        CHECK(std::abs(e[i] - std::sin(x) * std::cos(x)) <= 1e-12);
    }
}

TEST_CASE("restrictions: averages keep mass, samples keep nodes")
{
    const GridSpec fine{1, 256, 4.0};
    const auto f = bump(fine);
    const auto avg = restrict_average(f, 4);
    CHECK(avg.grid().n == 64);
    CHECK(avg.mass() == doctest::Approx(f.mass()).epsilon(1e-14));
    const auto s = restrict_sample(f, 4);
    for (int i = 0; i < 64; ++i) CHECK(s[i] == f[4 * i]);
    const auto faces = restrict_face_sample(f, 4);
    for (int i = 0; i < 64; ++i) CHECK(faces[i] == f[4 * i + 2]);
    const auto flat = restrict_average(constant(fine, 0.7), 4);
    for (double v : flat.values()) CHECK(v == doctest::Approx(0.7).epsilon(1e-15));
}
