#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "modlab/errors.hpp"
#include "modlab/extension_ops.hpp"
#include "modlab/spectral_riesz.hpp"

using namespace modlab;

namespace {

HalfPoint point(std::initializer_list<double> coords)
{
    HalfPoint z{};
    std::size_t i = 0;
    for (double c : coords) z[i++] = c;
    return z;
}

PointSourceKernel unit_source(int dim, double alpha, int level = 0)
{
    return PointSourceKernel(dim, alpha, level, {std::vector<double>(dim, 0.0)}, {1.0});
}

// Sample points spread over the half-space away from the unit-cube sources.
std::vector<HalfPoint> sample_cloud(int dim, int count, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> x(-1.5, 2.5), xi(0.2, 2.0);
    std::vector<HalfPoint> out(count);
    for (auto& z : out) {
        for (int a = 0; a < dim; ++a) z[a] = x(rng);
        z[dim] = xi(rng);
    }
    return out;
}

// Trigonometric sum on [0, 2 pi)^d with integer modes up to max_mode.
struct TrigSum {
    std::vector<std::vector<int>> k;
    std::vector<double> amplitude, phase;

    double operator()(std::span<const double> x) const
    {
        double s = 0.0;
        for (std::size_t m = 0; m < k.size(); ++m) {
            double theta = phase[m];
            for (std::size_t a = 0; a < x.size(); ++a) theta += k[m][a] * x[a];
            s += amplitude[m] * std::cos(theta);
        }
        return s;
    }
};

TrigSum random_trig(int dim, int modes, int max_mode, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> wave(-max_mode, max_mode);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    std::normal_distribution<double> normal;
    TrigSum t;
    for (int m = 0; m < modes; ++m) {
        std::vector<int> k(dim);
        bool zero = true;
        for (auto& c : k) {
            c = wave(rng);
            zero = zero && c == 0;
        }
        if (zero) k[0] = 1;
        t.k.push_back(k);
        t.amplitude.push_back(normal(rng));
        t.phase.push_back(angle(rng));
    }
    return t;
}

}  // namespace

TEST_CASE("gamma exponent examples")
{
    auto p = gamma_exponent(0.5, 5);
    CHECK(p.j == 2);
    CHECK(p.gamma == doctest::Approx(0.5));
    p = gamma_exponent(2.5, 3);
    CHECK(p.j == 0);
    CHECK(p.gamma == doctest::Approx(0.5));
    CHECK_THROWS_AS(gamma_exponent(1.0, 3), PolyharmonicCase);
    CHECK_THROWS_AS(gamma_exponent(3.0, 5), PolyharmonicCase);
    CHECK_THROWS(gamma_exponent(0.0, 3));
    CHECK_THROWS(gamma_exponent(3.0, 3));
}

TEST_CASE("gamma exponent range property")
{
    for (int d = 1; d <= 7; ++d)
        for (double alpha = 0.05; alpha < d; alpha += 0.1) {
            if (std::abs(std::remainder(d - alpha, 2.0)) < 1e-9) continue;
            const auto p = gamma_exponent(alpha, d);
            CHECK(d - 2 * p.j - 2 < alpha);
            CHECK(alpha < d - 2 * p.j);
            CHECK(p.gamma > -1);
            CHECK(p.gamma < 1);
            if (alpha > d - 2) CHECK(p.j == 0);
        }
}

TEST_CASE("Delta_gamma of the unit source at (e1, 1)")
{
    const auto p = gamma_exponent(0.5, 5);
    const auto src = unit_source(5, 0.5);
    const auto z = point({1, 0, 0, 0, 0, 1});
    const double expected = -std::pow(2.0, -0.25);
    CHECK(src.delta_gamma(z, p.gamma) == doctest::Approx(expected).epsilon(1e-14));
    const auto fd = delta_gamma_fd([&](const HalfPoint& w) { return src.value(w); }, z, 5, p.gamma, 1e-4);
    CHECK(fd == doctest::Approx(expected).epsilon(1e-6));
    const auto r = recursion_residual(src, 0, p, z);
    CHECK(r.left == doctest::Approx(expected).epsilon(1e-14));
    CHECK(r.right == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("Delta_gamma annihilates xi-independent harmonic functions")
{
    auto f = [](const HalfPoint& z) { return z[0] * z[0] - z[1] * z[1] + 3 * z[0] * z[1]; };
    CHECK(std::abs(delta_gamma_fd(f, point({0.3, -0.7, 0.9}), 2, 0.4, 1e-3)) < 1e-8);
    CHECK_THROWS_AS(delta_gamma_fd(f, point({0.3, -0.7, 0.0}), 2, 0.4, 1e-3), std::domain_error);
    CHECK_THROWS_AS(unit_source(2, 0.5).value(point({0.3, -0.7, -0.1})), std::domain_error);
}

TEST_CASE("closed-form derivatives agree with finite differences")
{
    std::mt19937_64 rng(5);
    const auto src = random_sources(3, 0.7, 5, rng);
    const auto z = point({0.4, 1.9, -0.3, 0.8});
    const double h = 1e-4;
    for (int a = 0; a <= 3; ++a) {
        auto plus = z, minus = z;
        plus[a] += h;
        minus[a] -= h;
        const int axes[] = {a};
        CHECK(src.derivative(z, axes) ==
              doctest::Approx((src.value(plus) - src.value(minus)) / (2 * h)).epsilon(1e-7));
        for (int b = 0; b <= 3; ++b) {
            const int pair[] = {a, b};
            auto pp = plus, mp = minus;
            const int first[] = {b};
            CHECK(src.derivative(z, pair) ==
                  doctest::Approx((src.derivative(pp, first) - src.derivative(mp, first)) / (2 * h)).epsilon(1e-6));
        }
    }
}

TEST_CASE("closed-form recursion residuals on random clouds")
{
    std::mt19937_64 rng(11);
    for (int d : {3, 5, 7})
        for (double alpha : {0.3, 0.5, 1.5, 0.8}) {
            if (alpha >= d) continue;
            const auto p = gamma_exponent(alpha, d);
            for (int count : {1, 4, 8}) {
                const auto src = random_sources(d, alpha, count, rng);
                for (const auto& z : sample_cloud(d, 6, rng))
                    for (int l = 0; l < p.j; ++l) {
                        const auto r = recursion_residual(src.at_level(l), l, p, z);
                        CHECK(r.residual <= 1e-10);
                    }
            }
            CHECK_THROWS_AS(recursion_residual(unit_source(d, alpha), p.j, p, point({0, 0, 0, 1})),
                            std::out_of_range);
        }
}

TEST_CASE("recursion residual by finite differences is second order")
{
    std::mt19937_64 rng(12);
    const auto p = gamma_exponent(0.5, 5);
    const auto src = random_sources(5, 0.5, 3, rng);
    const auto z = point({0.3, 0.4, 0.5, 0.6, 0.7, 0.9});
    for (int l = 0; l < p.j; ++l) {
        const auto r = recursion_residual_fd(src.at_level(l), l, p, z, 4e-2);
        CHECK(r.order >= 1.7);
        CHECK(r.order <= 2.3);
    }
}

TEST_CASE("iterated recursion matches the product coefficient")
{
    std::mt19937_64 rng(13);
    for (int d : {3, 5, 7}) {
        const auto p = gamma_exponent(0.5, d);
        const auto src = random_sources(d, 0.5, 4, rng);
        HalfPoint z{};
        for (int a = 0; a < d; ++a) z[a] = 0.2 + 0.15 * a;
        z[d] = 0.8;
        const auto r = iterated_recursion_residual(src, p.j, p, z, 5e-4);
        CHECK(r.residual <= 1e-6);
        CHECK(r.order >= 1.7);
        CHECK(r.order <= 2.3);
    }
    // C_l from its definition for d=7, alpha=0.5 (j=3).
    const auto p = gamma_exponent(0.5, 7);
    CHECK(recursion_coefficient(p, 0) == 1.0);
    CHECK(recursion_coefficient(p, 1) == doctest::Approx(0.5 * 6));
    CHECK(recursion_coefficient(p, 2) == doctest::Approx(0.5 * 6 * 2.5 * 4));
    CHECK(recursion_coefficient(p, 3) == doctest::Approx(0.5 * 6 * 2.5 * 4 * 4.5 * 2));
}

TEST_CASE("recursion is linear in the sources")
{
    const auto p = gamma_exponent(0.5, 5);
    const PointSourceKernel pair(5, 0.5, 0, {{0, 0, 0, 0, 0}, {0.5, 0.1, 0, 0, 0}}, {1.0, -1.0});
    const auto z = point({1, 0.2, 0, 0.1, 0, 1});
    CHECK(recursion_residual(pair, 0, p, z).residual <= 1e-10);
    CHECK(recursion_residual(pair, 1, p, z).residual <= 1e-10);
}

TEST_CASE("Leibniz expansion: trivial cases")
{
    std::mt19937_64 rng(21);
    const auto p = gamma_exponent(0.5, 5);
    const auto src = random_sources(5, 0.5, 3, rng);
    const auto z = point({0.3, 0.4, 0.5, 0.6, 0.7, 0.9});
    auto u = SmoothVelocity::zero(5);
    u.constant = {0.3, -0.2, 0.1, 0.5, -0.4};

    // m = 0: the transport term itself.
    double transport = 0.0;
    for (int a = 0; a < 5; ++a) {
        const int axes[] = {a};
        transport += u.constant[a] * src.derivative(z, axes);
    }
    CHECK(leibniz_rhs(0, u, src, p, z) == doctest::Approx(transport).epsilon(1e-13));

    // Constant u commutes with Delta_gamma.
    double expected = 0.0;
    const auto k1 = src.at_level(1);
    for (int a = 0; a < 5; ++a) {
        const int axes[] = {a};
        expected += u.constant[a] * -0.5 * 4 * k1.derivative(z, axes);
    }
    CHECK(leibniz_rhs(1, u, src, p, z) == doctest::Approx(expected).epsilon(1e-12));

    CHECK_THROWS_AS(leibniz_residual(3, u, src, p, z, 1e-3), std::out_of_range);
}

TEST_CASE("Leibniz expansion: linear velocity gains the mixed term")
{
    const auto p = gamma_exponent(0.5, 5);
    const PointSourceKernel src(5, 0.5, 0, {{0, 0, 0, 0, 0}, {0.4, -0.2, 0.1, 0, 0.3}}, {1.0, -0.6});
    const auto z = point({0.9, 0.4, -0.5, 0.6, 0.2, 0.7});
    auto u = SmoothVelocity::zero(5);
    u.linear.assign(5, std::vector<double>(5, 0.0));
    u.linear[0][1] = 0.7;
    u.linear[2][0] = -0.4;
    u.linear[4][4] = 0.25;

    // Independent assembly: (Lx).grad Delta_gamma K + 2 sum_a (d_a u).grad d_a K.
    const auto k1 = src.at_level(1);
    double expected = 0.0;
    for (int c = 0; c < 5; ++c) {
        double uc = 0.0;
        for (int a = 0; a < 5; ++a) uc += u.linear[c][a] * z[a];
        const int axes[] = {c};
        expected += uc * -0.5 * 4 * k1.derivative(z, axes);
        for (int a = 0; a < 5; ++a) {
            const int mixed[] = {c, a};
            expected += 2 * u.linear[c][a] * src.derivative(z, mixed);
        }
    }
    CHECK(leibniz_rhs(1, u, src, p, z) == doctest::Approx(expected).epsilon(1e-12));
    const auto r = leibniz_residual(1, u, src, p, z, 2.5e-4);
    CHECK(r.residual <= 1e-6);
}

TEST_CASE("Leibniz expansion for m = 1, 2, 3 with trigonometric velocity")
{
    std::mt19937_64 rng(22);
    for (int d : {3, 5, 7}) {
        const auto p = gamma_exponent(0.5, d);
        const auto src = random_sources(d, 0.5, 4, rng);
        const auto u = SmoothVelocity::random(d, 2, rng);
        HalfPoint z{};
        for (int a = 0; a < d; ++a) z[a] = 0.3 + 0.1 * a;
        z[d] = 0.7;
        for (int m = 1; m <= p.j && m <= 3; ++m) {
            const auto r = leibniz_residual(m, u, src, p, z, 2.5e-4);
            INFO(r.params);
            CHECK(r.residual <= 1e-6);
            CHECK(r.order >= 1.7);
            CHECK(r.order <= 2.3);
        }
    }
}

TEST_CASE("xi half relation")
{
    std::mt19937_64 rng(31);
    const auto p = gamma_exponent(0.5, 3);
    const auto src = unit_source(3, 0.5);
    const auto z = point({0.3, -0.4, 1.2, 0.8});
    const double r2 = 0.09 + 0.16 + 1.44 + 0.64;
    const int xi_axis[] = {3};
    CHECK(src.derivative(z, xi_axis) / z[3] == doctest::Approx(-0.5 * std::pow(r2, -1.25)).epsilon(1e-13));
    CHECK(xi_half_relation_residual(src, p, z).residual <= 1e-10);

    const auto cloud = random_sources(3, 0.5, 8, rng);
    for (const auto& w : sample_cloud(3, 10, rng)) CHECK(xi_half_relation_residual(cloud, p, w).residual <= 1e-10);

    // Homogeneity: both sides scale by lambda^(-alpha-2).
    auto scaled = z;
    for (int a = 0; a < 4; ++a) scaled[a] *= 3.0;
    const auto base = xi_half_relation_residual(src, p, z);
    const auto big = xi_half_relation_residual(src, p, scaled);
    CHECK(big.left == doctest::Approx(base.left * std::pow(3.0, -2.5)).epsilon(1e-12));
    CHECK(big.right == doctest::Approx(base.right * std::pow(3.0, -2.5)).epsilon(1e-12));
    CHECK_THROWS(xi_half_relation_residual(unit_source(5, 0.5), gamma_exponent(0.5, 5), point({0, 0, 0, 0, 0, 1})));
}

TEST_CASE("grid Delta_gamma: second order, boundary NaN, divergence form")
{
    const double gamma = 0.4;
    auto exact_field = [&](const GridSpec& g, int n_xi, bool apply) {
        return sample_half_space(g, n_xi, 4.0, gamma, [&](std::span<const double> x, double xi) {
            const double e = std::exp(-xi * xi / 2);
            const double c = std::cos(x[0] + 2 * x[1]);
            // Delta_gamma of cos(k.x) exp(-xi^2/2) with |k|^2 = 5.
            return apply ? c * e * (-5 + xi * xi - 1 - gamma) : c * e;
        });
    };
    double errors[2], div_errors[2];
    for (int level = 0; level < 2; ++level) {
        const int n = 16 << level, n_xi = 32 << level;
        const GridSpec g{2, n, 2 * std::numbers::pi};
        const auto f = exact_field(g, n_xi, false);
        const auto exact = exact_field(g, n_xi, true);
        const auto lap = delta_gamma_apply(f);
        const auto div = divergence_form_apply(f);
        CHECK(std::isnan(lap.at(0, 0)));
        CHECK(std::isnan(lap.at(0, 1)));
        CHECK(std::isnan(lap.at(0, n_xi - 2)));
        CHECK(!std::isnan(lap.at(0, 2)));
        double e = 0.0, ed = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (int q = 2; q < n_xi - 2; ++q) {
                e = std::max(e, std::abs(lap.at(i, q) - exact.at(i, q)));
                // The two stencils differ at O(1) next to the wall; compare away from it.
                if (f.xi(q) >= 1.0) ed = std::max(ed, std::abs(div.at(i, q) - lap.at(i, q)));
            }
        errors[level] = e;
        div_errors[level] = ed;
        CHECK_THROWS_AS(weighted_integral(lap, gamma), std::domain_error);
    }
    CHECK(std::log2(errors[0] / errors[1]) == doctest::Approx(2.0).epsilon(0.15));
    CHECK(std::log2(div_errors[0] / div_errors[1]) >= 1.7);
}

TEST_CASE("weighted integral uses exact cell weights")
{
    const GridSpec g{1, 8, 2.0};
    const auto one = sample_half_space(g, 10, 3.0, -0.5, [](std::span<const double>, double) { return 1.0; });
    // int_0^3 xi^-0.5 = 2 sqrt(3), times the x length.
    CHECK(weighted_integral(one, -0.5) == doctest::Approx(2.0 * 2 * std::sqrt(3.0)).epsilon(1e-13));
}

TEST_CASE("weighted integration by parts and the xi-derivative identity")
{
    IdentityConfig c;
    c.dim = 2;
    c.n_x = 8;  // exact in x for the wave numbers used
    c.n_xi = 256;
    for (double alpha : {0.3, 1.5}) {
        c.alpha = alpha;
        const auto ibp = identity_residual(IdentityId::WeightedIBP, c);
        INFO(ibp.params);
        CHECK(std::abs(ibp.left) > 1.0);
        CHECK(ibp.residual <= 1e-3);
        CHECK(ibp.order >= 1.7);
        const auto xi = identity_residual(IdentityId::XiDerivative, c);
        INFO(xi.params);
        CHECK(xi.residual <= 1e-3);
        CHECK(xi.order >= 1.7);
    }
}

TEST_CASE("mollified atom interaction against radial quadrature")
{
    // Difference of centred Gaussians: the pair convolution is a signed sum of Gaussians of
    // variance s_a^2 + s_b^2, and int G_s |z|^-alpha is a one-dimensional radial integral.
    const std::vector<Atom> atoms{{0.5, 1.0}, {1.0, -1.0}};
    for (auto [alpha, dim] : std::vector<std::pair<double, int>>{{0.5, 3}, {1.5, 3}, {0.5, 5}}) {
        const double omega = 2 * std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0);
        double expected = 0.0;
        for (const auto& a : atoms)
            for (const auto& b : atoms) {
                const double s2 = a.sigma * a.sigma + b.sigma * b.sigma;
                auto integrand = [&](double r) {
                    return std::exp(-r * r / (2 * s2)) / std::pow(2 * std::numbers::pi * s2, dim / 2.0) *
                           std::pow(r, dim - 1 - alpha) * omega;
                };
                expected += a.weight * b.weight *
                            boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13);
            }
        CHECK(atom_interaction(atoms, alpha, dim) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("Hessian split ratio")
{
    IdentityConfig c;
    c.dim = 3;
    for (double alpha : {0.3, 0.5, 0.7}) {
        c.alpha = alpha;
        const auto r = identity_residual(IdentityId::HessianSplit, c);
        // d=3, j=1: gamma = alpha.
        const double expected = 1 - alpha / 4;
        INFO(r.params);
        CHECK(r.right == doctest::Approx(expected).epsilon(1e-14));
        CHECK(std::abs(r.left / expected - 1) <= 0.02);
    }
    c.alpha = 2.5;
    CHECK_THROWS_AS(identity_residual(IdentityId::HessianSplit, c), std::invalid_argument);
}

TEST_CASE("product-form inequality and claim equality at p = 2")
{
    // Vanishing mass and second moment: the default pair decays too slowly for the
    // d=7, l=0 Hessian integrand to be truncated at R = 40.
    const std::vector<Atom> atoms{{0.5, 1.4}, {0.75, -2.4}, {1.0, 1.0}};
    const QuadratureSpec q{};
    for (int d : {3, 5, 7}) {
        const auto p = gamma_exponent(0.5, d);
        for (int l = 0; 2 * l <= p.j - 1; ++l) {
            const auto ratio = hessian_ratio(p, l, atoms, q);
            const double expected = 1 - p.gamma / std::pow(2.0 * p.j - 2 * l, 2);
            INFO(ratio.params);
            CHECK(std::abs(ratio.left / expected - 1) <= 0.02);
            CHECK(ratio.tail < 1e-3);
            const auto ineq = product_inequality(p, l, atoms, q);
            CHECK(ineq.left <= ineq.right * 1.001);
        }
    }
}

TEST_CASE("energy rewrite and representations shrink under refinement")
{
    IdentityConfig c;
    struct Case {
        IdentityId id;
        int dim;
    };
    for (const auto& [id, dim] : {Case{IdentityId::EnergyRewrite, 3}, Case{IdentityId::EnergyRepOdd, 3},
                                  Case{IdentityId::EnergyRepEven, 5}, Case{IdentityId::EnergyRepOdd, 7}}) {
        c.dim = dim;
        c.alpha = 0.5;
        const auto r = identity_residual(id, c);
        INFO(r.id << " " << r.params);
        CHECK(r.residual <= 0.05);
        CHECK(r.order > 0.5);
        CHECK(r.tail < 1e-3 * std::abs(r.right));
    }
    c.dim = 5;
    CHECK_THROWS_AS(identity_residual(IdentityId::EnergyRepOdd, c), std::invalid_argument);
}

TEST_CASE("polyharmonic spectral identity")
{
    IdentityConfig c;
    c.dim = 5;
    c.poly_m = 2;
    const auto r = identity_residual(IdentityId::Polyharmonic, c);
    CHECK(r.residual <= 1e-8);
    CHECK(r.params.find("coulomb") == std::string::npos);

    std::mt19937_64 rng(41);
    // Odd m uses the gradient form.
    const GridSpec g5{5, 8, 2 * std::numbers::pi};
    const auto odd = polyharmonic_residual(5, 1, band_limited_field(g5, 3, rng));
    CHECK(odd.residual <= 1e-8);
    CHECK(odd.params.find("coulomb-boundary") != std::string::npos);
    const GridSpec g3{3, 16, 2 * std::numbers::pi};
    const auto coulomb = polyharmonic_residual(3, 1, band_limited_field(g3, 5, rng));
    CHECK(coulomb.residual <= 1e-8);
    CHECK(coulomb.params.find("coulomb-boundary") != std::string::npos);
    CHECK_THROWS(polyharmonic_residual(4, 2, band_limited_field(GridSpec{4, 8, 6.0}, 2, rng)));
}

TEST_CASE("Moser probe: trivial cases")
{
    const GridSpec g{2, 32, 2 * std::numbers::pi};
    const auto one = sample(g, [](std::span<const double>) { return 2.5; });
    const auto wave = sample(g, [](std::span<const double> x) { return std::sin(x[0]) + 0.5 * std::cos(2 * x[1]); });
    CHECK(std::abs(moser_ratio(one, wave, 1)) < 1e-12);

    // k = 1: grad(fg) - f grad g = g grad f, bracket ||f||_2 * 2 ||grad g||_inf.
    const auto f = sample(g, [](std::span<const double> x) { return std::cos(x[0] - x[1]); });
    double lhs = 0.0, f2 = 0.0, grad_inf = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto idx = multi_index(g, i);
        const double x0 = g.coord(idx[0]), x1 = g.coord(idx[1]);
        const double s = std::sin(x0 - x1);
        lhs += wave[i] * wave[i] * 2 * s * s;
        f2 += f[i] * f[i];
        grad_inf = std::max(grad_inf, std::hypot(std::cos(x0), std::sin(2 * x1)));
    }
    const double cell = g.cell_volume();
    const double expected = std::sqrt(lhs * cell) / (std::sqrt(f2 * cell) * 2 * grad_inf);
    CHECK(moser_ratio(f, wave, 1) == doctest::Approx(expected).epsilon(1e-10));
    CHECK_THROWS(moser_ratio(f, wave, 2));
}

TEST_CASE("Moser and Gagliardo-Nirenberg ratios are bounded and refinement-stable")
{
    // d=4, k=2 over 100 band-limited pairs at n=16 and n=32.
    std::mt19937_64 rng(51);
    std::vector<std::pair<TrigSum, TrigSum>> pairs;
    for (int i = 0; i < 100; ++i) pairs.emplace_back(random_trig(4, 4, 3, rng), random_trig(4, 4, 3, rng));
    double max_ratio[2] = {0, 0}, max_gn[2] = {0, 0};
    for (int level = 0; level < 2; ++level) {
        const GridSpec g{4, 16 << level, 2 * std::numbers::pi};
        for (const auto& [tf, tg] : pairs) {
            const auto f = sample(g, tf), h = sample(g, tg);
            const double r = moser_ratio(f, h, 2);
            CHECK(std::isfinite(r));
            max_ratio[level] = std::max(max_ratio[level], r);
            max_gn[level] = std::max(max_gn[level], gn_ratio(f, 1));
        }
    }
    INFO(max_ratio[0] << " " << max_ratio[1] << " " << max_gn[0] << " " << max_gn[1]);
    CHECK(std::abs(max_ratio[1] / max_ratio[0] - 1) <= 0.05);
    CHECK(std::abs(max_gn[1] / max_gn[0] - 1) <= 0.05);
}
