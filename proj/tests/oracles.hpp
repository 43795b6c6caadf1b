#pragma once
// Independent reference computations used only by tests.

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

/// Hurwitz zeta(s, a), a > 0, s != 1, analytically continued to s < 1 through
/// Euler-Maclaurin summation.
inline double hurwitz_zeta(double s, double a)
{
    constexpr int terms = 24;
    // B_{2j}/(2j)!
    constexpr double b[] = {1.0 / 12, -1.0 / 720, 1.0 / 30240, -1.0 / 1209600, 1.0 / 47900160,
                            -691.0 / 1307674368000.0, 1.0 / 74724249600.0};
    double sum = 0.0;
    for (int k = 0; k < terms; ++k) sum += std::pow(k + a, -s);
    const double x = terms + a;
    sum += std::pow(x, 1 - s) / (s - 1) + 0.5 * std::pow(x, -s);
    double rising = s;  // s (s+1) ... (s+2j-2)
    for (int j = 1; j <= 7; ++j) {
        sum += b[j - 1] * rising * std::pow(x, -s - 2 * j + 1);
        rising *= (s + 2 * j - 1) * (s + 2 * j);
    }
    return sum;
}

/// 2 int_0^inf x^{-1/2} cos(x) dx by summing over half-periods and accelerating
/// the alternating tail with repeated averaging of partial sums.
inline double half_power_cosine_transform()
{
    using Rule = boost::math::quadrature::gauss<double, 30>;
    const double pi = std::numbers::pi;
    // x = t^2 removes the endpoint singularity on [0, pi/2].
    double head = Rule::integrate([](double t) { return 2.0 * std::cos(t * t); }, 0.0, std::sqrt(pi / 2));
    std::vector<double> partial;
    double s = head;
    for (int k = 1; k <= 60; ++k) {
        s += Rule::integrate([](double x) { return std::cos(x) / std::sqrt(x); }, (k - 0.5) * pi,
                             (k + 0.5) * pi);
        partial.push_back(s);
    }
    for (int round = 0; round < 30; ++round) {
        for (std::size_t i = 0; i + 1 < partial.size(); ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
        partial.pop_back();
    }
    return 2.0 * partial.back();
}

}  // namespace oracle
