#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace modlab {

constexpr int kMaxDim = 6;

/// Uniform periodic grid on [-L/2, L/2)^d with n points per axis.
/// Point i sits at (i - n/2) h, so the box centre is a grid point.
struct GridSpec {
    int dim = 1;
    int n = 64;
    double length = 1.0;

    double h() const { return length / n; }
    double cell_volume() const;
    std::size_t size() const;
    double coord(int i) const { return (i - n / 2) * h(); }
    void validate() const;

    bool operator==(const GridSpec&) const = default;
};

using MultiIndex = std::array<int, kMaxDim>;

// Row-major: the last axis varies fastest.
std::size_t flat_index(const GridSpec& g, const MultiIndex& idx);
MultiIndex multi_index(const GridSpec& g, std::size_t flat);

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const GridSpec& grid);
    ScalarField(const GridSpec& grid, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    double mass() const;
    double max_abs() const;
    bool all_finite() const;

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

private:
    GridSpec grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// d scalar components on a shared grid.
struct VectorField {
    GridSpec grid;
    std::vector<ScalarField> components;

    VectorField() = default;
    explicit VectorField(const GridSpec& g);
    bool all_finite() const;
};

/// Sample a function of the point coordinates.
template <class F>
ScalarField sample(const GridSpec& g, F&& fn)
{
    ScalarField out(g);
    std::array<double, kMaxDim> x{};
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto idx = multi_index(g, i);
        for (int a = 0; a < g.dim; ++a) x[a] = g.coord(idx[a]);
        out[i] = fn(std::span<const double>(x.data(), g.dim));
    }
    return out;
}

}  // namespace modlab
