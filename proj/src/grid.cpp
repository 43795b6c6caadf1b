#include "modlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace modlab {

double GridSpec::cell_volume() const { return std::pow(h(), dim); }

std::size_t GridSpec::size() const
{
    std::size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
    return s;
}

void GridSpec::validate() const
{
    if (dim < 1 || dim > kMaxDim)
        throw std::invalid_argument("grid dimension must be in 1.." + std::to_string(kMaxDim));
    if (n < 8 || (n & (n - 1)) != 0)
        throw std::invalid_argument("points per axis must be a power of two >= 8, got " + std::to_string(n));
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("box length must be positive");
}

std::size_t flat_index(const GridSpec& g, const MultiIndex& idx)
{
    std::size_t f = 0;
    for (int a = 0; a < g.dim; ++a) f = f * g.n + static_cast<std::size_t>(idx[a]);
    return f;
}

MultiIndex multi_index(const GridSpec& g, std::size_t flat)
{
    MultiIndex idx{};
    for (int a = g.dim - 1; a >= 0; --a) {
        idx[a] = static_cast<int>(flat % g.n);
        flat /= g.n;
    }
    return idx;
}

ScalarField::ScalarField(const GridSpec& grid) : grid_(grid), values_(grid.size(), 0.0) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.size())
        throw std::invalid_argument("field value count does not match grid");
}

double ScalarField::mass() const
{
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.cell_volume();
}

double ScalarField::max_abs() const
{
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

bool ScalarField::all_finite() const
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other)
{
    if (!(grid_ == other.grid_)) throw std::invalid_argument("grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other)
{
    if (!(grid_ == other.grid_)) throw std::invalid_argument("grid mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s)
{
    for (double& v : values_) v *= s;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

VectorField::VectorField(const GridSpec& g) : grid(g), components(g.dim, ScalarField(g)) {}

bool VectorField::all_finite() const
{
    return std::all_of(components.begin(), components.end(),
                       [](const ScalarField& c) { return c.all_finite(); });
}

}  // namespace modlab
