#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "modlab/grid.hpp"

namespace modlab {

/// In-place complex DFT of a fixed shape, backed by FFTW.
/// Plans use FFTW_ESTIMATE so repeated runs are bitwise reproducible.
/// backward() is unnormalized.
class Fft {
public:
    explicit Fft(std::span<const int> shape);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&& other) noexcept;
    Fft& operator=(Fft&& other) noexcept;

    std::span<std::complex<double>> data() { return {buffer_, size_}; }
    std::size_t size() const { return size_; }
    void forward();
    void backward();

private:
    void release();

    std::complex<double>* buffer_ = nullptr;
    std::size_t size_ = 0;
    void* forward_plan_ = nullptr;
    void* backward_plan_ = nullptr;
};

/// Angular wavenumbers 2*pi*m/L for DFT index j (m = j or j - n).
std::vector<double> wavenumbers(const GridSpec& g);

/// Periodic spectral toolkit on one grid: multipliers and derivatives.
class Spectral {
public:
    explicit Spectral(const GridSpec& g);

    const GridSpec& grid() const { return grid_; }

    /// Forward transform of a real field; result has grid().size() modes.
    std::vector<std::complex<double>> transform(std::span<const double> values);
    /// Inverse transform, normalized, real part.
    std::vector<double> inverse(std::span<const std::complex<double>> modes);
    /// Normalised inverse returning real and imaginary parts; packs two real results
    /// a + i b when both spectra are Hermitian.
    std::pair<std::vector<double>, std::vector<double>> inverse_pair(std::span<const std::complex<double>> modes);

    /// |k|^2 and components for the flat mode index.
    double k_squared(std::size_t mode) const;
    double k_component(std::size_t mode, int axis) const;
    /// True if any axis sits on the Nyquist index (odd derivatives are zeroed there).
    bool on_nyquist(std::size_t mode) const;

    /// Spectral partial derivative along the listed axes.
    std::vector<double> derivative(std::span<const double> values, std::span<const int> axes);

private:
    GridSpec grid_;
    std::vector<double> k1d_;
    Fft fft_;
};

}  // namespace modlab
