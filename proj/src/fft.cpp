#include "modlab/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace modlab {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}
}  // namespace

Fft::Fft(std::span<const int> shape)
{
    if (shape.empty()) throw std::invalid_argument("empty FFT shape");
    size_ = 1;
    for (int s : shape) size_ *= static_cast<std::size_t>(s);
    std::lock_guard lock(planner_mutex());
    buffer_ = reinterpret_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * size_));
    if (!buffer_) throw std::bad_alloc();
    auto* raw = reinterpret_cast<fftw_complex*>(buffer_);
    forward_plan_ = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), raw, raw, FFTW_FORWARD,
                                  FFTW_ESTIMATE);
    backward_plan_ = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), raw, raw,
                                   FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!forward_plan_ || !backward_plan_) throw std::runtime_error("FFTW planning failed");
}

Fft::~Fft() { release(); }

Fft::Fft(Fft&& other) noexcept
    : buffer_(other.buffer_), size_(other.size_), forward_plan_(other.forward_plan_),
      backward_plan_(other.backward_plan_)
{
    other.buffer_ = nullptr;
    other.forward_plan_ = other.backward_plan_ = nullptr;
    other.size_ = 0;
}

Fft& Fft::operator=(Fft&& other) noexcept
{
    if (this != &other) {
        release();
        buffer_ = other.buffer_;
        size_ = other.size_;
        forward_plan_ = other.forward_plan_;
        backward_plan_ = other.backward_plan_;
        other.buffer_ = nullptr;
        other.forward_plan_ = other.backward_plan_ = nullptr;
        other.size_ = 0;
    }
    return *this;
}

void Fft::release()
{
    std::lock_guard lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
    if (buffer_) fftw_free(buffer_);
    forward_plan_ = backward_plan_ = nullptr;
    buffer_ = nullptr;
}

void Fft::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void Fft::backward() { fftw_execute(static_cast<fftw_plan>(backward_plan_)); }

std::vector<double> wavenumbers(const GridSpec& g)
{
    std::vector<double> k(g.n);
    const double base = 2.0 * std::numbers::pi / g.length;
    for (int j = 0; j < g.n; ++j) k[j] = base * (j < g.n / 2 ? j : j - g.n);
    return k;
}

namespace {
std::vector<int> shape_of(const GridSpec& g) { return std::vector<int>(g.dim, g.n); }
}  // namespace

Spectral::Spectral(const GridSpec& g) : grid_(g), k1d_(wavenumbers(g)), fft_(shape_of(g)) {}

std::vector<std::complex<double>> Spectral::transform(std::span<const double> values)
{
    auto buf = fft_.data();
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = values[i];
    fft_.forward();
    return {buf.begin(), buf.end()};
}

std::vector<double> Spectral::inverse(std::span<const std::complex<double>> modes)
{
    auto buf = fft_.data();
    std::copy(modes.begin(), modes.end(), buf.begin());
    fft_.backward();
    std::vector<double> out(buf.size());
    const double scale = 1.0 / static_cast<double>(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real() * scale;
    return out;
}

std::pair<std::vector<double>, std::vector<double>> Spectral::inverse_pair(std::span<const std::complex<double>> modes)
{
    auto buf = fft_.data();
    std::copy(modes.begin(), modes.end(), buf.begin());
    fft_.backward();
    std::pair<std::vector<double>, std::vector<double>> out{std::vector<double>(buf.size()),
                                                            std::vector<double>(buf.size())};
    const double scale = 1.0 / static_cast<double>(buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        out.first[i] = buf[i].real() * scale;
        out.second[i] = buf[i].imag() * scale;
    }
    return out;
}

double Spectral::k_component(std::size_t mode, int axis) const
{
    std::size_t stride = 1;
    for (int a = grid_.dim - 1; a > axis; --a) stride *= grid_.n;
    return k1d_[(mode / stride) % grid_.n];
}

double Spectral::k_squared(std::size_t mode) const
{
    double s = 0.0;
    for (int a = grid_.dim - 1; a >= 0; --a) {
        const double k = k1d_[mode % grid_.n];
        s += k * k;
        mode /= grid_.n;
    }
    return s;
}

bool Spectral::on_nyquist(std::size_t mode) const
{
    for (int a = 0; a < grid_.dim; ++a) {
        if (mode % grid_.n == static_cast<std::size_t>(grid_.n / 2)) return true;
        mode /= grid_.n;
    }
    return false;
}

std::vector<double> Spectral::derivative(std::span<const double> values, std::span<const int> axes)
{
    auto modes = transform(values);
    const bool odd = axes.size() % 2 == 1;
    for (std::size_t m = 0; m < modes.size(); ++m) {
        if (odd && on_nyquist(m)) {
            modes[m] = 0.0;
            continue;
        }
        std::complex<double> factor = 1.0;
        for (int a : axes) factor *= std::complex<double>(0.0, k_component(m, a));
        modes[m] *= factor;
    }
    return inverse(modes);
}

}  // namespace modlab
