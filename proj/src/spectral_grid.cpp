#include "gmr/spectral_grid.hpp"

#include <fftw3.h>

#include <bit>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <string>

namespace gmr {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct SpectralGrid::Plans {
    fftw_complex* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit Plans(std::size_t n) {
        std::lock_guard lock(planner_mutex());
        buffer = fftw_alloc_complex(n);
        if (buffer == nullptr) throw std::bad_alloc();
        const int len = static_cast<int>(n);
        forward = fftw_plan_dft_1d(len, buffer, buffer, FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft_1d(len, buffer, buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Plans() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(backward);
        fftw_free(buffer);
    }
};

SpectralGrid::SpectralGrid(std::size_t size) : size_(size) {
    if (size < 2 || !std::has_single_bit(size))
        throw std::invalid_argument("grid size must be a power of two >= 2, got " + std::to_string(size));
    log2_size_ = std::countr_zero(size);
    plans_ = std::make_unique<Plans>(size);
}

SpectralGrid::~SpectralGrid() = default;
SpectralGrid::SpectralGrid(SpectralGrid&&) noexcept = default;
SpectralGrid& SpectralGrid::operator=(SpectralGrid&&) noexcept = default;

std::size_t SpectralGrid::default_size(int bandwidth) {
    return std::bit_ceil(static_cast<std::size_t>(8) * static_cast<std::size_t>(std::max(bandwidth, 1)));
}

void SpectralGrid::synthesize(std::span<const std::complex<double>> coeffs,
                              std::vector<std::complex<double>>& samples) {
    const auto bandwidth = static_cast<std::ptrdiff_t>(coeffs.size() / 2);
    if (coeffs.size() > size_) throw std::invalid_argument("grid too small for the coefficient vector");
    auto* buf = reinterpret_cast<std::complex<double>*>(plans_->buffer);
    std::memset(static_cast<void*>(buf), 0, size_ * sizeof(std::complex<double>));
    const auto g = static_cast<std::ptrdiff_t>(size_);
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(coeffs.size()); ++i) {
        std::ptrdiff_t m = i - bandwidth;
        buf[((m % g) + g) % g] = coeffs[static_cast<std::size_t>(i)];
    }
    fftw_execute(plans_->backward);
    samples.assign(buf, buf + size_);
}

double SpectralGrid::analyze(std::span<const std::complex<double>> samples, std::vector<std::complex<double>>& coeffs,
                             int bandwidth) {
    if (samples.size() != size_) throw std::invalid_argument("sample count does not match grid size");
    if (static_cast<std::size_t>(2 * bandwidth + 1) > size_) throw std::invalid_argument("bandwidth exceeds grid");
    auto* buf = reinterpret_cast<std::complex<double>*>(plans_->buffer);
    std::copy(samples.begin(), samples.end(), buf);
    fftw_execute(plans_->forward);
    const double scale = 1.0 / static_cast<double>(size_);
    const auto g = static_cast<std::ptrdiff_t>(size_);
    coeffs.assign(static_cast<std::size_t>(2 * bandwidth + 1), {});
    double discarded = 0.0;
    for (std::ptrdiff_t j = 0; j < g; ++j) {
        std::ptrdiff_t m = j <= g / 2 ? j : j - g;
        if (m < -bandwidth || m > bandwidth) discarded += std::norm(buf[j] * scale);
    }
    for (std::ptrdiff_t m = -bandwidth; m <= bandwidth; ++m)
        coeffs[static_cast<std::size_t>(m + bandwidth)] = buf[((m % g) + g) % g] * scale;
    return discarded;
}

}  // namespace gmr
