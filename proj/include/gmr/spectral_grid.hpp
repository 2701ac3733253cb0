#pragma once

// Uniform angular grid with FFTW transforms between truncated Fourier
// coefficients {a_m}, |m| <= M, and samples psi(2 pi j / G), j < G.

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace gmr {

class SpectralGrid {
public:
    /// `size` must be a power of two. Not thread-safe; give each evolution its own grid.
    explicit SpectralGrid(std::size_t size);
    ~SpectralGrid();
    SpectralGrid(const SpectralGrid&) = delete;
    SpectralGrid& operator=(const SpectralGrid&) = delete;
    SpectralGrid(SpectralGrid&&) noexcept;
    SpectralGrid& operator=(SpectralGrid&&) noexcept;

    std::size_t size() const { return size_; }
    int log2_size() const { return log2_size_; }

    /// psi_j = sum_m a_m e^{i m theta_j}; coeffs[i] holds a_{i - M}.
    void synthesize(std::span<const std::complex<double>> coeffs, std::vector<std::complex<double>>& samples);

    /// c_m = (1/G) sum_j psi_j e^{-i m theta_j} for every grid frequency;
    /// returns the modes |m| <= M in `coeffs` and the mass of the others.
    double analyze(std::span<const std::complex<double>> samples, std::vector<std::complex<double>>& coeffs,
                   int bandwidth);

    /// Smallest power of two >= 8M.
    static std::size_t default_size(int bandwidth);

private:
    struct Plans;
    std::size_t size_ = 0;
    int log2_size_ = 0;
    std::unique_ptr<Plans> plans_;
};

}  // namespace gmr
