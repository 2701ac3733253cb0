#pragma once

// The quantized map F = Phi' o kappa' on truncated Fourier coefficient
// vectors a_m, |m| <= M, with psi(theta) = sum_m a_m e^{i m theta} and
// sum |a_m|^2 = 1.
//
//   kappa': psi -> e^{-i K H(theta) / hbar} psi
//   Phi':   psi -> psi(theta - lambda),  i.e. a_m -> a_m e^{-i m lambda}
//
// The kick can be applied by convolution with the analytic Fourier
// coefficients of the multiplier, or pointwise on an oversampled grid. Mass
// pushed past |m| = M is reported as leak and never renormalized silently.

#include "gmr/model.hpp"
#include "gmr/region.hpp"
#include "gmr/spectral_grid.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace gmr::quantum {

using Complex = std::complex<double>;

class QuantumState {
public:
    /// All-zero coefficients; callers fill and normalize.
    explicit QuantumState(int bandwidth);
    QuantumState(int bandwidth, std::vector<Complex> coeffs);

    static QuantumState pure_mode(int bandwidth, int mode);
    /// |a_m|^2 proportional to exp(-(m - center)^2 / (2 sigma^2)).
    static QuantumState gaussian(int bandwidth, double sigma, double center = 0.0);
    /// psi constant on the circle, i.e. a_0 = 1.
    static QuantumState uniform(int bandwidth);
    /// "mode:5", "gaussian:sigma=5,center=0" or "uniform".
    static QuantumState parse(std::string_view spec, int bandwidth);

    int bandwidth() const { return bandwidth_; }
    Complex operator[](int m) const { return coeffs_[index(m)]; }
    Complex& operator[](int m) { return coeffs_[index(m)]; }
    std::span<const Complex> coeffs() const { return coeffs_; }
    std::span<Complex> coeffs() { return coeffs_; }

    double norm_squared() const;
    /// sum_{|n| <= m} |a_n|^2
    double mass_within(int m) const;
    /// Mass on the outermost `width` modes at each end.
    double edge_mass(int width) const;
    void normalize();

private:
    std::size_t index(int m) const;

    int bandwidth_;
    std::vector<Complex> coeffs_;
};

/// min over alpha of || a - e^{i alpha} b ||.
double projective_distance(const QuantumState& a, const QuantumState& b);

/// Fourier coefficients g_m, |m| <= B, of e^{i c H(theta)}.
struct KickMultiplier {
    double strength = 0.0;  // c; a single kick uses c = -K / hbar
    int bandwidth = 0;      // B
    std::vector<Complex> coeffs;
    double tail_bound = 0.0;  // bound on sum_{|m| > B} |g_m|^2 (Parseval deficit)

    Complex operator[](int m) const;
};

/// Closed-form g_m. Both half-circle integrals reduce to
/// int_0^pi e^{i x t} dt = pi e^{i pi x / 2} sinc(pi x / 2), which stays exact
/// at the resonant frequencies m = +-c.
Complex kick_coefficient(double strength, int m);
KickMultiplier kick_coeffs(double strength, int bandwidth);

enum class KickMethod { Convolution, Grid };
KickMethod parse_kick_method(std::string_view name);
std::string_view to_string(KickMethod method);

struct KickResult {
    QuantumState state;
    double leaked = 0.0;  // mass removed by truncation to |m| <= M
};

/// a'_m = sum_{|m-k| <= B} g_{m-k} a_k for |m| <= M.
KickResult apply_kick_convolution(const QuantumState& s, const KickMultiplier& mult);
/// psi -> e^{i phase_j} psi_j on `grid`, analysed back and truncated.
KickResult apply_phase_on_grid(const QuantumState& s, std::span<const double> phase, SpectralGrid& grid);
/// Pointwise multiplier e^{i c H(theta_j)} with H evaluated at exact grid angles.
KickResult apply_kick_grid(const QuantumState& s, double strength, SpectralGrid& grid);
/// Dispatch; throws ConfigurationError when the grid is missing or smaller than 8M.
KickResult apply_kick(const QuantumState& s, const KickMultiplier& mult, KickMethod method, SpectralGrid* grid);

/// a_m -> a_m e^{-i m n lambda}.
QuantumState apply_rotation(const QuantumState& s, const RotationNumber& rotation, std::int64_t steps = 1);

/// One Floquet step: kick with c = -K / hbar, then rotate.
KickResult step(const QuantumState& s, const ModelParams& params, KickMethod method, SpectralGrid* grid,
                const KickMultiplier* mult = nullptr);

/// F^n psi = e^{-(i/hbar) K H_n(theta)} psi(theta - n lambda): one rotation and
/// one multiplication with H_n taken from its exact piecewise-linear form.
KickResult iterate_closed_form(const QuantumState& s, std::int64_t n, const ModelParams& params, SpectralGrid& grid);

struct MedianIndex {
    int index = 0;
    bool tie = false;  // cumulative mass met 1/2 within tolerance
};

/// Cumulative masses are compared with 1/2 after normalizing by the total,
/// with this absolute tolerance for ties.
inline constexpr double kTieTolerance = 1e-12;

/// u(psi) = sup { m >= 0 : sum_{|n| <= m} |a_n|^2 <= 1/2 }, or -1 when the set is empty.
MedianIndex u_observable_detail(const QuantumState& s);
inline int u_observable(const QuantumState& s) { return u_observable_detail(s).index; }

struct EvolutionRecord {
    std::int64_t step = 0;
    int u_value = 0;
    double norm_leak = 0.0;  // cumulative
    RegionLabel region = RegionLabel::Quantum;
};

struct EvolutionOptions {
    std::size_t grid_size = 0;     // 0: smallest power of two >= 8M
    int multiplier_bandwidth = 0;  // 0: 2M, enough for an exact truncated convolution
    int renormalize_every = 0;     // 0: never
    bool trace = false;
};

/// Repeated Floquet steps with leak bookkeeping.
class Evolution {
public:
    Evolution(const ModelParams& params, int bandwidth, KickMethod method, EvolutionOptions options = {});

    /// Advances `s` by one step in place.
    void advance(QuantumState& s);

    std::int64_t steps_taken() const { return steps_; }
    double cumulative_leak() const { return leak_; }
    int renormalizations() const { return renormalizations_; }
    const std::vector<EvolutionRecord>& records() const { return records_; }
    SpectralGrid& grid() { return grid_; }
    const KickMultiplier& multiplier() const { return multiplier_; }
    const ModelParams& params() const { return params_; }
    KickMethod method() const { return method_; }

private:
    ModelParams params_;
    int bandwidth_;
    KickMethod method_;
    EvolutionOptions options_;
    SpectralGrid grid_;
    KickMultiplier multiplier_;
    std::vector<Complex> rotation_phases_;  // e^{-i m lambda}, index m + M
    std::int64_t steps_ = 0;
    double leak_ = 0.0;
    int renormalizations_ = 0;
    std::vector<EvolutionRecord> records_;
};

}  // namespace gmr::quantum
