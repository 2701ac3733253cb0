#pragma once

// The projection Lambda from quantum states to the classical cylinder, the
// observables u and v, the Quantum / Semi-Classical / Classical partition of
// state space, and traces comparing f^n o Lambda with Lambda o F^n.
//
// Momenta are reported as integer mode indices; hbar only enters through the
// kick K / hbar that the classical image receives in index units.

#include "gmr/classical.hpp"
#include "gmr/quantum.hpp"
#include "gmr/region.hpp"

#include <cstdint>
#include <vector>

namespace gmr::quasi {

/// Iteration budget beyond which a state kicked by O(hbar) random kicks would
/// be expected to diffuse from the Quantum into the Classical region.
inline constexpr std::int64_t kDefaultIterationCap = 40000;

struct RegionThresholds {
    int inner = 20;      // Quantum: sum_{|n| <= inner} |a_n|^2 > level
    int outer = 200;     // Classical: sum_{|n| > outer} |a_n|^2 > level
    double level = 0.9;
};

RegionLabel classify_region(const quantum::QuantumState& s, const RegionThresholds& thresholds = {});

/// False when M <= outer, where the Classical test can never succeed.
bool classical_region_resolved(int bandwidth, const RegionThresholds& thresholds = {});

/// Median angle of |psi|^2: the cumulative mass on [0, zeta] is built on the
/// grid by the trapezoid rule and interpolated linearly to 1/2.
double theta_of(const quantum::QuantumState& s, SpectralGrid& grid);
double theta_of(const quantum::QuantumState& s);

/// P(psi) = sup { m : sum_{n <= m} |a_n|^2 <= 1/2 }; ties within
/// quantum::kTieTolerance extend the set.
quantum::MedianIndex p_of_detail(const quantum::QuantumState& s);
inline int p_of(const quantum::QuantumState& s) { return p_of_detail(s).index; }

/// Lambda(psi) = (theta_of(psi), p_of(psi)).
classical::ClassicalState lambda_map(const quantum::QuantumState& s, SpectralGrid& grid);
classical::ClassicalState lambda_map(const quantum::QuantumState& s);

/// v(theta, P) = |P|.
inline double v_observable(const classical::ClassicalState& s) { return s.momentum < 0 ? -s.momentum : s.momentum; }

/// Shortest arc between two angles, in [0, pi].
double arc_distance(double a, double b);

struct TraceStep {
    std::int64_t n = 0;
    classical::ClassicalState classical_image;    // f^n(Lambda(psi))
    classical::ClassicalState quantum_projection;  // Lambda(F^n(psi))
    double angle_gap = 0.0;
    double momentum_gap = 0.0;
};

struct CorrespondenceTrace {
    std::vector<TraceStep> steps;
    double cumulative_leak = 0.0;
};

struct TraceOptions {
    quantum::KickMethod method = quantum::KickMethod::Grid;
    std::size_t grid_size = 0;  // 0: smallest power of two >= 8M
    std::int64_t every = 1;     // record every k-th step (step 0 and n_max always)
};

/// Purely diagnostic: records both images and their gaps for n = 0..n_max.
CorrespondenceTrace correspondence_trace(const quantum::QuantumState& s, std::int64_t n_max,
                                         const ModelParams& params, const TraceOptions& options = {});

}  // namespace gmr::quasi
