#include "gmr/quasiconjugacy.hpp"

#include "gmr/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gmr::quasi {

using quantum::MedianIndex;
using quantum::QuantumState;

RegionLabel classify_region(const QuantumState& s, const RegionThresholds& thresholds) {
    const double total = s.norm_squared();
    const double inner = s.mass_within(thresholds.inner);
    const double outer = total - s.mass_within(thresholds.outer);
    if (inner > thresholds.level) return RegionLabel::Quantum;
    if (outer > thresholds.level) return RegionLabel::Classical;
    return RegionLabel::SemiClassical;
}

bool classical_region_resolved(int bandwidth, const RegionThresholds& thresholds) {
    return bandwidth > thresholds.outer;
}

double theta_of(const QuantumState& s, SpectralGrid& grid) {
    if (grid.size() < static_cast<std::size_t>(2 * (2 * s.bandwidth() + 1)))
        throw ConfigurationError("grid too small to resolve |psi|^2");
    std::vector<quantum::Complex> samples;
    grid.synthesize(s.coeffs(), samples);
    const std::size_t size = samples.size();
    std::vector<double> weight(size);
    double total = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
        weight[j] = std::norm(samples[j]);
        total += weight[j];
    }
    if (!(total > 0.0)) throw std::invalid_argument("theta is undefined for the zero state");
    const double spacing = 2.0 * std::numbers::pi / static_cast<double>(size);
    double cumulative = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
        double cell = 0.5 * (weight[j] + weight[(j + 1) % size]) / total;
        if (cumulative + cell >= 0.5) {
            double t = cell > 0.0 ? (0.5 - cumulative) / cell : 0.0;
            return spacing * (static_cast<double>(j) + t);
        }
        cumulative += cell;
    }
    return 2.0 * std::numbers::pi;
}

double theta_of(const QuantumState& s) {
    SpectralGrid grid(SpectralGrid::default_size(s.bandwidth()));
    return theta_of(s, grid);
}

MedianIndex p_of_detail(const QuantumState& s) {
    const double total = s.norm_squared();
    if (!(total > 0.0)) throw std::invalid_argument("P is undefined for the zero state");
    const int M = s.bandwidth();
    MedianIndex out{-M - 1, false};
    double cumulative = 0.0;
    for (int m = -M; m <= M; ++m) {
        cumulative += std::norm(s[m]);
        double fraction = cumulative / total;
        if (fraction > 0.5 + quantum::kTieTolerance) break;
        out.index = m;
        if (std::fabs(fraction - 0.5) <= quantum::kTieTolerance) out.tie = true;
    }
    return out;
}

classical::ClassicalState lambda_map(const QuantumState& s, SpectralGrid& grid) {
    return {theta_of(s, grid), static_cast<double>(p_of(s))};
}

classical::ClassicalState lambda_map(const QuantumState& s) {
    SpectralGrid grid(SpectralGrid::default_size(s.bandwidth()));
    return lambda_map(s, grid);
}

double arc_distance(double a, double b) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double d = std::fmod(std::fabs(a - b), two_pi);
    return std::min(d, two_pi - d);
}

CorrespondenceTrace correspondence_trace(const QuantumState& s, std::int64_t n_max, const ModelParams& params,
                                         const TraceOptions& options) {
    params.validate(false);
    if (n_max < 1) throw std::invalid_argument("trace needs n_max >= 1");
    if (options.every < 1) throw ConfigurationError("trace interval must be >= 1");

    quantum::EvolutionOptions evo_options;
    evo_options.grid_size = options.grid_size;
    quantum::Evolution evolution(params, s.bandwidth(), options.method, evo_options);
    SpectralGrid& grid = evolution.grid();

    const classical::ClassicalState start = lambda_map(s, grid);
    const Turn start_angle = Turn::from_radians(start.theta);
    const double kick_in_index_units = params.kick_strength / params.hbar;

    CorrespondenceTrace trace;
    QuantumState state = s;
    std::int64_t slope_sum = 0;  // H~'_n(theta_0), built one term at a time
    Turn orbit = start_angle;
    for (std::int64_t n = 0; n <= n_max; ++n) {
        if (n > 0) {
            evolution.advance(state);
            slope_sum += classical::tent_slope(orbit);
            orbit += params.rotation.multiple(1);
        }
        if (n % options.every != 0 && n != n_max) continue;
        TraceStep row;
        row.n = n;
        if (n == 0) {
            row.classical_image = start;
            row.quantum_projection = start;
        } else {
            row.classical_image.theta = static_cast<double>(orbit.radians());
            row.classical_image.momentum = start.momentum - kick_in_index_units * static_cast<double>(slope_sum);
            row.quantum_projection = lambda_map(state, grid);
        }
        row.angle_gap = arc_distance(row.classical_image.theta, row.quantum_projection.theta);
        row.momentum_gap = std::fabs(row.classical_image.momentum - row.quantum_projection.momentum);
        trace.steps.push_back(row);
    }
    trace.cumulative_leak = evolution.cumulative_leak();
    return trace;
}

}  // namespace gmr::quasi
