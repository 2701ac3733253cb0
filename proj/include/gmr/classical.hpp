#pragma once

// The classical kicked system f = Phi o kappa on the cylinder T^1 x R.
//
// kappa(theta, P) = (theta, P - K H'(theta)) with the tent potential H, and
// Phi(theta, P) = (theta + lambda, P). All orbit points theta + k lambda are
// carried as Turn values, so breakpoints of the Birkhoff sums H_n and H~'_n
// are located exactly and sorted without ties.

#include "gmr/model.hpp"
#include "gmr/turn.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gmr::classical {

struct ClassicalState {
    double theta = 0.0;     // radians, [0, 2 pi)
    double momentum = 0.0;  // P
};

/// Tent potential: theta - pi/2 on [0, pi], 3 pi/2 - theta on (pi, 2 pi).
double tent(double theta);
long double tent(Turn theta);

/// H'(theta): +1 on the closed upper half [0, pi], -1 on (pi, 2 pi).
int tent_slope(double theta);
inline int tent_slope(Turn theta) { return theta.in_upper_half() ? 1 : -1; }

ClassicalState step(const ClassicalState& s, const ModelParams& params);

/// Sum_{k=0}^{n-1} H'(theta + k lambda), an integer in [-n, n] with the parity of n.
std::int64_t h_tilde_prime_n(double theta, std::int64_t n, const ModelParams& params);
std::int64_t h_tilde_prime_n(Turn theta, std::int64_t n, const RotationNumber& rotation);

/// f^n(theta, P) = (theta + n lambda, P - K H~'_n(theta)).
ClassicalState iterate_closed_form(const ClassicalState& s, std::int64_t n, const ModelParams& params);

/// Continuous periodic piecewise-linear function on the circle with integer
/// slopes. Interval i runs from breakpoint i to breakpoint i+1 (cyclically).
class PiecewiseLinear {
public:
    PiecewiseLinear(std::vector<Turn> breakpoints, std::vector<long double> values, std::vector<int> slopes);

    std::span<const Turn> breakpoints() const { return breakpoints_; }
    std::span<const long double> values() const { return values_; }
    std::span<const int> slopes() const { return slopes_; }
    std::size_t size() const { return breakpoints_.size(); }

    long double evaluate(Turn theta) const;
    double evaluate(double theta) const { return static_cast<double>(evaluate(Turn::from_radians(theta))); }

    /// Values at the 2^log2_size uniform grid points, by a merge sweep.
    std::vector<double> sample_grid(int log2_size) const;

    long double integral() const;
    long double sup_abs() const;
    int max_abs_slope() const;
    /// |value after one full sweep - value at the first breakpoint|.
    long double closure_error() const { return closure_error_; }

private:
    std::vector<Turn> breakpoints_;
    std::vector<long double> values_;
    std::vector<int> slopes_;
    long double closure_error_ = 0.0L;

    friend PiecewiseLinear h_n_exact(std::int64_t n, const RotationNumber& rotation);
};

/// H_n(theta) = Sum_{k=1}^{n} H(theta - k lambda) with breakpoints at
/// k lambda and pi + k lambda.
PiecewiseLinear h_n_exact(std::int64_t n, const RotationNumber& rotation);

struct HqnSupremum {
    int n = 0;
    std::int64_t q = 0;
    double sup_abs = 0.0;
    int max_abs_slope = 0;
    double envelope = 0.0;  // n / 1.5^n
};

/// sup |H_{q_n}| for the golden rotation, exact at breakpoints.
HqnSupremum sup_abs_hqn(int n);

/// Measure (radians) of {theta : H~'_n(theta) = v} for each v in [-n, n].
struct StepDistribution {
    std::int64_t n = 0;
    std::vector<long double> measure;  // index v + n

    long double at(std::int64_t v) const;
};

/// Exact interval decomposition of H~'_n by a breakpoint sweep.
StepDistribution h_tilde_prime_distribution(std::int64_t n, const RotationNumber& rotation);

/// Linear measure of {theta in [0, 2 pi) : |K H~'_n(theta)| < N}.
double diffusion_measure_exact(std::int64_t n, double momentum_bound, const ModelParams& params);

struct MonteCarloEstimate {
    double measure = 0.0;
    double standard_error = 0.0;  // from the sample proportion
    std::int64_t samples = 0;
};

/// Uniform-sample estimate of the same measure. Each sample counts orbit
/// points in the upper half circle by binary search over sorted start points.
/// Deterministic for a given seed regardless of thread count.
MonteCarloEstimate diffusion_measure_monte_carlo(std::int64_t n, double momentum_bound, const ModelParams& params,
                                                 std::int64_t samples, std::uint64_t seed, unsigned threads = 0);

/// Fibonacci indices n (q_n with q_1 = 2) where q_n is even and r_n < r,
/// restricted to q_n <= n_max.
std::vector<int> diffusion_recipe_indices(std::int64_t n_max);

/// Distinct sums of at most `max_parts` distinct q_i, i in `indices`,
/// bounded by n_max, ascending.
std::vector<std::int64_t> fibonacci_sum_candidates(std::span<const int> indices, int max_parts, std::int64_t n_max);

struct DiffusionSearchResult {
    bool found = false;
    std::int64_t n = 0;         // first candidate reaching the target, else the best one
    double measure = 0.0;
    std::int64_t evaluated = 0;
    double target = 0.0;
};

DiffusionSearchResult search_diffusion_step_count(std::span<const std::int64_t> candidates, double momentum_bound,
                                                  double target_measure, const ModelParams& params);

struct GridScanResult {
    std::int64_t best_n = 0;
    double best_fraction = 1.0;  // fraction of grid points with |K H~'_n| < N
};

/// Tracks H~'_n on a uniform grid for every n in [1, n_max] and reports the
/// smallest fraction of grid points still inside the momentum band.
GridScanResult diffusion_grid_scan(std::int64_t n_max, double momentum_bound, const ModelParams& params,
                                   int log2_grid);

struct TrinomialModel {
    int n = 0;
    double delta = 0.0;
    std::vector<double> masses;  // index k + n, k in [-n, n]

    double mass(int k) const;
};

/// |E_{n,k}| from m_{n+1,k} = (1-2 delta) m_{n,k} + delta (m_{n,k-1} + m_{n,k+1}).
/// Throws std::invalid_argument unless 0 < delta < 1/2 and n >= 0.
TrinomialModel trinomial_masses(int n, double delta);

}  // namespace gmr::classical
