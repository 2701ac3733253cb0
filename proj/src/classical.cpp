#include "gmr/classical.hpp"

#include "gmr/golden_mean.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>

namespace gmr::classical {

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;
constexpr long double kTwoPi = 2.0L * kPi;

struct Event {
    Turn position;
    int jump;
};

void sort_events(std::vector<Event>& events) {
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.position != b.position) return a.position < b.position;
        return a.jump < b.jump;
    });
}

Turn midpoint(Turn from, Turn to) { return from + Turn((to - from).bits() / 2); }

// Sorted start points S_k = -k lambda, k in [0, n): H'(theta + k lambda) = +1
// exactly when S_k lies in the closed arc [theta - 1/2, theta].
std::vector<Turn> sorted_starts(std::int64_t n, const RotationNumber& rotation) {
    std::vector<Turn> starts;
    starts.reserve(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) starts.push_back(-rotation.multiple(k));
    std::sort(starts.begin(), starts.end());
    return starts;
}

std::int64_t count_in_arc(const std::vector<Turn>& starts, Turn theta) {
    Turn from = theta - Turn::half();
    auto upto = std::upper_bound(starts.begin(), starts.end(), theta);
    auto from_it = std::lower_bound(starts.begin(), starts.end(), from);
    if (from <= theta) return upto - from_it;
    return (starts.end() - from_it) + (upto - starts.begin());
}

}  // namespace

double tent(double theta) {
    constexpr double pi = std::numbers::pi;
    if (theta <= pi) return theta - pi / 2.0;
    return 1.5 * pi - theta;
}

long double tent(Turn theta) {
    long double f = theta.fraction();
    if (theta.in_upper_half()) return kTwoPi * f - kPi / 2.0L;
    return 1.5L * kPi - kTwoPi * f;
}

int tent_slope(double theta) { return theta <= std::numbers::pi ? 1 : -1; }

ClassicalState step(const ClassicalState& s, const ModelParams& params) {
    params.validate(true);
    Turn theta = Turn::from_radians(s.theta);
    ClassicalState out;
    out.momentum = s.momentum - params.kick_strength * tent_slope(theta);
    out.theta = static_cast<double>((theta + params.rotation.multiple(1)).radians());
    return out;
}

std::int64_t h_tilde_prime_n(Turn theta, std::int64_t n, const RotationNumber& rotation) {
    if (n < 1) throw std::invalid_argument("h_tilde_prime_n needs n >= 1");
    const Turn shift = rotation.multiple(1);
    Turn point = theta;
    std::int64_t sum = 0;
    for (std::int64_t k = 0; k < n; ++k) {
        sum += tent_slope(point);
        point += shift;
    }
    return sum;
}

std::int64_t h_tilde_prime_n(double theta, std::int64_t n, const ModelParams& params) {
    return h_tilde_prime_n(Turn::from_radians(theta), n, params.rotation);
}

ClassicalState iterate_closed_form(const ClassicalState& s, std::int64_t n, const ModelParams& params) {
    params.validate(true);
    if (n == 0) return s;
    Turn theta = Turn::from_radians(s.theta);
    ClassicalState out;
    out.momentum = s.momentum - params.kick_strength * static_cast<double>(h_tilde_prime_n(theta, n, params.rotation));
    out.theta = static_cast<double>((theta + params.rotation.multiple(n)).radians());
    return out;
}

// ---------------------------------------------------------------------------
// PiecewiseLinear

PiecewiseLinear::PiecewiseLinear(std::vector<Turn> breakpoints, std::vector<long double> values,
                                 std::vector<int> slopes)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), slopes_(std::move(slopes)) {
    if (breakpoints_.empty() || breakpoints_.size() != values_.size() || breakpoints_.size() != slopes_.size())
        throw std::invalid_argument("piecewise-linear data must be non-empty and of equal length");
    if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end()))
        throw std::invalid_argument("breakpoints must be sorted");
}

long double PiecewiseLinear::evaluate(Turn theta) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), theta);
    std::size_t i = it == breakpoints_.begin() ? breakpoints_.size() - 1
                                               : static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return values_[i] + slopes_[i] * kTwoPi * arc_fraction(breakpoints_[i], theta);
}

std::vector<double> PiecewiseLinear::sample_grid(int log2_size) const {
    const std::uint64_t size = std::uint64_t{1} << log2_size;
    std::vector<double> out(size);
    // `passed` counts breakpoints <= the current grid point; none passed means
    // the point sits in the interval wrapping around from the last breakpoint.
    std::size_t passed = 0;
    for (std::uint64_t j = 0; j < size; ++j) {
        Turn point = Turn::grid_point(j, log2_size);
        while (passed < breakpoints_.size() && breakpoints_[passed] <= point) ++passed;
        std::size_t i = passed == 0 ? breakpoints_.size() - 1 : passed - 1;
        out[j] = static_cast<double>(values_[i] + slopes_[i] * kTwoPi * arc_fraction(breakpoints_[i], point));
    }
    return out;
}

long double PiecewiseLinear::integral() const {
    long double total = 0.0L;
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        std::size_t next = (i + 1) % breakpoints_.size();
        long double length = kTwoPi * arc_fraction(breakpoints_[i], breakpoints_[next]);
        if (breakpoints_.size() == 1) length = kTwoPi;
        total += values_[i] * length + 0.5L * slopes_[i] * length * length;
    }
    return total;
}

long double PiecewiseLinear::sup_abs() const {
    long double best = 0.0L;
    for (long double v : values_) best = std::max(best, std::fabs(v));
    return best;
}

int PiecewiseLinear::max_abs_slope() const {
    int best = 0;
    for (int s : slopes_) best = std::max(best, std::abs(s));
    return best;
}

PiecewiseLinear h_n_exact(std::int64_t n, const RotationNumber& rotation) {
    if (n < 1) throw std::invalid_argument("h_n_exact needs n >= 1");
    // H(x) has its minimum corner at x = 0 (slope -1 -> +1) and its maximum
    // corner at x = pi (+1 -> -1); the term H(theta - k lambda) therefore
    // bends at theta = k lambda and theta = pi + k lambda.
    std::vector<Event> events;
    events.reserve(static_cast<std::size_t>(2 * n));
    for (std::int64_t k = 1; k <= n; ++k) {
        Turn corner = rotation.multiple(k);
        events.push_back({corner, +2});
        events.push_back({corner + Turn::half(), -2});
    }
    sort_events(events);

    const std::size_t count = events.size();
    auto direct_value = [&](Turn theta) {
        long double sum = 0.0L;
        for (std::int64_t k = 1; k <= n; ++k) sum += tent(theta - rotation.multiple(k));
        return sum;
    };
    auto direct_slope = [&](Turn theta) {
        int sum = 0;
        for (std::int64_t k = 1; k <= n; ++k) sum += tent_slope(theta - rotation.multiple(k));
        return sum;
    };

    std::vector<Turn> breakpoints(count);
    std::vector<long double> values(count);
    std::vector<int> slopes(count);
    for (std::size_t i = 0; i < count; ++i) breakpoints[i] = events[i].position;

    // Exact slope on the first nondegenerate interval, then jumps.
    std::size_t first = 0;
    while (first + 1 < count && breakpoints[first + 1] == breakpoints[first]) ++first;
    Turn next = first + 1 < count ? breakpoints[first + 1] : breakpoints[0];
    int slope0 = direct_slope(midpoint(breakpoints[first], next));
    slopes[first] = slope0;
    for (std::size_t i = first; i-- > 0;) slopes[i] = slopes[i + 1] - events[i + 1].jump;
    for (std::size_t i = first + 1; i < count; ++i) slopes[i] = slopes[i - 1] + events[i].jump;

    values[0] = direct_value(breakpoints[0]);
    for (std::size_t i = 1; i < count; ++i)
        values[i] = values[i - 1] + slopes[i - 1] * kTwoPi * arc_fraction(breakpoints[i - 1], breakpoints[i]);
    long double wrap = values[count - 1] + slopes[count - 1] * kTwoPi * arc_fraction(breakpoints[count - 1], breakpoints[0]);

    PiecewiseLinear pl(std::move(breakpoints), std::move(values), std::move(slopes));
    pl.closure_error_ = std::fabs(wrap - pl.values_[0]);
    return pl;
}

HqnSupremum sup_abs_hqn(int n) {
    mpz_class q = golden::fibonacci_q(n);
    if (!q.fits_slong_p() || q > 100'000'000) throw std::invalid_argument("q_n too large for breakpoint evaluation");
    HqnSupremum out;
    out.n = n;
    out.q = q.get_si();
    PiecewiseLinear h = h_n_exact(out.q, RotationNumber::golden());
    out.sup_abs = static_cast<double>(h.sup_abs());
    out.max_abs_slope = h.max_abs_slope();
    out.envelope = n / std::pow(1.5, n);
    return out;
}

// ---------------------------------------------------------------------------
// Exact step distribution of H~'_n

long double StepDistribution::at(std::int64_t v) const {
    if (v < -n || v > n) return 0.0L;
    return measure[static_cast<std::size_t>(v + n)];
}

StepDistribution h_tilde_prime_distribution(std::int64_t n, const RotationNumber& rotation) {
    if (n < 1) throw std::invalid_argument("distribution needs n >= 1");
    // Term k jumps +2 where theta + k lambda crosses 0 and -2 where it crosses pi.
    std::vector<Event> events;
    events.reserve(static_cast<std::size_t>(2 * n));
    for (std::int64_t k = 0; k < n; ++k) {
        Turn start = -rotation.multiple(k);
        events.push_back({start, +2});
        events.push_back({start + Turn::half(), -2});
    }
    sort_events(events);

    StepDistribution dist;
    dist.n = n;
    dist.measure.assign(static_cast<std::size_t>(2 * n + 1), 0.0L);

    const std::size_t count = events.size();
    std::size_t first = 0;
    while (first + 1 < count && events[first + 1].position == events[first].position) ++first;
    Turn next = events[(first + 1) % count].position;
    std::int64_t value = h_tilde_prime_n(midpoint(events[first].position, next), n, rotation);
    for (std::size_t step = 0; step < count; ++step) {
        std::size_t i = (first + step) % count;
        if (step > 0) value += events[i].jump;
        Turn to = events[(i + 1) % count].position;
        long double length = arc_fraction(events[i].position, to);
        if (count == 1) length = 1.0L;
        dist.measure[static_cast<std::size_t>(value + n)] += kTwoPi * length;
    }
    return dist;
}

double diffusion_measure_exact(std::int64_t n, double momentum_bound, const ModelParams& params) {
    params.validate(true);
    if (!(momentum_bound > 0.0)) throw std::invalid_argument("momentum bound N must be positive");
    StepDistribution dist = h_tilde_prime_distribution(n, params.rotation);
    long double total = 0.0L;
    for (std::int64_t v = -n; v <= n; ++v) {
        if (std::fabs(params.kick_strength * static_cast<double>(v)) < momentum_bound) total += dist.at(v);
    }
    return static_cast<double>(total);
}

MonteCarloEstimate diffusion_measure_monte_carlo(std::int64_t n, double momentum_bound, const ModelParams& params,
                                                 std::int64_t samples, std::uint64_t seed, unsigned threads) {
    params.validate(true);
    if (n < 1 || samples < 1) throw std::invalid_argument("Monte-Carlo needs n >= 1 and samples >= 1");
    const std::vector<Turn> starts = sorted_starts(n, params.rotation);

    constexpr std::int64_t kChunk = 1 << 16;
    const std::int64_t chunks = (samples + kChunk - 1) / kChunk;
    auto run_chunk = [&](std::int64_t chunk) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(chunk)};
        std::mt19937_64 rng(seq);
        std::int64_t begin = chunk * kChunk;
        std::int64_t end = std::min(samples, begin + kChunk);
        std::int64_t hits = 0;
        for (std::int64_t s = begin; s < end; ++s) {
            u128 hi = rng();
            u128 lo = rng();
            Turn theta((hi << 64) | lo);
            std::int64_t value = 2 * count_in_arc(starts, theta) - n;
            if (std::fabs(params.kick_strength * static_cast<double>(value)) < momentum_bound) ++hits;
        }
        return hits;
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::int64_t> hits(static_cast<std::size_t>(chunks), 0);
    std::vector<std::future<void>> workers;
    for (unsigned w = 0; w < threads; ++w) {
        workers.push_back(std::async(std::launch::async, [&, w] {
            for (std::int64_t c = w; c < chunks; c += threads) hits[static_cast<std::size_t>(c)] = run_chunk(c);
        }));
    }
    for (auto& f : workers) f.get();

    std::int64_t total = 0;
    for (auto h : hits) total += h;
    double p = static_cast<double>(total) / static_cast<double>(samples);
    MonteCarloEstimate est;
    est.samples = samples;
    est.measure = 2.0 * std::numbers::pi * p;
    est.standard_error = 2.0 * std::numbers::pi * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    return est;
}

std::vector<int> diffusion_recipe_indices(std::int64_t n_max) {
    std::vector<int> out;
    for (int i = 1;; ++i) {
        golden::Convergent c = golden::convergent(i);
        if (c.q > n_max) break;
        if (mpz_even_p(c.q.get_mpz_t()) && c.is_below()) out.push_back(i);
    }
    return out;
}

std::vector<std::int64_t> fibonacci_sum_candidates(std::span<const int> indices, int max_parts, std::int64_t n_max) {
    std::vector<std::int64_t> values;
    for (int i : indices) {
        mpz_class q = golden::fibonacci_q(i);
        if (q <= n_max) values.push_back(q.get_si());
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::vector<std::int64_t> sums;
    auto extend = [&](auto&& self, std::size_t from, int parts, std::int64_t sum) -> void {
        if (parts > 0) sums.push_back(sum);
        if (parts == max_parts) return;
        for (std::size_t j = from; j < values.size(); ++j) {
            if (sum + values[j] > n_max) break;
            self(self, j + 1, parts + 1, sum + values[j]);
        }
    };
    extend(extend, 0, 0, 0);
    std::sort(sums.begin(), sums.end());
    sums.erase(std::unique(sums.begin(), sums.end()), sums.end());
    return sums;
}

DiffusionSearchResult search_diffusion_step_count(std::span<const std::int64_t> candidates, double momentum_bound,
                                                  double target_measure, const ModelParams& params) {
    DiffusionSearchResult result;
    result.target = target_measure;
    result.measure = 2.0 * std::numbers::pi + 1.0;
    for (std::int64_t n : candidates) {
        double m = diffusion_measure_exact(n, momentum_bound, params);
        ++result.evaluated;
        if (m < result.measure) {
            result.measure = m;
            result.n = n;
        }
        if (m < target_measure) {
            result.found = true;
            result.n = n;
            result.measure = m;
            break;
        }
    }
    return result;
}

GridScanResult diffusion_grid_scan(std::int64_t n_max, double momentum_bound, const ModelParams& params,
                                   int log2_grid) {
    params.validate(true);
    const std::size_t size = std::size_t{1} << log2_grid;
    std::vector<Turn> points(size);
    // Cell midpoints keep the scan off the exact grid-aligned breakpoints of rational rotations.
    for (std::size_t j = 0; j < size; ++j)
        points[j] = Turn::grid_point(j, log2_grid) + Turn(Turn::grid_point(1, log2_grid).bits() / 2);
    std::vector<std::int64_t> sums(size, 0);
    const Turn shift = params.rotation.multiple(1);
    GridScanResult best;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        std::size_t inside = 0;
        for (std::size_t j = 0; j < size; ++j) {
            sums[j] += tent_slope(points[j]);
            points[j] += shift;
            if (std::fabs(params.kick_strength * static_cast<double>(sums[j])) < momentum_bound) ++inside;
        }
        double fraction = static_cast<double>(inside) / static_cast<double>(size);
        if (fraction < best.best_fraction || best.best_n == 0) {
            best.best_fraction = fraction;
            best.best_n = n;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Trinomial model

double TrinomialModel::mass(int k) const {
    if (k < -n || k > n) return 0.0;
    return masses[static_cast<std::size_t>(k + n)];
}

TrinomialModel trinomial_masses(int n, double delta) {
    if (n < 0) throw std::invalid_argument("trinomial step count must be >= 0");
    if (!(delta > 0.0 && delta < 0.5)) throw std::invalid_argument("trinomial delta must lie in (0, 1/2)");
    TrinomialModel model;
    model.n = n;
    model.delta = delta;
    const std::size_t width = static_cast<std::size_t>(2 * n + 1);
    std::vector<double> cur(width, 0.0);
    std::vector<double> next(width, 0.0);
    cur[static_cast<std::size_t>(n)] = 1.0;
    const double stay = 1.0 - 2.0 * delta;
    for (int step = 0; step < n; ++step) {
        // Support after `step` steps is [-step, step]; update one cell wider.
        int reach = step + 1;
        for (int k = -reach; k <= reach; ++k) {
            std::size_t i = static_cast<std::size_t>(k + n);
            double left = i > 0 ? cur[i - 1] : 0.0;
            double right = i + 1 < width ? cur[i + 1] : 0.0;
            next[i] = stay * cur[i] + delta * (left + right);
        }
        std::swap(cur, next);
    }
    model.masses = std::move(cur);
    return model;
}

}  // namespace gmr::classical
