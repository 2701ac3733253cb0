#include "gmr/quantum.hpp"

#include "gmr/classical.hpp"
#include "gmr/errors.hpp"
#include "gmr/quasiconjugacy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gmr::quantum {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double t) {
    if (std::fabs(t) < 1e-4) return 1.0 - t * t / 6.0;
    return std::sin(t) / t;
}

// int_0^pi e^{i x t} dt
Complex half_circle_integral(double x) {
    return std::polar(kPi * sinc(kPi * x / 2.0), kPi * x / 2.0);
}

Complex unit_phase(Turn t) {
    long double angle = t.radians();
    return {static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))};
}

void require_grid(const SpectralGrid* grid, int bandwidth) {
    if (grid == nullptr) throw ConfigurationError("grid kick requested without a spectral grid");
    if (grid->size() < static_cast<std::size_t>(8) * static_cast<std::size_t>(bandwidth))
        throw ConfigurationError("grid size " + std::to_string(grid->size()) + " is below 8M = " +
                                 std::to_string(8 * bandwidth));
}

double parse_double(std::string_view text, std::string_view what) {
    try {
        std::size_t used = 0;
        std::string s(text);
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::logic_error&) {
        throw std::invalid_argument("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// QuantumState

QuantumState::QuantumState(int bandwidth) : bandwidth_(bandwidth) {
    if (bandwidth < 1) throw ConfigurationError("bandwidth M must be >= 1");
    coeffs_.assign(static_cast<std::size_t>(2 * bandwidth + 1), Complex{});
}

QuantumState::QuantumState(int bandwidth, std::vector<Complex> coeffs) : bandwidth_(bandwidth), coeffs_(std::move(coeffs)) {
    if (bandwidth < 1) throw ConfigurationError("bandwidth M must be >= 1");
    if (coeffs_.size() != static_cast<std::size_t>(2 * bandwidth + 1))
        throw ConfigurationError("coefficient vector must have 2M+1 entries");
}

std::size_t QuantumState::index(int m) const {
    if (m < -bandwidth_ || m > bandwidth_)
        throw std::out_of_range("mode " + std::to_string(m) + " outside |m| <= " + std::to_string(bandwidth_));
    return static_cast<std::size_t>(m + bandwidth_);
}

QuantumState QuantumState::pure_mode(int bandwidth, int mode) {
    QuantumState s(bandwidth);
    s[mode] = 1.0;
    return s;
}

QuantumState QuantumState::gaussian(int bandwidth, double sigma, double center) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian width sigma must be positive");
    QuantumState s(bandwidth);
    for (int m = -bandwidth; m <= bandwidth; ++m) {
        double x = (m - center) / sigma;
        s[m] = std::exp(-0.25 * x * x);
    }
    s.normalize();
    return s;
}

QuantumState QuantumState::uniform(int bandwidth) { return pure_mode(bandwidth, 0); }

QuantumState QuantumState::parse(std::string_view spec, int bandwidth) {
    if (spec == "uniform") return uniform(bandwidth);
    if (spec.starts_with("mode:")) {
        std::string_view body = spec.substr(5);
        int mode = 0;
        auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), mode);
        if (ec != std::errc{} || ptr != body.data() + body.size())
            throw std::invalid_argument("bad mode in initial state '" + std::string(spec) + "'");
        if (mode < -bandwidth || mode > bandwidth)
            throw ConfigurationError("initial mode " + std::to_string(mode) + " exceeds bandwidth");
        return pure_mode(bandwidth, mode);
    }
    if (spec.starts_with("gaussian")) {
        double sigma = 5.0;
        double center = 0.0;
        std::string_view body = spec.substr(8);
        if (!body.empty()) {
            if (body.front() != ':') throw std::invalid_argument("expected 'gaussian:key=value,...'");
            body.remove_prefix(1);
            while (!body.empty()) {
                auto comma = body.find(',');
                std::string_view item = body.substr(0, comma);
                auto eq = item.find('=');
                if (eq == std::string_view::npos)
                    throw std::invalid_argument("expected key=value in '" + std::string(item) + "'");
                std::string_view key = item.substr(0, eq);
                double value = parse_double(item.substr(eq + 1), key);
                if (key == "sigma")
                    sigma = value;
                else if (key == "center")
                    center = value;
                else
                    throw std::invalid_argument("unknown gaussian parameter '" + std::string(key) + "'");
                if (comma == std::string_view::npos) break;
                body.remove_prefix(comma + 1);
            }
        }
        return gaussian(bandwidth, sigma, center);
    }
    throw std::invalid_argument("initial state must be mode:<m>, gaussian:sigma=<s>,center=<c> or uniform, got '" +
                                std::string(spec) + "'");
}

double QuantumState::norm_squared() const {
    double total = 0.0;
    for (const auto& c : coeffs_) total += std::norm(c);
    return total;
}

double QuantumState::mass_within(int m) const {
    if (m < 0) return 0.0;
    m = std::min(m, bandwidth_);
    double total = 0.0;
    for (int n = -m; n <= m; ++n) total += std::norm((*this)[n]);
    return total;
}

double QuantumState::edge_mass(int width) const {
    width = std::min(width, bandwidth_ + 1);
    double total = 0.0;
    for (int i = 0; i < width; ++i) {
        total += std::norm((*this)[bandwidth_ - i]);
        if (bandwidth_ - i != -bandwidth_ + i) total += std::norm((*this)[-bandwidth_ + i]);
    }
    return total;
}

void QuantumState::normalize() {
    double n2 = norm_squared();
    if (!(n2 > 0.0)) throw std::invalid_argument("cannot normalize the zero state");
    double scale = 1.0 / std::sqrt(n2);
    for (auto& c : coeffs_) c *= scale;
}

double projective_distance(const QuantumState& a, const QuantumState& b) {
    if (a.bandwidth() != b.bandwidth()) throw ConfigurationError("states have different bandwidths");
    Complex overlap{};
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) overlap += std::conj(a.coeffs()[i]) * b.coeffs()[i];
    const Complex align = std::abs(overlap) > 0.0 ? std::conj(overlap) / std::abs(overlap) : Complex(1.0, 0.0);
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.coeffs().size(); ++i) d2 += std::norm(a.coeffs()[i] - align * b.coeffs()[i]);
    return std::sqrt(d2);
}

// ---------------------------------------------------------------------------
// Kick multiplier

Complex KickMultiplier::operator[](int m) const {
    if (m < -bandwidth || m > bandwidth) return {};
    return coeffs[static_cast<std::size_t>(m + bandwidth)];
}

Complex kick_coefficient(double c, int m) {
    if (c == 0.0) return m == 0 ? Complex(1.0, 0.0) : Complex{};
    // g_m = (1/2pi) [ e^{-i pi c/2} I(c - m) + e^{i pi c/2} (-1)^m I(-c - m) ]
    const Complex upper = std::polar(1.0, -kPi * c / 2.0) * half_circle_integral(c - m);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    const Complex lower = sign * std::polar(1.0, kPi * c / 2.0) * half_circle_integral(-c - m);
    return (upper + lower) / (2.0 * kPi);
}

KickMultiplier kick_coeffs(double strength, int bandwidth) {
    if (bandwidth < 1) throw ConfigurationError("multiplier bandwidth B must be >= 1");
    KickMultiplier mult;
    mult.strength = strength;
    mult.bandwidth = bandwidth;
    mult.coeffs.resize(static_cast<std::size_t>(2 * bandwidth + 1));
    double kept = 0.0;
    for (int m = -bandwidth; m <= bandwidth; ++m) {
        Complex g = kick_coefficient(strength, m);
        mult.coeffs[static_cast<std::size_t>(m + bandwidth)] = g;
        kept += std::norm(g);
    }
    // Parseval: the multiplier is unimodular, so the full sum is exactly 1.
    const double rounding = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(2 * bandwidth + 1);
    mult.tail_bound = std::max(0.0, 1.0 - kept) + rounding;
    return mult;
}

KickMethod parse_kick_method(std::string_view name) {
    if (name == "convolution") return KickMethod::Convolution;
    if (name == "grid") return KickMethod::Grid;
    throw ConfigurationError("kick method must be 'convolution' or 'grid', got '" + std::string(name) + "'");
}

std::string_view to_string(KickMethod method) {
    return method == KickMethod::Convolution ? "convolution" : "grid";
}

// ---------------------------------------------------------------------------
// Kicks and rotations

KickResult apply_kick_convolution(const QuantumState& s, const KickMultiplier& mult) {
    const int M = s.bandwidth();
    const int B = mult.bandwidth;
    QuantumState out(M);
    double input_mass = s.norm_squared();
    for (int m = -M; m <= M; ++m) {
        Complex acc{};
        int lo = std::max(-M, m - B);
        int hi = std::min(M, m + B);
        for (int k = lo; k <= hi; ++k) acc += mult.coeffs[static_cast<std::size_t>(m - k + B)] * s[k];
        out[m] = acc;
    }
    double leaked = std::max(0.0, input_mass - out.norm_squared());
    return {std::move(out), leaked};
}

KickResult apply_phase_on_grid(const QuantumState& s, std::span<const double> phase, SpectralGrid& grid) {
    if (phase.size() != grid.size()) throw ConfigurationError("phase samples do not match grid size");
    std::vector<Complex> samples;
    grid.synthesize(s.coeffs(), samples);
    for (std::size_t j = 0; j < samples.size(); ++j) samples[j] *= std::polar(1.0, phase[j]);
    std::vector<Complex> coeffs;
    double leaked = grid.analyze(samples, coeffs, s.bandwidth());
    return {QuantumState(s.bandwidth(), std::move(coeffs)), leaked};
}

KickResult apply_kick_grid(const QuantumState& s, double strength, SpectralGrid& grid) {
    require_grid(&grid, s.bandwidth());
    std::vector<double> phase(grid.size());
    for (std::size_t j = 0; j < phase.size(); ++j)
        phase[j] = strength * static_cast<double>(classical::tent(Turn::grid_point(j, grid.log2_size())));
    return apply_phase_on_grid(s, phase, grid);
}

KickResult apply_kick(const QuantumState& s, const KickMultiplier& mult, KickMethod method, SpectralGrid* grid) {
    if (method == KickMethod::Convolution) return apply_kick_convolution(s, mult);
    require_grid(grid, s.bandwidth());
    return apply_kick_grid(s, mult.strength, *grid);
}

QuantumState apply_rotation(const QuantumState& s, const RotationNumber& rotation, std::int64_t steps) {
    QuantumState out = s;
    const int M = s.bandwidth();
    for (int m = -M; m <= M; ++m) out[m] *= unit_phase(-rotation.multiple(static_cast<std::int64_t>(m) * steps));
    return out;
}

KickResult step(const QuantumState& s, const ModelParams& params, KickMethod method, SpectralGrid* grid,
                const KickMultiplier* mult) {
    params.validate(false);
    const double strength = -params.kick_strength / params.hbar;
    KickResult kicked{QuantumState(s.bandwidth())};
    if (method == KickMethod::Grid) {
        require_grid(grid, s.bandwidth());
        kicked = apply_kick_grid(s, strength, *grid);
    } else {
        std::optional<KickMultiplier> local;
        if (mult == nullptr) {
            local = kick_coeffs(strength, 2 * s.bandwidth());
            mult = &*local;
        } else if (mult->strength != strength) {
            throw ConfigurationError("kick multiplier strength does not match -K/hbar");
        }
        kicked = apply_kick_convolution(s, *mult);
    }
    kicked.state = apply_rotation(kicked.state, params.rotation, 1);
    return kicked;
}

KickResult iterate_closed_form(const QuantumState& s, std::int64_t n, const ModelParams& params, SpectralGrid& grid) {
    params.validate(false);
    if (n < 1) throw std::invalid_argument("closed-form iterate needs n >= 1");
    require_grid(&grid, s.bandwidth());
    QuantumState rotated = apply_rotation(s, params.rotation, n);
    const double strength = -params.kick_strength / params.hbar;
    std::vector<double> phase = classical::h_n_exact(n, params.rotation).sample_grid(grid.log2_size());
    for (double& p : phase) p *= strength;
    return apply_phase_on_grid(rotated, phase, grid);
}

// ---------------------------------------------------------------------------
// Observable u

MedianIndex u_observable_detail(const QuantumState& s) {
    const double total = s.norm_squared();
    if (!(total > 0.0)) throw std::invalid_argument("u is undefined for the zero state");
    MedianIndex out{-1, false};
    double cumulative = 0.0;
    for (int m = 0; m <= s.bandwidth(); ++m) {
        cumulative += std::norm(s[m]);
        if (m > 0) cumulative += std::norm(s[-m]);
        double fraction = cumulative / total;
        if (fraction > 0.5 + kTieTolerance) break;
        out.index = m;
        if (std::fabs(fraction - 0.5) <= kTieTolerance) out.tie = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Evolution

Evolution::Evolution(const ModelParams& params, int bandwidth, KickMethod method, EvolutionOptions options)
    : params_(params),
      bandwidth_(bandwidth),
      method_(method),
      options_(options),
      grid_(options.grid_size == 0 ? SpectralGrid::default_size(bandwidth) : options.grid_size) {
    params_.validate(false);
    if (bandwidth < 1) throw ConfigurationError("bandwidth M must be >= 1");
    if (options_.renormalize_every < 0) throw ConfigurationError("renormalize interval must be >= 0");
    require_grid(&grid_, bandwidth);
    const double strength = -params_.kick_strength / params_.hbar;
    if (method_ == KickMethod::Convolution) {
        int B = options_.multiplier_bandwidth == 0 ? 2 * bandwidth : options_.multiplier_bandwidth;
        multiplier_ = kick_coeffs(strength, B);
    } else {
        multiplier_.strength = strength;
    }
    rotation_phases_.resize(static_cast<std::size_t>(2 * bandwidth + 1));
    for (int m = -bandwidth; m <= bandwidth; ++m)
        rotation_phases_[static_cast<std::size_t>(m + bandwidth)] = unit_phase(-params_.rotation.multiple(m));
}

void Evolution::advance(QuantumState& s) {
    if (s.bandwidth() != bandwidth_) throw ConfigurationError("state bandwidth does not match the evolution");
    KickResult r = method_ == KickMethod::Grid ? apply_kick_grid(s, multiplier_.strength, grid_)
                                                : apply_kick_convolution(s, multiplier_);
    s = std::move(r.state);
    for (std::size_t i = 0; i < rotation_phases_.size(); ++i) s.coeffs()[i] *= rotation_phases_[i];
    leak_ += r.leaked;
    ++steps_;
    if (options_.renormalize_every > 0 && steps_ % options_.renormalize_every == 0) {
        s.normalize();
        ++renormalizations_;
    }
    if (options_.trace) records_.push_back({steps_, u_observable(s), leak_, quasi::classify_region(s)});
}

}  // namespace gmr::quantum
