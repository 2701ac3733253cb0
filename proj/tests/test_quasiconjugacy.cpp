#include "doctest.h"

#include "gmr/errors.hpp"
#include "gmr/quasiconjugacy.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace gmr;
using namespace gmr::quantum;
using namespace gmr::quasi;

namespace {

constexpr double kPi = std::numbers::pi;

QuantumState random_state(int bandwidth, int support, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    QuantumState s(bandwidth);
    for (int m = -support; m <= support; ++m) s[m] = Complex(gauss(rng), gauss(rng));
    s.normalize();
    return s;
}

// psi(theta) proportional to a periodized gaussian of width w centred at theta0.
QuantumState angular_bump(int bandwidth, double theta0, double w) {
    QuantumState s(bandwidth);
    for (int m = -bandwidth; m <= bandwidth; ++m) s[m] = std::polar(std::exp(-0.5 * m * m * w * w), -m * theta0);
    s.normalize();
    return s;
}

// (1/2pi) int_0^zeta |psi|^2, summed analytically over mode pairs.
double cumulative_mass(const QuantumState& s, double zeta) {
    const int M = s.bandwidth();
    std::complex<double> sum = zeta * s.norm_squared();
    for (int m = -M; m <= M; ++m) {
        for (int n = -M; n <= M; ++n) {
            if (m == n) continue;
            double k = m - n;
            sum += s[m] * std::conj(s[n]) * (std::exp(Complex(0.0, k * zeta)) - 1.0) / Complex(0.0, k);
        }
    }
    return sum.real() / (2 * kPi);
}

}  // namespace

TEST_SUITE("quasiconjugacy") {

TEST_CASE("theta of the constant function") {
    CHECK(theta_of(QuantumState::uniform(8)) == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("theta of a localized bump") {
    auto bump = angular_bump(256, kPi / 8, 0.04);
    double t = theta_of(bump);
    CHECK(t >= 0.0);
    CHECK(t <= kPi / 4);
    CHECK(t == doctest::Approx(kPi / 8).epsilon(1e-6));
    auto moved = apply_rotation(bump, RotationNumber::rational(1, 2));
    CHECK(theta_of(moved) == doctest::Approx(t + kPi).epsilon(1e-6));
}

TEST_CASE("theta splits the mass in half") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto s = random_state(12, 1 + static_cast<int>(rng() % 12), rng);
        SpectralGrid grid(SpectralGrid::default_size(12));
        double t = theta_of(s, grid);
        CHECK(std::fabs(cumulative_mass(s, t) - 0.5) <= 1.0 / static_cast<double>(grid.size()));
    }
    SpectralGrid tiny(16);
    CHECK_THROWS_AS(theta_of(QuantumState::uniform(8), tiny), ConfigurationError);
}

TEST_CASE("p_of") {
    CHECK(p_of(QuantumState::pure_mode(16, 5)) == 4);
    CHECK(p_of(QuantumState::pure_mode(16, -3)) == -4);
    CHECK(p_of(QuantumState::pure_mode(16, -16)) == -17);
    QuantumState pair(16);
    pair[0] = pair[10] = 1 / std::sqrt(2.0);
    auto d = p_of_detail(pair);
    CHECK(d.index == 9);
    CHECK(d.tie);
    CHECK_THROWS_AS(p_of(QuantumState(4)), std::invalid_argument);
}

TEST_CASE("u equals p_of on positive supports") {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 100; ++trial) {
        QuantumState s(40);
        int top = 1 + static_cast<int>(rng() % 40);
        for (int m = 1; m <= top; ++m) s[m] = Complex(gauss(rng), gauss(rng));
        s.normalize();
        REQUIRE(u_observable(s) == p_of(s));
    }
}

TEST_CASE("lambda map of the constant function") {
    auto image = lambda_map(QuantumState::uniform(8));
    CHECK(image.theta == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(image.momentum == -1.0);
}

TEST_CASE("regions") {
    CHECK(classify_region(QuantumState::pure_mode(400, 5)) == RegionLabel::Quantum);
    CHECK(classify_region(QuantumState::pure_mode(400, 300)) == RegionLabel::Classical);
    CHECK(classify_region(QuantumState::pure_mode(400, 100)) == RegionLabel::SemiClassical);
    CHECK(classify_region(QuantumState::pure_mode(400, -20)) == RegionLabel::Quantum);
    CHECK(classify_region(QuantumState::pure_mode(400, 200)) == RegionLabel::SemiClassical);
    CHECK(classical_region_resolved(400));
    CHECK_FALSE(classical_region_resolved(200));
    CHECK(to_string(RegionLabel::SemiClassical) == std::string("semiclassical"));
}

TEST_CASE("v and arc distance") {
    CHECK(v_observable({1.0, 0.0}) == 0.0);
    CHECK(v_observable({1.0, -3.0}) == 3.0);
    CHECK(arc_distance(0.1, 2 * kPi - 0.1) == doctest::Approx(0.2));
    CHECK(arc_distance(0.0, kPi) == doctest::Approx(kPi));
    CHECK(arc_distance(1.0, 1.0) == 0.0);
}

TEST_CASE("global phase leaves Lambda unchanged") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    for (int trial = 0; trial < 100; ++trial) {
        auto s = random_state(32, 1 + static_cast<int>(rng() % 32), rng);
        auto t = s;
        Complex phase = std::polar(1.0, angle(rng));
        for (auto& a : t.coeffs()) a *= phase;
        auto a = lambda_map(s);
        auto b = lambda_map(t);
        REQUIRE(a.momentum == b.momentum);
        REQUIRE(std::fabs(a.theta - b.theta) < 1e-12);
        REQUIRE(classify_region(s) == classify_region(t));
        REQUIRE(p_of_detail(s).tie == p_of_detail(t).tie);
    }
}

TEST_CASE("trace starts with zero gaps") {
    ModelParams p;
    auto trace = correspondence_trace(QuantumState::gaussian(256, 4.0, 10.0), 20, p);
    REQUIRE(!trace.steps.empty());
    CHECK(trace.steps.front().n == 0);
    CHECK(trace.steps.front().angle_gap == 0.0);
    CHECK(trace.steps.front().momentum_gap == 0.0);
    CHECK(trace.steps.back().n == 20);
    CHECK(trace.steps.size() == 21);
    CHECK(trace.cumulative_leak < 1e-6);
}

TEST_CASE("trace without kicks keeps the momenta together") {
    ModelParams p;
    p.kick_strength = 0.0;
    TraceOptions opts;
    opts.every = 7;
    auto trace = correspondence_trace(QuantumState::gaussian(64, 4.0, -6.0), 30, p, opts);
    CHECK(trace.steps.size() == 6);  // 0, 7, 14, 21, 28, 30
    for (const auto& s : trace.steps) CHECK(s.momentum_gap == 0.0);
    opts.every = 0;
    CHECK_THROWS_AS(correspondence_trace(QuantumState::uniform(8), 5, p, opts), ConfigurationError);
}

}  // TEST_SUITE
