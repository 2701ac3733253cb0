// Acceptance suite: one PASS/FAIL line per criterion.
//   gmr_acceptance                 run all criteria
//   gmr_acceptance --criterion 7   run one
// Exit status is nonzero when any selected criterion fails.

#include "gmr/classical.hpp"
#include "gmr/experiments.hpp"
#include "gmr/golden_mean.hpp"
#include "gmr/quantum.hpp"
#include "gmr/quasiconjugacy.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace gmr;
using quantum::Complex;
using quantum::QuantumState;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

template <typename... Args>
std::string format(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

QuantumState random_state(int bandwidth, int support, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    QuantumState s(bandwidth);
    for (int m = -support; m <= support; ++m) s[m] = Complex(gauss(rng), gauss(rng));
    s.normalize();
    return s;
}

double l2_distance(const QuantumState& a, const QuantumState& b) {
    double sum = 0.0;
    for (int m = -a.bandwidth(); m <= a.bandwidth(); ++m) sum += std::norm(a[m] - b[m]);
    return std::sqrt(sum);
}

// 1. Convergent identities in exact arithmetic.
Outcome convergents() {
    int bad = 0;
    for (int n = 1; n <= 90; ++n) {
        auto c = golden::convergent(n);
        auto next = golden::convergent(n + 1);
        if (n >= 3 && golden::fibonacci_q(n) != golden::fibonacci_q(n - 1) + golden::fibonacci_q(n - 2)) ++bad;
        if (c.p != golden::fibonacci_q(n + 1)) ++bad;
        mpq_class step = next.value - c.value;
        mpq_class expected(n % 2 == 1 ? 1 : -1, 1);
        expected /= mpq_class(next.q * c.q);
        if (step != expected) ++bad;
        if (!c.within_half_over_q_squared() && n >= 3) ++bad;
    }
    for (int n = 0; 3 * n + 1 <= 90; ++n)
        if (mpz_class(golden::fibonacci_q(3 * n + 1) % 2) != 0) ++bad;
    return {bad == 0, format("n <= 90, %d exact identity failures", bad)};
}

// 2. Greedy decomposition.
Outcome decomposition() {
    std::set<std::uint64_t> fib{1};
    for (int n = 1; n <= 40; ++n) fib.insert(golden::fibonacci_q(n).get_ui());
    std::int64_t bad = 0;
    double tightest = 1e9;
    for (std::uint64_t k = 2; k <= 1000000; ++k) {
        auto d = golden::decompose(k);
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < d.parts.size(); ++i) {
            sum += d.parts[i];
            if (!fib.count(d.parts[i]) || (i > 0 && d.parts[i] <= d.parts[i - 1])) ++bad;
        }
        double bound = std::log(static_cast<double>(k)) / std::log(1.5);
        if (sum != k || static_cast<double>(d.parts.size()) > bound) ++bad;
        tightest = std::min(tightest, bound - static_cast<double>(d.parts.size()));
    }
    return {bad == 0, format("2 <= k <= 1e6, %lld violations, min slack %.3f", static_cast<long long>(bad), tightest)};
}

// 3. Half-circle counts.
Outcome halfcircle() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    std::uniform_int_distribution<std::int64_t> kdist(2, 100000);
    int bad_q = 0;
    double worst_q = 0.0;
    for (int t = 0; t < 1000; ++t) {
        double th = angle(rng);
        for (int n = 1; golden::fibonacci_q(n) <= 987; ++n) {
            std::int64_t q = golden::fibonacci_q(n).get_si();
            double dev = std::fabs(static_cast<double>(golden::halfcircle_count(th, q)) - q / 2.0);
            worst_q = std::max(worst_q, dev);
            if (dev > 3.0) ++bad_q;
        }
    }
    int bad_k = 0;
    double worst_ratio = 0.0;
    for (int t = 0; t < 1000; ++t) {
        double th = angle(rng);
        std::int64_t k = kdist(rng);
        double dev = std::fabs(static_cast<double>(golden::halfcircle_count(th, k)) - k / 2.0);
        double bound = 3.0 * std::log(static_cast<double>(k)) / std::log(1.5);
        worst_ratio = std::max(worst_ratio, dev / bound);
        if (dev > bound) ++bad_k;
    }
    return {bad_q == 0 && bad_k == 0,
            format("q_n <= 987: max |dev| %.1f (<= 3), %d bad; k <= 1e5: max dev/bound %.3f, %d bad", worst_q, bad_q,
                   worst_ratio, bad_k)};
}

// 4. Slopes and decay of sup |H_{q_n}|.
Outcome hqn() {
    std::vector<classical::HqnSupremum> rows;
    int worst_slope = 0;
    for (int n = 1; n <= 16; ++n) {
        rows.push_back(classical::sup_abs_hqn(n));
        if (rows.back().q <= 987) worst_slope = std::max(worst_slope, rows.back().max_abs_slope);
    }
    double c10 = cli::fitted_hqn_constant(rows, 10);
    double c16 = cli::fitted_hqn_constant(rows, 16);
    bool stable = std::fabs(c16 - c10) <= 0.2 * c10;
    return {worst_slope <= 3 && stable,
            format("max slope %d (<= 3); C(n<=10) %.4f, C(n<=16) %.4f, sup|H_q16| %.3e", worst_slope, c10, c16,
                   rows.back().sup_abs)};
}

// 5. Search for a Fibonacci-sum step count with small diffusion measure.
Outcome diffusion_search() {
    ModelParams params;
    const double N = 5.0;
    const std::int64_t n_max = 100000;
    std::vector<std::int64_t> candidates;
    auto recipe = classical::diffusion_recipe_indices(n_max);
    auto from_recipe = classical::fibonacci_sum_candidates(recipe, static_cast<int>(recipe.size()), n_max);
    candidates.insert(candidates.end(), from_recipe.begin(), from_recipe.end());
    std::vector<int> all;
    for (int i = 1; golden::fibonacci_q(i) <= n_max; ++i) all.push_back(i);
    auto sums = classical::fibonacci_sum_candidates(all, 3, n_max);
    candidates.insert(candidates.end(), sums.begin(), sums.end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    auto found = classical::search_diffusion_step_count(candidates, N, 0.1 * 2 * kPi, params);
    auto mc = classical::diffusion_measure_monte_carlo(found.n, N, params, 1000000, 5);
    double sigma = std::max(mc.standard_error, 1e-12);
    bool mc_ok = std::fabs(mc.measure - found.measure) <= 3 * sigma;
    auto scan = classical::diffusion_grid_scan(n_max, N, params, 12);
    return {found.found && mc_ok,
            format("%lld candidates, best n=%lld fraction %.4f (target < 0.1); MC %.4f +- %.4f %s; "
                   "all n <= 1e5 on 4096-point grid: min fraction %.4f at n=%lld",
                   static_cast<long long>(found.evaluated), static_cast<long long>(found.n), found.measure / (2 * kPi),
                   mc.measure / (2 * kPi), mc.standard_error / (2 * kPi), mc_ok ? "agrees" : "DISAGREES",
                   scan.best_fraction, static_cast<long long>(scan.best_n))};
}

// 6. Trinomial central mass.
Outcome trinomial() {
    double prev = 2.0;
    bool monotone = true;
    double worst_sum = 0.0;
    double central = 0.0;
    for (int n = 1; n <= 1000; ++n) {
        auto model = classical::trinomial_masses(n, 0.25);
        double sum = 0.0;
        for (double m : model.masses) sum += m;
        worst_sum = std::max(worst_sum, std::fabs(sum - 1.0));
        central = model.mass(0);
        if (n >= 2 && central >= prev) monotone = false;
        prev = central;
    }
    return {monotone && central < 0.05 && worst_sum <= 1e-12,
            format("monotone %s, |E_1000,0| = %.5f (< 0.05), max |sum - 1| = %.1e", monotone ? "yes" : "no", central,
                   worst_sum)};
}

// (1/2pi) int_0^{2pi} e^{i c H(t)} e^{-i m t} dt by composite 30-point
// Gauss-Legendre on each linear piece of the tent.
Complex quadrature_coefficient(double c, int m) {
    using boost::math::quadrature::gauss;
    auto piece = [&](auto h, double a, double b) {
        auto re = [&](double t) { return std::cos(c * h(t) - m * t); };
        auto im = [&](double t) { return std::sin(c * h(t) - m * t); };
        constexpr int kPanels = 32;
        Complex sum = 0.0;
        for (int k = 0; k < kPanels; ++k) {
            double lo = a + (b - a) * k / kPanels;
            double hi = a + (b - a) * (k + 1) / kPanels;
            sum += Complex(gauss<double, 30>::integrate(re, lo, hi), gauss<double, 30>::integrate(im, lo, hi));
        }
        return sum;
    };
    Complex upper = piece([](double t) { return t - kPi / 2; }, 0.0, kPi);
    Complex lower = piece([](double t) { return 1.5 * kPi - t; }, kPi, 2 * kPi);
    return (upper + lower) / (2 * kPi);
}

// 7. Quantum operator correctness.
Outcome operators() {
    std::mt19937_64 rng(7);
    const int M = 256;
    auto white = random_state(M, M, rng);
    auto conv = quantum::apply_kick_convolution(white, quantum::kick_coeffs(1.0, 2 * M));
    SpectralGrid fine(std::size_t{1} << 17);
    auto grid = quantum::apply_kick_grid(white, 1.0, fine);
    double kick_err = l2_distance(conv.state, grid.state);

    const int M2 = 512;
    ModelParams params;
    const int wide = 16 * M2;
    SpectralGrid g16(std::size_t{1} << 16);
    SpectralGrid g18(std::size_t{1} << 18);
    double closed_err = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
        auto s0 = random_state(M2, 32, rng);
        QuantumState composed(wide);
        for (int m = -M2; m <= M2; ++m) composed[m] = s0[m];
        for (std::int64_t n = 1; n <= 100; ++n) {
            composed = quantum::step(composed, params, quantum::KickMethod::Grid, &g18).state;
            if (n <= 10 || n % 10 == 0 || n == 89 || n == 55) {
                auto closed = quantum::iterate_closed_form(s0, n, params, g16).state;
                QuantumState cut(M2);
                for (int m = -M2; m <= M2; ++m) cut[m] = composed[m];
                closed_err = std::max(closed_err, quantum::projective_distance(closed, cut));
            }
        }
    }

    double coeff_err = 0.0;
    for (double c : {0.3, 1.0, 2.7})
        for (int m = -64; m <= 64; ++m)
            coeff_err = std::max(coeff_err, std::abs(quantum::kick_coefficient(c, m) - quadrature_coefficient(c, m)));

    return {kick_err < 1e-8 && closed_err < 1e-6 && coeff_err < 1e-10,
            format("grid vs convolution %.2e (< 1e-8); closed form vs steps %.2e (< 1e-6); coeffs vs quadrature "
                   "%.2e (< 1e-10)",
                   kick_err, closed_err, coeff_err)};
}

// 8. Perturbation inequality.
Outcome perturbation() {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 1.0);
    const int M = 64;
    SpectralGrid grid(4096);
    std::int64_t violations = 0;
    double worst = 0.0;
    for (double eta : {1e-3, 1e-2, 1e-1}) {
        for (int trial = 0; trial < 100; ++trial) {
            auto psi = random_state(M, 1 + static_cast<int>(rng() % 32), rng);
            auto lam = RotationNumber::rational(static_cast<std::int64_t>(rng() % 1000), 1000);
            auto shifted = quantum::apply_rotation(psi, lam);
            std::vector<double> h(grid.size());
            double coef[6];
            for (double& x : coef) x = unit(rng);
            double phase = 2 * kPi * angle(rng);
            double sup = 0.0;
            for (std::size_t j = 0; j < h.size(); ++j) {
                double t = 2 * kPi * static_cast<double>(j) / static_cast<double>(h.size());
                h[j] = coef[0] + coef[1] * std::cos(t) + coef[2] * std::sin(2 * t + phase) + coef[3] * std::cos(3 * t) +
                       coef[4] * std::sin(5 * t) + coef[5] * std::cos(8 * t + phase);
                sup = std::max(sup, std::fabs(h[j]));
            }
            for (double& x : h) x *= eta / sup;
            auto out = quantum::apply_phase_on_grid(shifted, h, grid).state;
            for (int m = -M; m <= M; ++m) {
                double diff = std::abs(out[m] - shifted[m]);
                double bound = std::sqrt(2 * kPi) * eta;
                worst = std::max(worst, diff / bound);
                if (diff > bound) ++violations;
            }
        }
    }
    return {violations == 0, format("300 triples, %lld violations, max ratio to bound %.3f",
                                    static_cast<long long>(violations), worst)};
}

// 9. Bounded u for the golden rotation against the resonant control.
Outcome localization() {
    cli::ExperimentConfig config;
    config.bandwidth = 1024;
    config.iterations = 10000;
    config.record_every = 50;
    config.initial_state = "gaussian:sigma=5,center=0";
    config.contrast = RotationNumber::rational(1, 1);
    config.output_path = "acceptance_c9_trace.csv";
    auto report = cli::run_quantum_localization(config);
    cli::write_report(report, config);
    int golden_u = report.metadata["primary"]["max_u"];
    double golden_leak = report.metadata["primary"]["cumulative_norm_leak"];
    int resonant_u = report.metadata["contrast"]["max_u"];
    bool pass = golden_u < config.bandwidth / 4 && golden_leak < 1e-4 && resonant_u > golden_u;
    return {pass, format("golden max u %d (< %d), leak %.2e (< 1e-4); resonance max u %d; trace in %s", golden_u,
                         config.bandwidth / 4, golden_leak, resonant_u, config.output_path.c_str())};
}

// 10. Global phase invariance.
Outcome phase_invariance() {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
    int mismatches = 0;
    double theta_gap = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        int M = 16 + static_cast<int>(rng() % 300);
        auto s = random_state(M, 1 + static_cast<int>(rng() % M), rng);
        auto t = s;
        Complex phase = std::polar(1.0, angle(rng));
        for (auto& a : t.coeffs()) a *= phase;
        auto us = quantum::u_observable_detail(s);
        auto ut = quantum::u_observable_detail(t);
        auto ps = quasi::p_of_detail(s);
        auto pt = quasi::p_of_detail(t);
        auto ls = quasi::lambda_map(s);
        auto lt = quasi::lambda_map(t);
        if (us.index != ut.index || us.tie != ut.tie || ps.index != pt.index || ps.tie != pt.tie) ++mismatches;
        if (quasi::classify_region(s) != quasi::classify_region(t)) ++mismatches;
        if (ls.momentum != lt.momentum || quasi::v_observable(ls) != quasi::v_observable(lt)) ++mismatches;
        theta_gap = std::max(theta_gap, std::fabs(ls.theta - lt.theta));
    }
    return {mismatches == 0 && theta_gap <= 1e-12,
            format("100 states, %d discrete mismatches, max theta difference %.1e (<= 1e-12)", mismatches, theta_gap)};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {"convergent identities", convergents},
        {"greedy Fibonacci decomposition", decomposition},
        {"half-circle orbit counts", halfcircle},
        {"H_{q_n} slopes and decay", hqn},
        {"small diffusion measure at a Fibonacci-sum n", diffusion_search},
        {"trinomial central mass", trinomial},
        {"quantum operator correctness", operators},
        {"kick perturbation inequality", perturbation},
        {"golden localization vs resonance", localization},
        {"global phase invariance", phase_invariance},
    };

    int selected = 0;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            selected = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: gmr_acceptance [--criterion 1-" << criteria.size() << "]\n";
            return 2;
        }
    }
    if (selected < 0 || selected > static_cast<int>(criteria.size())) {
        std::cerr << "criterion must be in 1.." << criteria.size() << "\n";
        return 2;
    }

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (selected != 0 && static_cast<int>(i) + 1 != selected) continue;
        auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!out.pass) ++failures;
        std::printf("C%-2zu %s  %s: %s [%.1fs]\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].name,
                    out.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
