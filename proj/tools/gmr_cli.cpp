// gmr: experiment runner for the kicked golden-mean rotor.
//
//   gmr lemmas --selector 4.4
//   gmr classical-diffusion --N 5 --search 0.1
//   gmr quantum-localize --M 1024 --iterations 10000 --contrast rational:1/1
//   gmr trace --initial mode:3 --iterations 200
//   gmr kick-coeffs --B 64
//
// Exit codes: 0 success, 1 check violation, 2 configuration error.

#include "gmr/errors.hpp"
#include "gmr/experiments.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

using gmr::cli::ExperimentConfig;

struct RawOptions {
    std::string lambda = "golden";
    std::string format = "csv";
    std::string method = "grid";
    std::string contrast;
    double strength = 0.0;
};

void add_common(CLI::App* cmd, ExperimentConfig& cfg, RawOptions& raw) {
    cmd->add_option("--K", cfg.params.kick_strength, "kick strength")->capture_default_str();
    cmd->add_option("--hbar", cfg.params.hbar, "Planck constant (kept fixed)")->capture_default_str();
    cmd->add_option("--lambda", raw.lambda, "rotation: golden | rational:p/q")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    cmd->add_option("-o,--output", cfg.output_path, "output file (default stdout)");
    cmd->add_option("--format", raw.format, "csv | json")->capture_default_str();
}

void add_quantum(CLI::App* cmd, ExperimentConfig& cfg, RawOptions& raw) {
    cmd->add_option("--M", cfg.bandwidth, "state bandwidth")->capture_default_str();
    cmd->add_option("--B", cfg.multiplier_bandwidth, "multiplier bandwidth (0: 2M)")->capture_default_str();
    cmd->add_option("--grid", cfg.grid, "grid size, power of two >= 8M (0: default)")->capture_default_str();
    cmd->add_option("--method", raw.method, "kick method: grid | convolution")->capture_default_str();
    cmd->add_option("--initial", cfg.initial_state, "mode:<m> | gaussian:sigma=<s>,center=<c> | uniform")
        ->capture_default_str();
    cmd->add_option("--iterations", cfg.iterations, "number of Floquet steps")->capture_default_str();
    cmd->add_option("--record-every", cfg.record_every, "emit every k-th step")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kicked golden-mean rotor: classical diffusion vs quantum localization"};
    app.require_subcommand(1);
    app.set_version_flag("--version", gmr::cli::kToolVersion);

    ExperimentConfig cfg;
    RawOptions raw;

    auto* lemmas = app.add_subcommand("lemmas", "number-theoretic and H_q checks");
    add_common(lemmas, cfg, raw);
    lemmas->add_option("--selector", cfg.selector, "all | convergents | 4.1 | 4.2 | 4.3 | 4.4")->capture_default_str();
    lemmas->add_option("--k-max", cfg.k_max, "largest k for decompositions")->capture_default_str();
    lemmas->add_option("--q-max", cfg.q_max, "largest q_n for half-circle counts")->capture_default_str();

    auto* diffusion = app.add_subcommand("classical-diffusion", "exact and Monte-Carlo band measures");
    add_common(diffusion, cfg, raw);
    diffusion->add_option("--N", cfg.momentum_bound, "momentum bound")->capture_default_str();
    diffusion->add_option("--steps", cfg.steps, "explicit step counts n");
    diffusion->add_option("--fib-indices", cfg.fib_indices, "Fibonacci indices whose sums are tried");
    diffusion->add_option("--max-parts", cfg.max_parts, "max Fibonacci parts per sum (0: any)")->capture_default_str();
    diffusion->add_option("--n-max", cfg.n_max, "largest step count")->capture_default_str();
    diffusion->add_option("--samples", cfg.samples, "Monte-Carlo samples")->capture_default_str();
    diffusion->add_option("--search", cfg.search_target, "target measure as a fraction of 2 pi");
    diffusion->add_flag("--trinomial", cfg.trinomial, "add trinomial-model columns");
    diffusion->add_flag("--histogram", cfg.histogram, "emit the H~'_n value distribution");

    auto* localize = app.add_subcommand("quantum-localize", "u(F^n psi) along a quantum orbit");
    add_common(localize, cfg, raw);
    add_quantum(localize, cfg, raw);
    localize->add_option("--contrast", raw.contrast, "companion rotation, e.g. rational:1/1");
    localize->add_option("--renormalize-every", cfg.renormalize_every, "renormalize every k steps (0: never)")
        ->capture_default_str();

    auto* trace = app.add_subcommand("trace", "compare f^n o Lambda with Lambda o F^n");
    add_common(trace, cfg, raw);
    add_quantum(trace, cfg, raw);

    auto* kick = app.add_subcommand("kick-coeffs", "dump Fourier coefficients of the kick multiplier");
    add_common(kick, cfg, raw);
    kick->add_option("--M", cfg.bandwidth, "state bandwidth")->capture_default_str();
    kick->add_option("--B", cfg.multiplier_bandwidth, "multiplier bandwidth (0: 2M)")->capture_default_str();
    auto* strength_opt = kick->add_option("--c", raw.strength, "multiplier strength (default -K/hbar)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        cfg.params.rotation = gmr::RotationNumber::parse(raw.lambda);
        cfg.format = gmr::cli::parse_format(raw.format);
        cfg.method = gmr::quantum::parse_kick_method(raw.method);
        if (!raw.contrast.empty()) cfg.contrast = gmr::RotationNumber::parse(raw.contrast);
        if (strength_opt->count() > 0) cfg.strength = raw.strength;

        gmr::cli::Report report;
        if (lemmas->parsed()) {
            cfg.experiment = "lemmas";
            report = gmr::cli::run_lemma_checks(cfg);
        } else if (diffusion->parsed()) {
            cfg.experiment = "classical-diffusion";
            report = gmr::cli::run_classical_diffusion(cfg);
        } else if (localize->parsed()) {
            cfg.experiment = "quantum-localize";
            report = gmr::cli::run_quantum_localization(cfg);
            if (report.metadata["primary"]["edge_warning"].get<bool>())
                std::cerr << "warning: edge mass exceeds 1e-8; increase --M\n";
            if (!report.metadata["classical_region_resolved"].get<bool>())
                std::cerr << "warning: M <= 200, the Classical region test cannot succeed\n";
        } else if (trace->parsed()) {
            cfg.experiment = "trace";
            report = gmr::cli::run_trace(cfg);
        } else {
            cfg.experiment = "kick-coeffs";
            report = gmr::cli::run_kick_coeffs(cfg);
        }
        gmr::cli::write_report(report, cfg);
        if (report.violations > 0) {
            std::cerr << report.violations << " check violation(s)\n";
            return 1;
        }
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
