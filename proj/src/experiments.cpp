#include "gmr/experiments.hpp"

#include "gmr/classical.hpp"
#include "gmr/errors.hpp"
#include "gmr/golden_mean.hpp"
#include "gmr/quasiconjugacy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

namespace gmr::cli {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

json precision_metadata(const ExperimentConfig& config) {
    return {{"golden_mean_fraction_bits", 128},
            {"delta_n_float_bits", 256},
            {"grid", config.grid == 0 ? SpectralGrid::default_size(config.bandwidth) : config.grid},
            {"tie_tolerance", quantum::kTieTolerance}};
}

json base_metadata(const ExperimentConfig& config) {
    return {{"tool", "gmr"},
            {"version", kToolVersion},
            {"experiment", config.experiment},
            {"config", config.to_json()},
            {"precision", precision_metadata(config)}};
}

std::string csv_cell(const Cell& cell) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, double>) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                return buf;
            } else {
                return std::to_string(v);
            }
        },
        cell);
}

json json_cell(const Cell& cell) {
    return std::visit([](const auto& v) { return json(v); }, cell);
}

// ---------------------------------------------------------------------------
// Lemma checks

void check_convergents(Table& t, std::int64_t& violations) {
    for (int n = 1; n <= 90; ++n) {
        golden::Convergent c = golden::convergent(n);
        golden::Convergent next = golden::convergent(n + 1);
        bool recurrence = n < 2 || c.q == golden::fibonacci_q(n - 1) + (n >= 3 ? golden::fibonacci_q(n - 2) : mpz_class(1));
        bool numerator = c.p == golden::fibonacci_q(n + 1);
        mpq_class diff = next.value - c.value;
        mpq_class expected(n % 2 == 1 ? 1 : -1, 1);
        expected /= mpq_class(next.q * c.q);
        bool alternation = diff == expected;
        bool even = mpz_even_p(c.q.get_mpz_t()) != 0;
        bool parity = even == (n % 3 == 1);
        bool error_bound = n < 3 || c.within_half_over_q_squared();
        bool pass = recurrence && numerator && alternation && parity && error_bound;
        if (!pass) ++violations;
        t.add({std::string("convergents"), static_cast<std::int64_t>(n), c.q.get_str(), c.p.get_str(),
               golden::delta_n(n) * kTwoPi, 0.5, 0.5 - golden::delta_n(n) * kTwoPi,
               std::string(c.is_below() ? "below" : "above"), pass});
    }
}

void check_decomposition(Table& t, std::int64_t& violations, std::int64_t k_max) {
    // One summary row per decade of k.
    std::int64_t lo = 1;
    while (lo <= k_max) {
        std::int64_t hi = std::min(k_max, lo * 10 - 1);
        std::int64_t worst_k = lo;
        double worst_margin = 1e300;
        std::size_t worst_len = 0;
        bool pass = true;
        for (std::int64_t k = lo; k <= hi; ++k) {
            auto d = golden::decompose(static_cast<std::uint64_t>(k));
            std::uint64_t sum = 0;
            bool increasing = true;
            for (std::size_t i = 0; i < d.parts.size(); ++i) {
                sum += d.parts[i];
                if (i > 0 && d.parts[i] <= d.parts[i - 1]) increasing = false;
            }
            bool ok = sum == static_cast<std::uint64_t>(k) && increasing;
            if (k >= 2) {
                double margin = golden::decomposition_length_bound(static_cast<std::uint64_t>(k)) -
                                static_cast<double>(d.parts.size());
                ok = ok && margin >= 0.0;
                if (margin < worst_margin) {
                    worst_margin = margin;
                    worst_k = k;
                    worst_len = d.parts.size();
                }
            }
            if (!ok) {
                pass = false;
                ++violations;
            }
        }
        if (worst_margin == 1e300) worst_margin = 0.0;
        t.add({std::string("4.2"), std::string(std::to_string(lo) + ".." + std::to_string(hi)),
               std::to_string(worst_k), std::string(""), static_cast<double>(worst_len),
               golden::decomposition_length_bound(static_cast<std::uint64_t>(std::max<std::int64_t>(worst_k, 2))),
               worst_margin, std::string("worst k"), pass});
        lo = hi + 1;
    }
}

void check_halfcircle_convergents(Table& t, std::int64_t& violations, std::int64_t q_max, std::int64_t samples,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::vector<double> thetas(static_cast<std::size_t>(samples));
    for (auto& th : thetas) th = angle(rng);
    for (int n = 1;; ++n) {
        mpz_class q_big = golden::fibonacci_q(n);
        if (q_big > q_max) break;
        std::int64_t q = q_big.get_si();
        std::int64_t lo = q;
        std::int64_t hi = 0;
        for (double th : thetas) {
            std::int64_t c = golden::halfcircle_count(th, q);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        double half = 0.5 * static_cast<double>(q);
        double deviation = std::max(std::fabs(lo - half), std::fabs(hi - half));
        bool pass = deviation <= 3.0;
        if (!pass) ++violations;
        t.add({std::string("4.1"), static_cast<std::int64_t>(n), std::to_string(q),
               std::string(std::to_string(lo) + ".." + std::to_string(hi)), deviation, 3.0, 3.0 - deviation,
               std::string("max |count - q/2| over samples"), pass});
    }
}

void check_halfcircle_general(Table& t, std::int64_t& violations, std::int64_t k_max, std::int64_t samples,
                              std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    // k = 1 has bound 0 while |count - 1/2| = 1/2 always, so sampling starts at k = 2.
    std::uniform_int_distribution<std::int64_t> steps(2, std::max<std::int64_t>(2, k_max));
    for (std::int64_t i = 0; i < samples; ++i) {
        double th = angle(rng);
        std::int64_t k = steps(rng);
        std::int64_t c = golden::halfcircle_count(th, k);
        double deviation = std::fabs(static_cast<double>(c) - 0.5 * static_cast<double>(k));
        double bound = golden::halfcircle_discrepancy_bound(k);
        bool pass = deviation <= bound;
        if (!pass) ++violations;
        t.add({std::string("4.3"), i, std::to_string(k), std::to_string(th), deviation, bound, bound - deviation,
               std::string("count=" + std::to_string(c)), pass});
    }
}

}  // namespace

// Fitted constant for the sup |H_{q_n}| envelope, shared with the tests.
double fitted_hqn_constant(const std::vector<classical::HqnSupremum>& rows, int up_to) {
    double c = 0.0;
    for (const auto& r : rows)
        if (r.n <= up_to) c = std::max(c, r.sup_abs / r.envelope);
    return c;
}

namespace {

void check_hqn(Table& t, std::int64_t& violations, json& meta) {
    std::vector<classical::HqnSupremum> rows;
    for (int n = 1; n <= 16; ++n) rows.push_back(classical::sup_abs_hqn(n));
    const double c10 = fitted_hqn_constant(rows, 10);
    const double c16 = fitted_hqn_constant(rows, 16);
    const bool stable = c16 <= 1.2 * c10;
    if (!stable) ++violations;
    meta["hqn_constant_n_le_10"] = c10;
    meta["hqn_constant_n_le_16"] = c16;
    meta["hqn_constant_stable"] = stable;
    for (const auto& r : rows) {
        bool slope_ok = r.max_abs_slope <= 3;
        double bound = 1.2 * c10 * r.envelope;
        bool sup_ok = r.sup_abs <= bound;
        bool pass = sup_ok && (slope_ok || r.q > 987);
        if (!pass) ++violations;
        t.add({std::string("4.4"), static_cast<std::int64_t>(r.n), std::to_string(r.q),
               std::string("max|slope|=" + std::to_string(r.max_abs_slope)), r.sup_abs, bound, bound - r.sup_abs,
               std::string("envelope n/1.5^n=" + csv_cell(r.envelope)), pass});
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw ConfigurationError("format must be csv or json, got '" + name + "'");
}

void ExperimentConfig::validate() const {
    try {
        params.validate(false);
    } catch (const std::invalid_argument& e) {
        throw ConfigurationError(e.what());
    }
    if (bandwidth < 1) throw ConfigurationError("M must be >= 1");
    if (multiplier_bandwidth < 0) throw ConfigurationError("B must be >= 0");
    if (grid != 0 && (grid & (grid - 1)) != 0) throw ConfigurationError("grid must be a power of two");
    if (grid != 0 && grid < static_cast<std::size_t>(8) * static_cast<std::size_t>(bandwidth))
        throw ConfigurationError("grid must be >= 8M");
    if (samples < 1) throw ConfigurationError("samples must be >= 1");
    if (!(momentum_bound > 0.0)) throw ConfigurationError("N must be positive");
    if (n_max < 1) throw ConfigurationError("n-max must be >= 1");
    if (k_max < 2) throw ConfigurationError("k-max must be >= 2");
    if (q_max < 2) throw ConfigurationError("q-max must be >= 2");
    if (iterations < 1) throw ConfigurationError("iterations must be >= 1");
    if (record_every < 1) throw ConfigurationError("record-every must be >= 1");
    if (renormalize_every < 0) throw ConfigurationError("renormalize-every must be >= 0");
    if (max_parts < 0) throw ConfigurationError("max-parts must be >= 0");
    for (auto n : steps)
        if (n < 1) throw ConfigurationError("every step count must be >= 1");
    for (int i : fib_indices)
        if (i < 1 || i > 90) throw ConfigurationError("Fibonacci indices must lie in [1, 90]");
    if (search_target && !(*search_target > 0.0 && *search_target <= 1.0))
        throw ConfigurationError("search target is a fraction of 2 pi in (0, 1]");
    static const std::vector<std::string> selectors{"all", "4.1", "4.2", "4.3", "4.4", "convergents"};
    if (std::find(selectors.begin(), selectors.end(), selector) == selectors.end())
        throw ConfigurationError("unknown lemma selector '" + selector + "'");
}

json ExperimentConfig::to_json() const {
    json j{{"experiment", experiment},
           {"K", params.kick_strength},
           {"hbar", params.hbar},
           {"lambda", params.rotation.to_string()},
           {"M", bandwidth},
           {"B", multiplier_bandwidth == 0 ? 2 * bandwidth : multiplier_bandwidth},
           {"grid", grid == 0 ? SpectralGrid::default_size(bandwidth) : grid},
           {"steps", steps},
           {"fib_indices", fib_indices},
           {"max_parts", max_parts},
           {"n_max", n_max},
           {"samples", samples},
           {"N", momentum_bound},
           {"seed", seed},
           {"format", format == OutputFormat::Csv ? "csv" : "json"},
           {"selector", selector},
           {"k_max", k_max},
           {"q_max", q_max},
           {"trinomial", trinomial},
           {"histogram", histogram},
           {"method", std::string(quantum::to_string(method))},
           {"initial_state", initial_state},
           {"iterations", iterations},
           {"record_every", record_every},
           {"renormalize_every", renormalize_every}};
    j["search_target"] = search_target ? json(*search_target) : json(nullptr);
    j["contrast"] = contrast ? json(contrast->to_string()) : json(nullptr);
    j["strength"] = strength ? json(*strength) : json(nullptr);
    return j;
}

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match the column count");
    rows.push_back(std::move(row));
}

// ---------------------------------------------------------------------------
// Runners

Report run_lemma_checks(const ExperimentConfig& config) {
    config.validate();
    Report report;
    report.metadata = base_metadata(config);
    report.table.columns = {"check", "case", "q", "value", "measured", "bound", "margin", "detail", "pass"};
    const std::string& sel = config.selector;
    auto wanted = [&](const char* name) { return sel == "all" || sel == name; };
    if (wanted("convergents")) check_convergents(report.table, report.violations);
    if (wanted("4.1")) check_halfcircle_convergents(report.table, report.violations, config.q_max, 1000, config.seed);
    if (wanted("4.2")) check_decomposition(report.table, report.violations, config.k_max);
    if (wanted("4.3")) {
        std::int64_t k_cap = std::min<std::int64_t>(config.k_max, 100000);
        check_halfcircle_general(report.table, report.violations, k_cap, 1000, config.seed);
    }
    if (wanted("4.4")) check_hqn(report.table, report.violations, report.metadata);
    report.metadata["violations"] = report.violations;
    return report;
}

Report run_classical_diffusion(const ExperimentConfig& config) {
    config.validate();
    if (config.params.kick_strength == 0.0) throw ConfigurationError("classical diffusion needs K != 0");
    Report report;
    report.metadata = base_metadata(config);
    const ModelParams& params = config.params;

    std::vector<std::int64_t> candidates = config.steps;
    std::vector<int> indices = config.fib_indices;
    if (candidates.empty() && indices.empty()) indices = classical::diffusion_recipe_indices(config.n_max);
    if (!indices.empty()) {
        int parts = config.max_parts == 0 ? static_cast<int>(indices.size()) : config.max_parts;
        auto sums = classical::fibonacci_sum_candidates(indices, parts, config.n_max);
        candidates.insert(candidates.end(), sums.begin(), sums.end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    report.metadata["fib_indices"] = indices;

    if (config.search_target) {
        auto found = classical::search_diffusion_step_count(candidates, config.momentum_bound,
                                                            *config.search_target * kTwoPi, params);
        report.metadata["search"] = {{"target_measure", found.target},
                                     {"found", found.found},
                                     {"n", found.n},
                                     {"measure", found.measure},
                                     {"evaluated", found.evaluated}};
        if (!found.found) report.violations = 1;
        candidates = {found.n};
    }

    const double delta_mean = [&] {
        if (indices.empty()) return golden::delta_limit();
        double s = 0.0;
        for (int i : indices) s += golden::delta_n(i);
        return s / static_cast<double>(indices.size());
    }();
    report.metadata["trinomial_delta"] = delta_mean;

    if (config.histogram) {
        report.table.columns = {"n", "value", "measure_fraction", "parts", "trinomial_mass"};
        for (std::int64_t n : candidates) {
            auto dist = classical::h_tilde_prime_distribution(n, params.rotation);
            int parts = static_cast<int>(golden::decompose(static_cast<std::uint64_t>(n)).parts.size());
            auto model = classical::trinomial_masses(parts, std::min(delta_mean, 0.499));
            for (std::int64_t v = -n; v <= n; ++v) {
                double frac = static_cast<double>(dist.at(v)) / kTwoPi;
                double tri = (v % 2 == 0) ? model.mass(static_cast<int>(v / 2)) : 0.0;
                if (frac == 0.0 && tri == 0.0) continue;
                report.table.add({n, v, frac, static_cast<std::int64_t>(parts), tri});
            }
        }
        return report;
    }

    report.table.columns = {"n", "N", "exact_measure", "montecarlo_measure", "montecarlo_stderr"};
    if (config.trinomial) {
        report.table.columns.push_back("parts");
        report.table.columns.push_back("trinomial_measure");
    }
    for (std::int64_t n : candidates) {
        double exact = classical::diffusion_measure_exact(n, config.momentum_bound, params);
        auto mc = classical::diffusion_measure_monte_carlo(n, config.momentum_bound, params, config.samples,
                                                           config.seed + static_cast<std::uint64_t>(n));
        std::vector<Cell> row{n, config.momentum_bound, exact, mc.measure, mc.standard_error};
        if (config.trinomial) {
            int parts = static_cast<int>(golden::decompose(static_cast<std::uint64_t>(n)).parts.size());
            auto model = classical::trinomial_masses(parts, std::min(delta_mean, 0.499));
            double inside = 0.0;
            for (int k = -parts; k <= parts; ++k)
                if (std::fabs(2.0 * k * params.kick_strength) < config.momentum_bound) inside += model.mass(k);
            row.push_back(static_cast<std::int64_t>(parts));
            row.push_back(inside * kTwoPi);
        }
        report.table.add(std::move(row));
    }
    return report;
}

namespace {

struct LocalizationRun {
    std::vector<std::vector<Cell>> rows;
    int max_u = -1;
    double leak = 0.0;
    double edge_mass = 0.0;
    int renormalizations = 0;
    std::int64_t ties = 0;
};

LocalizationRun localize(const ExperimentConfig& config, const ModelParams& params, const std::string& label) {
    quantum::EvolutionOptions options;
    options.grid_size = config.grid;
    options.multiplier_bandwidth = config.multiplier_bandwidth;
    options.renormalize_every = config.renormalize_every;
    quantum::Evolution evolution(params, config.bandwidth, config.method, options);
    quantum::QuantumState state = quantum::QuantumState::parse(config.initial_state, config.bandwidth);

    LocalizationRun run;
    auto record = [&](std::int64_t n) {
        auto u = quantum::u_observable_detail(state);
        auto p = quasi::p_of_detail(state);
        run.max_u = std::max(run.max_u, u.index);
        if (u.tie || p.tie) ++run.ties;
        run.rows.push_back({label, n, static_cast<std::int64_t>(u.index), evolution.cumulative_leak(),
                            std::string(to_string(quasi::classify_region(state))),
                            quasi::theta_of(state, evolution.grid()), static_cast<std::int64_t>(p.index),
                            u.tie || p.tie});
    };
    record(0);
    for (std::int64_t n = 1; n <= config.iterations; ++n) {
        evolution.advance(state);
        if (n % config.record_every == 0 || n == config.iterations) {
            record(n);
        } else {
            run.max_u = std::max(run.max_u, quantum::u_observable(state));
        }
    }
    run.leak = evolution.cumulative_leak();
    run.edge_mass = state.edge_mass(std::max(1, config.bandwidth / 64));
    run.renormalizations = evolution.renormalizations();
    return run;
}

}  // namespace

Report run_quantum_localization(const ExperimentConfig& config) {
    config.validate();
    Report report;
    report.metadata = base_metadata(config);
    report.table.columns = {"run", "n", "u", "norm_leak", "region", "theta_of", "p_of", "tie"};

    auto primary = std::async(std::launch::async, [&] { return localize(config, config.params, "primary"); });
    std::optional<std::future<LocalizationRun>> contrast;
    if (config.contrast) {
        ModelParams other = config.params;
        other.rotation = *config.contrast;
        contrast = std::async(std::launch::async, [&config, other] { return localize(config, other, "contrast"); });
    }

    auto describe = [](const LocalizationRun& run) {
        return json{{"max_u", run.max_u},
                    {"cumulative_norm_leak", run.leak},
                    {"edge_mass", run.edge_mass},
                    {"edge_warning", run.edge_mass > 1e-8},
                    {"renormalizations", run.renormalizations},
                    {"ties", run.ties}};
    };
    LocalizationRun p = primary.get();
    report.metadata["primary"] = describe(p);
    report.metadata["cumulative_norm_leak"] = p.leak;
    report.metadata["classical_region_resolved"] = quasi::classical_region_resolved(config.bandwidth);
    for (auto& row : p.rows) report.table.add(std::move(row));
    if (contrast) {
        LocalizationRun c = contrast->get();
        report.metadata["contrast"] = describe(c);
        for (auto& row : c.rows) report.table.add(std::move(row));
    }
    return report;
}

Report run_trace(const ExperimentConfig& config) {
    config.validate();
    Report report;
    report.metadata = base_metadata(config);
    quantum::QuantumState state = quantum::QuantumState::parse(config.initial_state, config.bandwidth);
    quasi::TraceOptions options;
    options.method = config.method;
    options.grid_size = config.grid;
    options.every = config.record_every;
    auto trace = quasi::correspondence_trace(state, config.iterations, config.params, options);
    report.metadata["cumulative_norm_leak"] = trace.cumulative_leak;
    report.metadata["momentum_units"] = "mode index (hbar = " + csv_cell(config.params.hbar) + ")";
    report.table.columns = {"n",          "classical_theta", "classical_p", "quantum_theta",
                            "quantum_p",  "angle_gap",       "momentum_gap"};
    for (const auto& s : trace.steps)
        report.table.add({s.n, s.classical_image.theta, s.classical_image.momentum, s.quantum_projection.theta,
                          s.quantum_projection.momentum, s.angle_gap, s.momentum_gap});
    return report;
}

Report run_kick_coeffs(const ExperimentConfig& config) {
    config.validate();
    const double c = config.strength.value_or(-config.params.kick_strength / config.params.hbar);
    const int B = config.multiplier_bandwidth == 0 ? 2 * config.bandwidth : config.multiplier_bandwidth;
    auto mult = quantum::kick_coeffs(c, B);
    Report report;
    report.metadata = base_metadata(config);
    report.metadata["strength"] = c;
    report.metadata["tail_bound"] = mult.tail_bound;
    report.table.columns = {"m", "re", "im", "abs"};
    for (int m = -B; m <= B; ++m) {
        auto g = mult[m];
        report.table.add({static_cast<std::int64_t>(m), g.real(), g.imag(), std::abs(g)});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Output

void write_csv(std::ostream& out, const Report& report) {
    out << '#' << report.metadata.dump() << '\n';
    for (std::size_t i = 0; i < report.table.columns.size(); ++i)
        out << (i ? "," : "") << report.table.columns[i];
    out << '\n';
    for (const auto& row : report.table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
}

void write_json(std::ostream& out, const Report& report) {
    json rows = json::array();
    for (const auto& row : report.table.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[report.table.columns[i]] = json_cell(row[i]);
        rows.push_back(std::move(obj));
    }
    json doc{{"metadata", report.metadata}, {"columns", report.table.columns}, {"rows", std::move(rows)}};
    out << doc.dump(2) << '\n';
}

void write_report(const Report& report, const ExperimentConfig& config) {
    auto emit = [&](std::ostream& out) {
        if (config.format == OutputFormat::Csv)
            write_csv(out, report);
        else
            write_json(out, report);
    };
    if (config.output_path.empty()) {
        emit(std::cout);
        return;
    }
    std::ofstream file(config.output_path);
    if (!file) throw std::runtime_error("cannot open output file '" + config.output_path + "'");
    emit(file);
    file.flush();
    if (!file) throw std::runtime_error("failed writing output file '" + config.output_path + "'");
}

}  // namespace gmr::cli
