#pragma once

// Experiment runners behind the command-line tool. Each runner returns a
// Report: a metadata object (config echo, precision, leak totals) plus a flat
// table written as CSV with one leading '#' JSON line, or as pure JSON.

#include "gmr/classical.hpp"
#include "gmr/model.hpp"
#include "gmr/quantum.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gmr::cli {

inline constexpr const char* kToolVersion = "0.3.0";

enum class OutputFormat { Csv, Json };
OutputFormat parse_format(const std::string& name);

struct ExperimentConfig {
    std::string experiment;
    ModelParams params;
    int bandwidth = 1024;          // M
    int multiplier_bandwidth = 0;  // B; 0 selects 2M
    std::size_t grid = 0;          // 0 selects the smallest power of two >= 8M
    std::vector<std::int64_t> steps;
    std::vector<int> fib_indices;
    int max_parts = 0;             // 0: any number of Fibonacci parts
    std::int64_t n_max = 100000;
    std::int64_t samples = 1000000;
    double momentum_bound = 5.0;   // N
    std::uint64_t seed = 1;
    std::string output_path;       // empty: stdout
    OutputFormat format = OutputFormat::Csv;

    // lemma checks
    std::string selector = "all";
    std::int64_t k_max = 1000000;
    std::int64_t q_max = 987;

    // classical diffusion
    std::optional<double> search_target;  // fraction of 2 pi
    bool trinomial = false;
    bool histogram = false;

    // quantum runs
    quantum::KickMethod method = quantum::KickMethod::Grid;
    std::string initial_state = "gaussian:sigma=5,center=0";
    std::int64_t iterations = 10000;
    std::int64_t record_every = 1;
    int renormalize_every = 0;
    std::optional<RotationNumber> contrast;

    // kick-coeffs
    std::optional<double> strength;  // c; defaults to -K/hbar

    /// Throws ConfigurationError on any invalid field.
    void validate() const;
    nlohmann::json to_json() const;
};

using Cell = std::variant<std::int64_t, double, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

struct Report {
    nlohmann::json metadata;
    Table table;
    std::int64_t violations = 0;
};

/// max_{n <= up_to} sup|H_{q_n}| / (n / 1.5^n).
double fitted_hqn_constant(const std::vector<classical::HqnSupremum>& rows, int up_to);

Report run_lemma_checks(const ExperimentConfig& config);
Report run_classical_diffusion(const ExperimentConfig& config);
Report run_quantum_localization(const ExperimentConfig& config);
Report run_trace(const ExperimentConfig& config);
Report run_kick_coeffs(const ExperimentConfig& config);

void write_csv(std::ostream& out, const Report& report);
void write_json(std::ostream& out, const Report& report);
/// Writes to config.output_path or stdout; throws std::runtime_error with the path on I/O failure.
void write_report(const Report& report, const ExperimentConfig& config);

}  // namespace gmr::cli
