#pragma once

#include "vanetsim/engine.hpp"
#include "vanetsim/scenario.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vanetsim {

/// Scenario for one of the four experiment conditions with everything
/// else at reference defaults.
ScenarioConfig make_condition(Condition condition, int n_vehicles, Scheme scheme,
                              std::uint64_t seed);

/// Validates and runs one scenario. Throws std::invalid_argument with the
/// joined violation list when the config is invalid.
MetricsReport run_condition(const ScenarioConfig& cfg);

/// Arithmetic mean travel time over finished vehicles. Throws
/// std::invalid_argument when no vehicle finished.
double average_travel_time(const MetricsReport& report);

struct MatrixCell {
    Condition condition = Condition::no_event;
    int n_vehicles = 0;
    Scheme scheme = Scheme::none;
    std::uint64_t seed = 1;
    MetricsReport report;
};

/// Runs every (condition, density, scheme, seed) cell. Cells execute in
/// parallel (independent simulations); the returned rows are ordered by
/// (condition, density, scheme, seed) regardless of completion order.
/// `base` supplies every non-cell parameter (geometry, comms, trust).
std::vector<MatrixCell> run_matrix(const std::vector<Condition>& conditions,
                                   const std::vector<int>& densities,
                                   const std::vector<Scheme>& schemes,
                                   const std::vector<std::uint64_t>& seeds,
                                   const ScenarioConfig& base);

struct SchemeComparison {
    MetricsReport receiver_side;
    MetricsReport sender_side;
    long receiver_trust_messages = 0;
    long sender_trust_messages = 0;
    std::optional<double> receiver_latency;
    std::optional<double> sender_latency;
    std::optional<double> receiver_avg_travel_time;
    std::optional<double> sender_avg_travel_time;
};

/// Same scenario under the receiver-side and the sender-side scheme; the
/// condition is forced to trustworthy_announcement. Reports only; the
/// assertions live in the test suites.
SchemeComparison compare_schemes(ScenarioConfig base);

// --- config file -----------------------------------------------------------

/// Section-based key=value text ([scenario], [geometry], [comms],
/// [trust]); '#' starts a comment. Unknown keys and sections, duplicate
/// keys and malformed values are reported with line numbers; semantic
/// violations with key names. condition and n_vehicles are required
/// unless `require_scenario_keys` is false (CLI flags may supply them).
struct ParsedConfig {
    std::optional<ScenarioConfig> config;
    std::vector<std::string> errors;
    bool condition_set = false;
    bool n_vehicles_set = false;
};

ParsedConfig parse_config(const std::string& text, bool require_scenario_keys = true);

// --- CSV emission ----------------------------------------------------------
// Numbers are rendered with three decimals so identical seeds produce
// byte-identical files.

/// id,inserted_at,finished_at,travel_time,route,latency — one row per
/// inserted vehicle. Optional fields render empty.
void write_vehicle_csv(const MetricsReport& report, const std::string& path);

/// One aggregate row per cell: condition, density, scheme, seed, average
/// travel time, message counts by kind, suppressed announcements, mean
/// decision latency and verdict counts. Adds a seed="mean" row per
/// (condition, density, scheme) group when it spans multiple seeds.
void write_summary_csv(const std::vector<MatrixCell>& cells, const std::string& path,
                       bool with_mean_rows);

/// kind,location_edge,outcome,confidence,decided_at — one row per verdict.
void write_verdicts_csv(const MetricsReport& report, const std::string& path);

std::string format_fixed(double value); // three decimals

} // namespace vanetsim
