#include "vanetsim/harness.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace vanetsim;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::string condition;
    int vehicles = -1;
    std::string scheme;
    std::optional<std::uint64_t> seed;
};

/// File config (when given) plus flag overrides. Returns nothing after
/// printing errors.
std::optional<ScenarioConfig> assemble(const CommonArgs& args, bool need_condition) {
    ScenarioConfig cfg;
    bool condition_set = false;
    bool n_set = false;

    if (!args.config_path.empty()) {
        std::ifstream f(args.config_path);
        if (!f) {
            std::cerr << "error: cannot read config file: " << args.config_path << "\n";
            return std::nullopt;
        }
        std::stringstream buf;
        buf << f.rdbuf();
        auto parsed = parse_config(buf.str(), /*require_scenario_keys=*/false);
        if (!parsed.config) {
            for (const auto& e : parsed.errors) {
                std::cerr << "config error: " << e << "\n";
            }
            return std::nullopt;
        }
        cfg = *parsed.config;
        condition_set = parsed.condition_set;
        n_set = parsed.n_vehicles_set;
    }

    if (!args.condition.empty()) {
        auto c = parse_condition(args.condition);
        if (!c) {
            std::cerr << "error: unknown condition '" << args.condition << "'\n";
            return std::nullopt;
        }
        cfg.condition = *c;
        condition_set = true;
    }
    if (args.vehicles >= 0) {
        cfg.n_vehicles = args.vehicles;
        n_set = true;
    }
    if (!args.scheme.empty()) {
        auto s = parse_scheme(args.scheme);
        if (!s) {
            std::cerr << "error: unknown scheme '" << args.scheme << "'\n";
            return std::nullopt;
        }
        cfg.trust.scheme = *s;
    }
    if (args.seed) {
        cfg.seed = *args.seed;
    }

    if (need_condition && !condition_set) {
        std::cerr << "error: condition is required (config file or --condition)\n";
        return std::nullopt;
    }
    if (need_condition && !n_set) {
        std::cerr << "error: n_vehicles is required (config file or --vehicles)\n";
        return std::nullopt;
    }
    const auto errors = validate(cfg);
    if (!errors.empty()) {
        for (const auto& e : errors) {
            std::cerr << "config error: " << e << "\n";
        }
        return std::nullopt;
    }
    return cfg;
}

int cmd_run(const CommonArgs& args) {
    auto cfg = assemble(args, true);
    if (!cfg) return 2;

    std::filesystem::create_directories(args.out_dir);
    const MetricsReport report = run_condition(*cfg);

    MatrixCell cell;
    cell.condition = cfg->condition;
    cell.n_vehicles = cfg->n_vehicles;
    cell.scheme = cfg->trust.scheme;
    cell.seed = cfg->seed;
    cell.report = report;

    write_vehicle_csv(report, args.out_dir + "/vehicles.csv");
    write_summary_csv({cell}, args.out_dir + "/summary.csv", /*with_mean_rows=*/false);
    write_verdicts_csv(report, args.out_dir + "/verdicts.csv");

    std::cout << "condition=" << to_string(cfg->condition) << " n=" << cfg->n_vehicles
              << " scheme=" << to_string(cfg->trust.scheme) << " seed=" << cfg->seed << "\n";
    if (report.average_travel_time) {
        std::cout << "average travel time: " << format_fixed(*report.average_travel_time)
                  << " s\n";
    } else {
        std::cout << "average travel time: n/a (no finished vehicles)\n";
    }
    std::cout << "messages: ";
    bool first = true;
    for (const auto& [kind, count] : report.messages_sent) {
        if (!first) std::cout << ", ";
        std::cout << to_string(kind) << "=" << count;
        first = false;
    }
    std::cout << "\nwrote " << args.out_dir << "/vehicles.csv, summary.csv, verdicts.csv\n";
    if (report.incomplete) {
        std::cerr << "warning: run incomplete (vehicles unfinished at the horizon)\n";
        return 1;
    }
    return 0;
}

int cmd_matrix(const CommonArgs& args, std::vector<std::uint64_t> seeds,
               std::vector<int> densities, std::vector<std::string> scheme_names) {
    auto base = assemble(args, false);
    if (!base) return 2;

    std::vector<Scheme> schemes;
    for (const auto& name : scheme_names) {
        auto s = parse_scheme(name);
        if (!s) {
            std::cerr << "error: unknown scheme '" << name << "'\n";
            return 2;
        }
        schemes.push_back(*s);
    }
    const std::vector<Condition> conditions = {
        Condition::no_event, Condition::false_announcement, Condition::unannounced_event,
        Condition::trustworthy_announcement};

    std::filesystem::create_directories(args.out_dir);
    const auto cells = run_matrix(conditions, densities, schemes, seeds, *base);
    write_summary_csv(cells, args.out_dir + "/matrix.csv", /*with_mean_rows=*/true);

    bool incomplete = false;
    for (const auto& cell : cells) {
        if (cell.report.incomplete) incomplete = true;
    }
    std::cout << "ran " << cells.size() << " cells; wrote " << args.out_dir << "/matrix.csv\n";
    if (incomplete) {
        std::cerr << "warning: at least one cell incomplete\n";
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vanetsim: deterministic two-route traffic simulator comparing "
                 "announcement trust schemes"};
    app.require_subcommand(1);

    CommonArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "run a single condition and emit CSVs");
    run_cmd->add_option("--config", run_args.config_path, "scenario config file");
    run_cmd->add_option("--condition", run_args.condition,
                        "no_event | false_announcement | unannounced_event | "
                        "trustworthy_announcement");
    run_cmd->add_option("--vehicles", run_args.vehicles, "number of vehicles");
    run_cmd->add_option("--scheme", run_args.scheme, "none | receiver_side | sender_side");
    run_cmd->add_option("--seed", run_args.seed, "rng seed");
    run_cmd->add_option("--out", run_args.out_dir, "output directory (default: out)");

    CommonArgs matrix_args;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::vector<int> densities = {10, 30, 50};
    std::vector<std::string> schemes = {"none"};
    auto* matrix_cmd =
        app.add_subcommand("matrix", "run the full condition x density matrix and emit one CSV");
    matrix_cmd->add_option("--config", matrix_args.config_path, "base scenario config file");
    matrix_cmd->add_option("--out", matrix_args.out_dir, "output directory (default: out)");
    matrix_cmd->add_option("--seeds", seeds, "seed list (default: 1 2 3 4 5)");
    matrix_cmd->add_option("--densities", densities, "vehicle counts (default: 10 30 50)");
    matrix_cmd->add_option("--schemes", schemes, "schemes to sweep (default: none)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            return cmd_run(run_args);
        }
        return cmd_matrix(matrix_args, seeds, densities, schemes);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
