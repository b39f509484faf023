#include "vanetsim/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace vanetsim {

// --- scenario plumbing -------------------------------------------------------

std::string to_string(Condition c) {
    switch (c) {
        case Condition::no_event: return "no_event";
        case Condition::false_announcement: return "false_announcement";
        case Condition::unannounced_event: return "unannounced_event";
        case Condition::trustworthy_announcement: return "trustworthy_announcement";
    }
    return "unknown";
}

std::optional<Condition> parse_condition(const std::string& s) {
    if (s == "no_event") return Condition::no_event;
    if (s == "false_announcement") return Condition::false_announcement;
    if (s == "unannounced_event") return Condition::unannounced_event;
    if (s == "trustworthy_announcement") return Condition::trustworthy_announcement;
    return std::nullopt;
}

std::vector<std::string> validate(const ScenarioConfig& cfg) {
    std::vector<std::string> errors;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };
    require(cfg.duration > 0, "duration must be > 0");
    require(cfg.n_vehicles >= 0, "n_vehicles must be >= 0");
    require(cfg.insertion_gap > 0, "insertion_gap must be > 0");
    require(cfg.halt_duration >= 0, "halt_duration must be >= 0");
    require(cfg.announce_offset >= 0, "announce_offset must be >= 0");
    require(cfg.second_announcement_at >= 0, "second_announcement_at must be >= 0");
    require(cfg.step > 0, "step must be > 0");

    require(cfg.geometry.prefix_length > 0, "prefix_length must be > 0");
    require(cfg.geometry.primary_branch > 0, "primary_branch must be > 0");
    require(cfg.geometry.alternate_branch > 0, "alternate_branch must be > 0");
    require(cfg.geometry.speed_limit > 0, "speed_limit must be > 0");
    require(cfg.geometry.alternate_branch > cfg.geometry.primary_branch,
            "alternate_branch must exceed primary_branch");
    require(cfg.halt_offset >= 0, "halt_offset must be >= 0");
    require(cfg.halt_offset < cfg.geometry.primary_branch,
            "halt_offset must lie before the destination");

    require(cfg.follow.max_accel > 0, "max_accel must be > 0");
    require(cfg.follow.max_decel > 0, "max_decel must be > 0");
    require(cfg.follow.headway > 0, "headway must be > 0");
    require(cfg.follow.min_gap > 0, "min_gap must be > 0");

    require(cfg.radio_range > 0, "radio_range must be > 0");
    require(cfg.beacon_period > 0, "beacon_period must be > 0");
    require(cfg.hop_budget >= 0, "hop_budget must be >= 0");
    require(cfg.rsu_range > 0, "rsu_range must be > 0");

    for (auto& e : validate(cfg.trust)) {
        errors.push_back(e);
    }
    return errors;
}

ScenarioConfig make_condition(Condition condition, int n_vehicles, Scheme scheme,
                              std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.condition = condition;
    cfg.n_vehicles = n_vehicles;
    cfg.trust.scheme = scheme;
    cfg.seed = seed;
    return cfg;
}

MetricsReport run_condition(const ScenarioConfig& cfg) {
    const auto errors = validate(cfg);
    if (!errors.empty()) {
        std::string joined;
        for (const auto& e : errors) {
            if (!joined.empty()) joined += "; ";
            joined += e;
        }
        throw std::invalid_argument("invalid scenario config: " + joined);
    }
    return run(cfg);
}

double average_travel_time(const MetricsReport& report) {
    double total = 0.0;
    long finished = 0;
    for (const auto& v : report.vehicles) {
        if (auto t = v.travel_time()) {
            total += *t;
            ++finished;
        }
    }
    if (finished == 0) {
        throw std::invalid_argument("average_travel_time: no finished vehicles");
    }
    return total / static_cast<double>(finished);
}

std::vector<MatrixCell> run_matrix(const std::vector<Condition>& conditions,
                                   const std::vector<int>& densities,
                                   const std::vector<Scheme>& schemes,
                                   const std::vector<std::uint64_t>& seeds,
                                   const ScenarioConfig& base) {
    std::vector<MatrixCell> cells;
    for (Condition c : conditions) {
        for (int n : densities) {
            for (Scheme s : schemes) {
                for (std::uint64_t seed : seeds) {
                    MatrixCell cell;
                    cell.condition = c;
                    cell.n_vehicles = n;
                    cell.scheme = s;
                    cell.seed = seed;
                    cells.push_back(std::move(cell));
                }
            }
        }
    }

    std::vector<std::future<MetricsReport>> futures;
    futures.reserve(cells.size());
    for (const auto& cell : cells) {
        ScenarioConfig cfg = base;
        cfg.condition = cell.condition;
        cfg.n_vehicles = cell.n_vehicles;
        cfg.trust.scheme = cell.scheme;
        cfg.seed = cell.seed;
        futures.push_back(std::async(std::launch::async,
                                     [cfg]() { return run_condition(cfg); }));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        cells[i].report = futures[i].get();
    }
    return cells;
}

SchemeComparison compare_schemes(ScenarioConfig base) {
    base.condition = Condition::trustworthy_announcement;

    ScenarioConfig recv = base;
    recv.trust.scheme = Scheme::receiver_side;
    ScenarioConfig send = base;
    send.trust.scheme = Scheme::sender_side;

    SchemeComparison cmp;
    cmp.receiver_side = run_condition(recv);
    cmp.sender_side = run_condition(send);
    cmp.receiver_trust_messages = cmp.receiver_side.trust_message_count();
    cmp.sender_trust_messages = cmp.sender_side.trust_message_count();
    cmp.receiver_latency = cmp.receiver_side.mean_decision_latency();
    cmp.sender_latency = cmp.sender_side.mean_decision_latency();
    cmp.receiver_avg_travel_time = cmp.receiver_side.average_travel_time;
    cmp.sender_avg_travel_time = cmp.sender_side.average_travel_time;
    return cmp;
}

// --- config file -------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

struct KeySetter {
    const char* section;
    const char* key;
    std::function<bool(ScenarioConfig&, const std::string&)> apply; // false = bad value
};

bool set_double(double& slot, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) return false;
        slot = d;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

bool set_int(int& slot, const std::string& v) {
    try {
        std::size_t used = 0;
        const long d = std::stol(v, &used);
        if (used != v.size()) return false;
        slot = static_cast<int>(d);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

bool set_u64(std::uint64_t& slot, const std::string& v) {
    try {
        std::size_t used = 0;
        const unsigned long long d = std::stoull(v, &used);
        if (used != v.size()) return false;
        slot = d;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

} // namespace

ParsedConfig parse_config(const std::string& text, bool require_scenario_keys) {
    ParsedConfig out;
    ScenarioConfig cfg;

    const std::set<std::string> sections = {"scenario", "geometry", "comms", "trust"};

    // One table of every recognized key; everything else is rejected.
    auto key_setter = [&](const std::string& section,
                          const std::string& key) -> std::function<bool(const std::string&)> {
        using Fn = std::function<bool(const std::string&)>;
        auto dbl = [&cfg](double& slot) {
            return [&slot](const std::string& v) { return set_double(slot, v); };
        };
        auto opt_dbl = [](std::optional<double>& slot) {
            return [&slot](const std::string& v) {
                double d;
                if (!set_double(d, v)) return false;
                slot = d;
                return true;
            };
        };
        std::map<std::pair<std::string, std::string>, Fn> table = {
            {{"scenario", "duration"}, dbl(cfg.duration)},
            {{"scenario", "n_vehicles"}, [&](const std::string& v) {
                 if (!set_int(cfg.n_vehicles, v)) return false;
                 out.n_vehicles_set = true;
                 return true;
             }},
            {{"scenario", "insertion_gap"}, dbl(cfg.insertion_gap)},
            {{"scenario", "condition"}, [&](const std::string& v) {
                 auto c = parse_condition(v);
                 if (!c) return false;
                 cfg.condition = *c;
                 out.condition_set = true;
                 return true;
             }},
            {{"scenario", "seed"}, [&](const std::string& v) { return set_u64(cfg.seed, v); }},
            {{"scenario", "halt_duration"}, dbl(cfg.halt_duration)},
            {{"scenario", "announce_offset"}, dbl(cfg.announce_offset)},
            {{"scenario", "second_announcement_at"}, dbl(cfg.second_announcement_at)},
            {{"geometry", "prefix_length"}, dbl(cfg.geometry.prefix_length)},
            {{"geometry", "primary_branch"}, dbl(cfg.geometry.primary_branch)},
            {{"geometry", "alternate_branch"}, dbl(cfg.geometry.alternate_branch)},
            {{"geometry", "speed_limit"}, dbl(cfg.geometry.speed_limit)},
            {{"geometry", "halt_offset"}, dbl(cfg.halt_offset)},
            {{"geometry", "max_accel"}, dbl(cfg.follow.max_accel)},
            {{"geometry", "max_decel"}, dbl(cfg.follow.max_decel)},
            {{"geometry", "headway"}, dbl(cfg.follow.headway)},
            {{"geometry", "min_gap"}, dbl(cfg.follow.min_gap)},
            {{"comms", "radio_range"}, dbl(cfg.radio_range)},
            {{"comms", "beacon_period"}, dbl(cfg.beacon_period)},
            {{"comms", "hop_budget"}, [&](const std::string& v) { return set_int(cfg.hop_budget, v); }},
            {{"comms", "rsu_range"}, dbl(cfg.rsu_range)},
            {{"comms", "rsu_a_x"}, opt_dbl(cfg.rsu_a_x)},
            {{"comms", "rsu_a_y"}, opt_dbl(cfg.rsu_a_y)},
            {{"comms", "rsu_b_x"}, opt_dbl(cfg.rsu_b_x)},
            {{"comms", "rsu_b_y"}, opt_dbl(cfg.rsu_b_y)},
            {{"trust", "scheme"}, [&](const std::string& v) {
                 auto s = parse_scheme(v);
                 if (!s) return false;
                 cfg.trust.scheme = *s;
                 return true;
             }},
            {{"trust", "w_direct"}, dbl(cfg.trust.w_direct)},
            {{"trust", "w_indirect"}, dbl(cfg.trust.w_indirect)},
            {{"trust", "w_rsu"}, dbl(cfg.trust.w_rsu)},
            {{"trust", "accept_threshold"}, dbl(cfg.trust.accept_threshold)},
            {{"trust", "announce_threshold"}, dbl(cfg.trust.announce_threshold)},
            {{"trust", "blacklist_floor"}, dbl(cfg.trust.blacklist_floor)},
            {{"trust", "eval_timer"}, dbl(cfg.trust.eval_timer)},
            {{"trust", "quorum"}, [&](const std::string& v) { return set_int(cfg.trust.quorum, v); }},
            {{"trust", "adjudication_timeout"}, dbl(cfg.trust.adjudication_timeout)},
            {{"trust", "initial_trust"}, dbl(cfg.trust.initial_trust)},
        };
        auto it = table.find({section, key});
        if (it == table.end()) return nullptr;
        return it->second;
    };

    std::set<std::pair<std::string, std::string>> assigned;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') {
                out.errors.push_back("line " + std::to_string(line_no) +
                                     ": malformed section header");
                continue;
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!sections.count(section)) {
                out.errors.push_back("line " + std::to_string(line_no) + ": unknown section [" +
                                     section + "]");
                section.clear();
            }
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            out.errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) {
            out.errors.push_back("line " + std::to_string(line_no) + ": key '" + key +
                                 "' outside any section");
            continue;
        }
        auto setter = key_setter(section, key);
        if (!setter) {
            out.errors.push_back("line " + std::to_string(line_no) + ": unknown key '" + key +
                                 "' in section [" + section + "]");
            continue;
        }
        if (!assigned.insert({section, key}).second) {
            out.errors.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key +
                                 "'");
            continue;
        }
        if (!setter(value)) {
            out.errors.push_back("line " + std::to_string(line_no) + ": invalid value '" + value +
                                 "' for key '" + key + "'");
        }
    }

    if (require_scenario_keys) {
        if (!out.condition_set) out.errors.push_back("missing required key 'condition'");
        if (!out.n_vehicles_set) out.errors.push_back("missing required key 'n_vehicles'");
    }
    for (auto& e : validate(cfg)) {
        out.errors.push_back(e);
    }
    if (out.errors.empty()) {
        out.config = cfg;
    }
    return out;
}

// --- CSV ----------------------------------------------------------------------

std::string format_fixed(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", value);
    return buf;
}

namespace {

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    return f;
}

const std::vector<MsgKind>& all_kinds() {
    static const std::vector<MsgKind> kinds = {
        MsgKind::beacon, MsgKind::event_announcement, MsgKind::diversion,
        MsgKind::trust_query, MsgKind::trust_response, MsgKind::attack_report,
        MsgKind::corrective, MsgKind::trust_update};
    return kinds;
}

long count_verdicts(const MetricsReport& r, VerdictOutcome o) {
    long n = 0;
    for (const auto& v : r.verdicts) {
        if (v.outcome == o) ++n;
    }
    return n;
}

struct SummaryRow {
    std::string condition, n, scheme, seed;
    std::optional<double> avg;
    long finished = 0;
    bool incomplete = false;
    std::map<MsgKind, double> msgs;
    double trust_msgs = 0;
    double suppressed = 0;
    std::optional<double> latency;
    double confirmed = 0, refuted = 0, inconclusive = 0;

    void write(std::ofstream& f) const {
        f << condition << ',' << n << ',' << scheme << ',' << seed << ','
          << (avg ? format_fixed(*avg) : "") << ',' << finished << ',' << (incomplete ? 1 : 0);
        for (MsgKind k : all_kinds()) {
            f << ',' << format_fixed(msgs.count(k) ? msgs.at(k) : 0.0);
        }
        f << ',' << format_fixed(trust_msgs) << ',' << format_fixed(suppressed) << ','
          << (latency ? format_fixed(*latency) : "") << ',' << format_fixed(confirmed) << ','
          << format_fixed(refuted) << ',' << format_fixed(inconclusive) << '\n';
    }
};

SummaryRow row_from_cell(const MatrixCell& cell) {
    SummaryRow row;
    row.condition = to_string(cell.condition);
    row.n = std::to_string(cell.n_vehicles);
    row.scheme = to_string(cell.scheme);
    row.seed = std::to_string(cell.seed);
    row.avg = cell.report.average_travel_time;
    for (const auto& v : cell.report.vehicles) {
        if (v.finished_at) ++row.finished;
    }
    row.incomplete = cell.report.incomplete;
    for (MsgKind k : all_kinds()) {
        row.msgs[k] = static_cast<double>(cell.report.sent(k));
    }
    row.trust_msgs = static_cast<double>(cell.report.trust_message_count());
    row.suppressed = static_cast<double>(cell.report.suppressed_announcements);
    row.latency = cell.report.mean_decision_latency();
    row.confirmed = static_cast<double>(count_verdicts(cell.report, VerdictOutcome::confirmed));
    row.refuted = static_cast<double>(count_verdicts(cell.report, VerdictOutcome::refuted));
    row.inconclusive =
        static_cast<double>(count_verdicts(cell.report, VerdictOutcome::inconclusive));
    return row;
}

} // namespace

void write_vehicle_csv(const MetricsReport& report, const std::string& path) {
    auto f = open_or_throw(path);
    f << "id,inserted_at,finished_at,travel_time,route,latency\n";
    for (const auto& v : report.vehicles) {
        f << v.id << ',' << format_fixed(v.inserted_at) << ','
          << (v.finished_at ? format_fixed(*v.finished_at) : "") << ','
          << (v.travel_time() ? format_fixed(*v.travel_time()) : "") << ',' << v.route << ','
          << (v.decision_latency ? format_fixed(*v.decision_latency) : "") << '\n';
    }
}

void write_summary_csv(const std::vector<MatrixCell>& cells, const std::string& path,
                       bool with_mean_rows) {
    auto f = open_or_throw(path);
    f << "condition,n_vehicles,scheme,seed,avg_travel_time,finished,incomplete";
    for (MsgKind k : all_kinds()) {
        f << ",msgs_" << to_string(k);
    }
    f << ",trust_messages,suppressed,mean_decision_latency,"
         "verdicts_confirmed,verdicts_refuted,verdicts_inconclusive\n";

    // Rows per seed in the given (already deterministic) order, then one
    // mean row per (condition, n, scheme) group.
    std::size_t i = 0;
    while (i < cells.size()) {
        std::size_t j = i;
        while (j < cells.size() && cells[j].condition == cells[i].condition &&
               cells[j].n_vehicles == cells[i].n_vehicles && cells[j].scheme == cells[i].scheme) {
            ++j;
        }
        std::vector<SummaryRow> group;
        for (std::size_t k = i; k < j; ++k) {
            group.push_back(row_from_cell(cells[k]));
            group.back().write(f);
        }
        if (with_mean_rows && group.size() > 1) {
            SummaryRow mean = group.front();
            mean.seed = "mean";
            double avg_total = 0.0;
            long avg_count = 0;
            double lat_total = 0.0;
            long lat_count = 0;
            mean.finished = 0;
            mean.incomplete = false;
            mean.trust_msgs = mean.suppressed = 0;
            mean.confirmed = mean.refuted = mean.inconclusive = 0;
            for (MsgKind k : all_kinds()) mean.msgs[k] = 0;
            for (const auto& row : group) {
                if (row.avg) {
                    avg_total += *row.avg;
                    ++avg_count;
                }
                if (row.latency) {
                    lat_total += *row.latency;
                    ++lat_count;
                }
                mean.finished += row.finished;
                mean.incomplete = mean.incomplete || row.incomplete;
                mean.trust_msgs += row.trust_msgs;
                mean.suppressed += row.suppressed;
                mean.confirmed += row.confirmed;
                mean.refuted += row.refuted;
                mean.inconclusive += row.inconclusive;
                for (MsgKind k : all_kinds()) mean.msgs[k] += row.msgs.at(k);
            }
            const double g = static_cast<double>(group.size());
            mean.avg = avg_count ? std::optional<double>(avg_total / avg_count) : std::nullopt;
            mean.latency = lat_count ? std::optional<double>(lat_total / lat_count) : std::nullopt;
            mean.finished = static_cast<long>(std::llround(mean.finished / g));
            mean.trust_msgs /= g;
            mean.suppressed /= g;
            mean.confirmed /= g;
            mean.refuted /= g;
            mean.inconclusive /= g;
            for (MsgKind k : all_kinds()) mean.msgs[k] /= g;
            mean.write(f);
        }
        i = j;
    }
}

void write_verdicts_csv(const MetricsReport& report, const std::string& path) {
    auto f = open_or_throw(path);
    f << "event_kind,location_edge,outcome,confidence,decided_at\n";
    for (const auto& v : report.verdicts) {
        const char* kind = v.event.kind == EventKind::diversion ? "diversion"
                           : v.event.kind == EventKind::accident ? "accident"
                                                                 : "resolution";
        f << kind << ',' << v.event.location << ',' << to_string(v.outcome) << ','
          << format_fixed(v.confidence) << ',' << format_fixed(v.decided_at) << '\n';
    }
}

} // namespace vanetsim
