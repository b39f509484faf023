#pragma once

#include "vanetsim/comms.hpp"
#include "vanetsim/mobility.hpp"
#include "vanetsim/road.hpp"
#include "vanetsim/trust.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vanetsim {

/// The four experiment conditions: free flow, a false diversion claim
/// with no actual blockage, a real 120 s blockage nobody announces, and
/// the same blockage announced truthfully.
enum class Condition {
    no_event,
    false_announcement,
    unannounced_event,
    trustworthy_announcement,
};

/// Full experiment description. Defaults reproduce the reference
/// scenario: 300 s horizon, 1 s insertion gap, 1000 m primary / 1400 m
/// alternate at 13.89 m/s, 300 m radio range, 120 s halt triggered 20 m
/// past the junction.
struct ScenarioConfig {
    // scenario
    double duration = 300.0;
    int n_vehicles = 0;
    double insertion_gap = 1.0;
    Condition condition = Condition::no_event;
    std::uint64_t seed = 1;
    double halt_duration = 120.0;
    double announce_offset = 0.0;          // s after halt start (trustworthy condition)
    double second_announcement_at = 0.0;   // absolute time of a repeat attempt, 0 = off

    // geometry + car following
    GeometryParams geometry;
    double halt_offset = 20.0;             // m past the junction
    FollowParams follow;

    // comms
    double radio_range = 300.0;
    double beacon_period = 1.0;
    int hop_budget = 5;
    double rsu_range = 300.0;
    std::optional<double> rsu_a_x, rsu_a_y; // default: junction node
    std::optional<double> rsu_b_x, rsu_b_y; // default: halt/event location

    // trust
    SchemeConfig trust;

    double step = 0.1; // s, fixed simulation step
};

/// Semantic validation; every violation names the offending key.
std::vector<std::string> validate(const ScenarioConfig& cfg);

struct VehicleMetrics {
    int id = -1;
    double inserted_at = 0.0;
    std::optional<double> finished_at;
    std::string route = "primary";
    std::optional<double> decision_latency;

    std::optional<double> travel_time() const {
        if (!finished_at) return std::nullopt;
        return *finished_at - inserted_at;
    }
};

struct MetricsReport {
    std::vector<VehicleMetrics> vehicles; // one row per inserted vehicle, by id
    std::map<MsgKind, long> messages_sent;
    long suppressed_announcements = 0;
    std::vector<Verdict> verdicts;
    bool incomplete = false;

    std::optional<double> average_travel_time; // over finished vehicles
    long announcement_receivers = 0;           // unique vehicles that got an announcement
    long corrective_prejunction_deliveries = 0;

    long sent(MsgKind k) const {
        auto it = messages_sent.find(k);
        return it == messages_sent.end() ? 0 : it->second;
    }

    /// Trust-management traffic: everything except beacons and the
    /// announcements themselves.
    long trust_message_count() const {
        return sent(MsgKind::trust_query) + sent(MsgKind::trust_response) +
               sent(MsgKind::attack_report) + sent(MsgKind::corrective) +
               sent(MsgKind::trust_update);
    }

    std::optional<double> mean_decision_latency() const;
};

std::string to_string(Condition c);
std::optional<Condition> parse_condition(const std::string& s);

} // namespace vanetsim
