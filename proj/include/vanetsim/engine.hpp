#pragma once

#include "vanetsim/comms.hpp"
#include "vanetsim/mobility.hpp"
#include "vanetsim/rng.hpp"
#include "vanetsim/road.hpp"
#include "vanetsim/scenario.hpp"
#include "vanetsim/trust.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <variant>
#include <vector>

namespace vanetsim {

/// Fixed-step clock. `now` is steps * step, so it never drifts from the
/// step grid and never decreases.
class SimClock {
public:
    explicit SimClock(double step = 0.1) : step_(step) {}
    double now() const { return static_cast<double>(steps_) * step_; }
    double step_size() const { return step_; }
    std::int64_t steps() const { return steps_; }
    void advance() { ++steps_; }

private:
    double step_;
    std::int64_t steps_ = 0;
};

// Event payloads, one per event kind.
struct InsertVehicle { int vehicle_id = -1; };
struct HaltEnd { int vehicle_id = -1; };
struct Announce { int origin = -1; bool second = false; };
struct DeliverMessage { Message msg; EntityId receiver = -1; };
struct EvalTimer { int vehicle_id = -1; std::uint64_t msg_id = 0; };              // timer-expiry
struct AdjudicationTimeout { EntityId rsu_id = -1; std::uint64_t about_msg_id = 0; }; // timer-expiry

using EventPayload = std::variant<InsertVehicle, HaltEnd, Announce, DeliverMessage,
                                  EvalTimer, AdjudicationTimeout>;

struct SimEvent {
    double fire_at = 0.0;
    std::uint64_t sequence_id = 0;
    EventPayload payload;
};

/// Priority queue ordered by (fire_at, sequence_id). Equal fire times pop
/// in scheduling order.
class EventQueue {
public:
    /// Throws std::invalid_argument when fire_at predates `now` (a
    /// causality bug in the caller).
    void schedule(double fire_at, EventPayload payload, double now);

    /// Pops the next event with fire_at <= now, if any.
    std::optional<SimEvent> pop_due(double now);

    std::size_t size() const { return heap_.size(); }

private:
    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
            return a.sequence_id > b.sequence_id;
        }
    };
    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    std::uint64_t next_sequence_ = 0;
};

/// Insertion events for n vehicles at t = 0, gap, 2*gap, ... with vehicle
/// ids 0..n-1 (V0 first).
std::vector<SimEvent> insertion_schedule(int n, double gap);

struct NeighborInfo {
    double x = 0.0, y = 0.0;
    double heard_at = 0.0;
};

struct PendingEval {
    Message msg;
    double arrived_at = 0.0;
    std::vector<double> indirect;
    std::set<EntityId> responded;
    std::optional<double> rsu;
};

/// An accepted event claim awaiting on-location verification (sender-side
/// scheme only).
struct PendingClaim {
    std::uint64_t msg_id = 0;
    EventRecord record;
    EntityId origin = -1;
};

/// A vehicle plus its per-agent communication and trust state.
struct VehicleNode {
    Vehicle v;
    std::set<std::uint64_t> seen;
    std::map<EntityId, NeighborInfo> neighbors;
    std::map<EntityId, double> direct_evidence;
    std::map<std::uint64_t, PendingEval> evals;
    std::vector<PendingClaim> claims;
    std::optional<double> decision_latency;
    bool inserted_this_step = false;
};

struct RsuClaim {
    EventRecord record;
    EntityId origin = -1;
};

struct AdjudicationFile {
    EventRecord record;
    EntityId origin = -1;
    std::vector<std::pair<EntityId, Observation>> reports; // qualified, deduped
    bool timer_scheduled = false;
};

struct RsuNode {
    Rsu r;
    std::set<std::uint64_t> seen;
    std::map<std::uint64_t, RsuClaim> event_log;
    std::map<std::uint64_t, AdjudicationFile> open_adjudications;
};

/// Deterministic single-threaded simulation of one scenario. Step order:
/// due events, then mobility in ascending vehicle id, then the outbound
/// message flush (normal priority delivers next step, high priority the
/// same step). Independent Simulations share nothing and may run in
/// parallel.
class Simulation {
public:
    explicit Simulation(ScenarioConfig cfg);

    /// Runs the whole horizon and finalizes the report.
    MetricsReport run();

    void step();

    // Inspection (tests, diagnostics).
    const SimClock& clock() const { return clock_; }
    const RoadGraph& road() const { return graph_; }
    const std::vector<VehicleNode>& vehicles() const { return vehicles_; }
    std::vector<VehicleNode>& vehicles_mut() { return vehicles_; }
    const std::vector<RsuNode>& rsus() const { return rsus_; }
    TrustTable& trust_table() { return trust_table_; }
    const std::map<MsgKind, long>& sent_counts() const { return sent_counts_; }
    RngStream& rng() { return rng_; }
    const ScenarioConfig& config() const { return cfg_; }

    void schedule(double fire_at, EventPayload payload);

    /// Called after every step; used by tests for invariant sweeps.
    void set_step_observer(std::function<void(const Simulation&)> fn) {
        observer_ = std::move(fn);
    }

    /// Smallest follower-to-leader gap across all same-path consecutive
    /// pairs right now, if any pair exists. Negative means a collision.
    std::optional<double> min_headway_gap() const;

    double route_offset_of(const VehicleNode& n) const;

    MetricsReport finalize();

private:
    struct Outgoing {
        Message msg;
        double x = 0.0, y = 0.0;
        double range = 0.0;
    };

    void prime();
    void dispatch(const SimEvent& ev);
    void handle_insertion(const InsertVehicle& ins, double fire_at);
    void handle_announce(int origin, bool second);
    void on_delivery(const Message& m, EntityId receiver);
    void vehicle_on_message(VehicleNode& n, const Message& m);
    void rsu_on_message(RsuNode& rsu, const Message& m);
    void accept_announcement(VehicleNode& n, const Message& m, double latency);
    void start_receiver_evaluation(VehicleNode& n, const Message& m);
    void finish_receiver_evaluation(VehicleNode& n, std::uint64_t msg_id);
    void close_adjudication(RsuNode& rsu, std::uint64_t about, bool timed_out);
    void mobility_phase();
    void sensing_sweep();
    void comms_phase();
    void flush_outbox();
    void queue_send(Message m, double x, double y, double range);
    void relay_if_possible(const VehicleNode& n, const Message& m);
    std::optional<EntityId> nearest_rsu_in_range(double x, double y) const;
    std::pair<double, double> vehicle_world_pos(const VehicleNode& n) const;
    bool insertion_blocked() const;
    void check_halt_trigger(VehicleNode& n);

    // Leader pairing: index of the nearest vehicle ahead on each vehicle's
    // own path, recomputed each step from pre-move positions.
    std::vector<int> compute_leaders() const;
    std::optional<double> gap_to(const VehicleNode& follower, const VehicleNode& leader) const;

    ScenarioConfig cfg_;
    SimClock clock_;
    EventQueue queue_;
    RngStream rng_;
    RoadGraph graph_;
    std::vector<VehicleNode> vehicles_;
    std::vector<RsuNode> rsus_;
    TrustTable trust_table_;
    std::vector<Outgoing> outbox_;
    std::map<MsgKind, long> sent_counts_;
    std::uint64_t next_msg_id_ = 1;

    // Scenario wiring derived from the condition.
    bool halt_enabled_ = false;
    bool announce_enabled_ = false;
    bool announce_truthful_ = true;
    bool trigger_armed_ = false;
    double halt_route_offset_ = 0.0;
    EdgeId event_edge_ = -1;
    std::int64_t total_steps_ = 0;
    std::int64_t beacon_every_ = 10;

    // Metrics accumulation.
    long suppressed_ = 0;
    std::vector<Verdict> verdicts_;
    std::set<EntityId> announcement_receivers_;
    long corrective_prejunction_ = 0;
    std::set<std::uint64_t> adjudicated_; // shared across RSUs (the TA view)

    std::function<void(const Simulation&)> observer_;
    bool primed_ = false;
};

/// Convenience: validate, construct, run.
MetricsReport run(const ScenarioConfig& cfg);

} // namespace vanetsim
