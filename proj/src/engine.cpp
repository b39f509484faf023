#include "vanetsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <type_traits>

namespace vanetsim {

namespace {
constexpr double kTimeEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

// --- event queue -------------------------------------------------------

void EventQueue::schedule(double fire_at, EventPayload payload, double now) {
    if (fire_at < now - kTimeEps) {
        throw std::invalid_argument("EventQueue::schedule: fire_at precedes the clock "
                                    "(causality bug)");
    }
    heap_.push(SimEvent{fire_at, next_sequence_++, std::move(payload)});
}

std::optional<SimEvent> EventQueue::pop_due(double now) {
    if (heap_.empty() || heap_.top().fire_at > now + kTimeEps) {
        return std::nullopt;
    }
    SimEvent ev = heap_.top();
    heap_.pop();
    return ev;
}

std::vector<SimEvent> insertion_schedule(int n, double gap) {
    if (n < 0) throw std::invalid_argument("insertion_schedule: n must be >= 0");
    if (gap <= 0) throw std::invalid_argument("insertion_schedule: gap must be > 0");
    std::vector<SimEvent> events;
    events.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        events.push_back(SimEvent{static_cast<double>(i) * gap,
                                  static_cast<std::uint64_t>(i), InsertVehicle{i}});
    }
    return events;
}

// --- construction ------------------------------------------------------

Simulation::Simulation(ScenarioConfig cfg)
    : cfg_(std::move(cfg)),
      clock_(cfg_.step),
      rng_(cfg_.seed),
      graph_(build_reference_network(cfg_.geometry)),
      trust_table_(cfg_.trust.initial_trust) {
    total_steps_ = static_cast<std::int64_t>(std::llround(cfg_.duration / cfg_.step));
    beacon_every_ = std::max<std::int64_t>(1, std::llround(cfg_.beacon_period / cfg_.step));

    halt_enabled_ = cfg_.condition == Condition::unannounced_event ||
                    cfg_.condition == Condition::trustworthy_announcement;
    announce_enabled_ = cfg_.condition == Condition::false_announcement ||
                        cfg_.condition == Condition::trustworthy_announcement;
    announce_truthful_ = cfg_.condition != Condition::false_announcement;
    trigger_armed_ = halt_enabled_ || announce_enabled_;

    halt_route_offset_ = cfg_.geometry.prefix_length + cfg_.halt_offset;
    const RoutePosition halt_pos = position_at(graph_, "primary", halt_route_offset_);
    event_edge_ = graph_.route("primary")[static_cast<std::size_t>(halt_pos.edge_index)];
    const auto [ex, ey] = world_position(graph_, "primary", halt_pos);
    const auto& junction = graph_.node(graph_.junction);

    RsuNode a;
    a.r = Rsu{kRsuIdBase, cfg_.rsu_a_x.value_or(junction.x), cfg_.rsu_a_y.value_or(junction.y),
              cfg_.rsu_range};
    RsuNode b;
    b.r = Rsu{kRsuIdBase + 1, cfg_.rsu_b_x.value_or(ex), cfg_.rsu_b_y.value_or(ey),
              cfg_.rsu_range};
    rsus_ = {a, b};

    vehicles_.resize(static_cast<std::size_t>(cfg_.n_vehicles));
    for (int i = 0; i < cfg_.n_vehicles; ++i) {
        auto& n = vehicles_[static_cast<std::size_t>(i)];
        n.v.id = i;
        n.v.role = (i == 0 && cfg_.condition == Condition::false_announcement)
                       ? VehicleRole::malicious_capable
                       : VehicleRole::regular;
    }

    for (auto k : {MsgKind::beacon, MsgKind::event_announcement, MsgKind::diversion,
                   MsgKind::trust_query, MsgKind::trust_response, MsgKind::attack_report,
                   MsgKind::corrective, MsgKind::trust_update}) {
        sent_counts_[k] = 0;
    }
}

void Simulation::schedule(double fire_at, EventPayload payload) {
    queue_.schedule(fire_at, std::move(payload), clock_.now());
}

void Simulation::prime() {
    if (primed_) return;
    primed_ = true;
    for (auto& ev : insertion_schedule(cfg_.n_vehicles, cfg_.insertion_gap)) {
        queue_.schedule(ev.fire_at, ev.payload, 0.0);
    }
    if (cfg_.second_announcement_at > 0 && announce_enabled_) {
        queue_.schedule(cfg_.second_announcement_at, Announce{0, true}, 0.0);
    }
    // Events due at t = 0 (the first insertion) fire before the first step
    // so vehicle 0 is on the road from the start.
    while (auto ev = queue_.pop_due(0.0)) {
        dispatch(*ev);
    }
    for (auto& n : vehicles_) {
        n.inserted_this_step = false;
    }
    flush_outbox();
}

MetricsReport Simulation::run() {
    prime();
    while (clock_.steps() < total_steps_) {
        step();
    }
    return finalize();
}

// --- step phases ---------------------------------------------------------

void Simulation::step() {
    prime();
    clock_.advance();
    const double now = clock_.now();

    while (auto ev = queue_.pop_due(now)) {
        dispatch(*ev);
    }

    mobility_phase();
    sensing_sweep();
    comms_phase();

    if (observer_) observer_(*this);
}

void Simulation::dispatch(const SimEvent& ev) {
    std::visit(
        [&](const auto& payload) {
            using T = std::decay_t<decltype(payload)>;
            if constexpr (std::is_same_v<T, InsertVehicle>) {
                handle_insertion(payload, ev.fire_at);
            } else if constexpr (std::is_same_v<T, HaltEnd>) {
                auto& n = vehicles_.at(static_cast<std::size_t>(payload.vehicle_id));
                if (n.v.state == VehicleState::halted) {
                    n.v.state = VehicleState::driving;
                }
            } else if constexpr (std::is_same_v<T, Announce>) {
                handle_announce(payload.origin, payload.second);
            } else if constexpr (std::is_same_v<T, DeliverMessage>) {
                on_delivery(payload.msg, payload.receiver);
            } else if constexpr (std::is_same_v<T, EvalTimer>) {
                auto& n = vehicles_.at(static_cast<std::size_t>(payload.vehicle_id));
                finish_receiver_evaluation(n, payload.msg_id);
            } else if constexpr (std::is_same_v<T, AdjudicationTimeout>) {
                for (auto& rsu : rsus_) {
                    if (rsu.r.id == payload.rsu_id) {
                        close_adjudication(rsu, payload.about_msg_id, true);
                    }
                }
            }
        },
        ev.payload);
}

bool Simulation::insertion_blocked() const {
    for (const auto& n : vehicles_) {
        if (n.v.state != VehicleState::driving && n.v.state != VehicleState::halted) continue;
        if (n.v.pos.edge_index == 0 && n.v.pos.offset <= cfg_.follow.min_gap) {
            return true;
        }
    }
    return false;
}

void Simulation::handle_insertion(const InsertVehicle& ins, double fire_at) {
    (void)fire_at;
    auto& n = vehicles_.at(static_cast<std::size_t>(ins.vehicle_id));
    // Keep insertion order: a deferred lower id must enter first.
    bool predecessor_waiting = false;
    for (int i = 0; i < ins.vehicle_id; ++i) {
        if (vehicles_[static_cast<std::size_t>(i)].v.state == VehicleState::queued_for_insertion) {
            predecessor_waiting = true;
        }
    }
    if (predecessor_waiting || insertion_blocked()) {
        queue_.schedule(clock_.now() + cfg_.step, InsertVehicle{ins.vehicle_id}, clock_.now());
        return;
    }
    n.v.state = VehicleState::driving;
    n.v.route = "primary";
    n.v.pos = RoutePosition{0, 0.0};
    n.v.speed = graph_.edge(graph_.route("primary")[0]).speed_limit;
    n.v.inserted_at = clock_.now();
    n.inserted_this_step = true;
}

void Simulation::handle_announce(int origin, bool second) {
    auto& n = vehicles_.at(static_cast<std::size_t>(origin));
    if (n.v.state != VehicleState::driving && n.v.state != VehicleState::halted) {
        return; // announcer already finished (or never inserted)
    }
    if (cfg_.trust.scheme == Scheme::sender_side) {
        const TrustState& ts = trust_table_.state(n.v.id);
        if (!gate_announcement(ts, cfg_.trust)) {
            ++suppressed_;
            return;
        }
    }
    EventRecord rec;
    rec.kind = EventKind::diversion;
    rec.location = event_edge_;
    rec.reported_at = clock_.now();
    rec.ground_truth = announce_truthful_;
    (void)second;

    Message m;
    m.msg_id = next_msg_id_++;
    m.kind = MsgKind::diversion;
    m.origin_id = n.v.id;
    m.sender_id = n.v.id;
    m.event = rec;
    m.hops_remaining = cfg_.hop_budget;
    m.priority = n.v.role == VehicleRole::official ? MsgPriority::high : MsgPriority::normal;
    m.sent_at = clock_.now();

    n.seen.insert(m.msg_id);
    const auto [x, y] = vehicle_world_pos(n);
    queue_send(std::move(m), x, y, cfg_.radio_range);
}

void Simulation::mobility_phase() {
    const std::vector<int> leaders = compute_leaders();
    const double now = clock_.now();
    for (auto& n : vehicles_) {
        if (n.v.state != VehicleState::driving || n.inserted_this_step) continue;
        double gap = kInf;
        double leader_speed = 0.0;
        const int li = leaders[static_cast<std::size_t>(n.v.id)];
        if (li >= 0) {
            const auto& leader = vehicles_[static_cast<std::size_t>(li)];
            if (auto g = gap_to(n, leader)) {
                gap = *g;
                leader_speed = leader.v.speed;
            }
        }
        const auto& edges = graph_.route(n.v.route);
        const double limit =
            graph_.edge(edges[static_cast<std::size_t>(n.v.pos.edge_index)]).speed_limit;
        n.v.speed = follow_speed(n.v.speed, gap, leader_speed, limit, cfg_.follow, cfg_.step);
        advance(n.v, cfg_.step, graph_, now);
        check_halt_trigger(n);
    }
    for (auto& n : vehicles_) {
        n.inserted_this_step = false;
    }
}

void Simulation::check_halt_trigger(VehicleNode& n) {
    if (!trigger_armed_ || n.v.id != 0) return;
    if (n.v.state != VehicleState::driving || n.v.route != "primary") return;
    if (route_offset(graph_, n.v.route, n.v.pos) + kTimeEps < halt_route_offset_) return;

    trigger_armed_ = false;
    const double now = clock_.now();
    if (halt_enabled_) {
        n.v.pos = position_at(graph_, "primary", halt_route_offset_); // stop at the blockage
        if (auto resume_at = halt(n.v, cfg_.halt_duration, now)) {
            queue_.schedule(*resume_at, HaltEnd{0}, now);
        }
    }
    if (announce_enabled_) {
        const double offset =
            cfg_.condition == Condition::trustworthy_announcement ? cfg_.announce_offset : 0.0;
        if (offset <= kTimeEps) {
            handle_announce(0, false);
        } else {
            queue_.schedule(now + offset, Announce{0, false}, now);
        }
    }
}

void Simulation::sensing_sweep() {
    if (cfg_.trust.scheme != Scheme::sender_side) return;
    for (auto& n : vehicles_) {
        if (n.v.state != VehicleState::driving && n.v.state != VehicleState::halted) continue;
        if (n.claims.empty()) continue;
        const auto& edges = graph_.route(n.v.route);
        const EdgeId here = edges[static_cast<std::size_t>(n.v.pos.edge_index)];
        for (auto it = n.claims.begin(); it != n.claims.end();) {
            if (it->record.location != here) {
                ++it;
                continue;
            }
            const Observation obs = sense_ground_truth(it->record);
            const bool claim_asserts_presence = it->record.kind != EventKind::resolution;
            const bool contradiction = claim_asserts_presence == (obs == Observation::absent);
            if (contradiction) {
                const auto [x, y] = vehicle_world_pos(n);
                if (auto rsu = nearest_rsu_in_range(x, y)) {
                    Message rep;
                    rep.msg_id = next_msg_id_++;
                    rep.kind = MsgKind::attack_report;
                    rep.origin_id = n.v.id;
                    rep.sender_id = n.v.id;
                    rep.event = it->record;
                    rep.sent_at = clock_.now();
                    rep.addressee = *rsu;
                    rep.subject = it->origin;
                    rep.about_msg_id = it->msg_id;
                    rep.observation = obs;
                    queue_send(std::move(rep), x, y, cfg_.radio_range);
                } // no RSU reachable: keep the claim and retry next step
                else {
                    ++it;
                    continue;
                }
            }
            it = n.claims.erase(it); // verified or reported: done with this claim
        }
    }
}

void Simulation::comms_phase() {
    if (clock_.steps() % beacon_every_ == 0) {
        for (auto& n : vehicles_) {
            if (n.v.state != VehicleState::driving && n.v.state != VehicleState::halted) continue;
            const auto [x, y] = vehicle_world_pos(n);
            queue_send(make_beacon(next_msg_id_++, n.v.id, x, y, n.v.speed, clock_.now()), x, y,
                       cfg_.radio_range);
        }
    }
    flush_outbox();
}

void Simulation::queue_send(Message m, double x, double y, double range) {
    ++sent_counts_[m.kind];
    outbox_.push_back(Outgoing{std::move(m), x, y, range});
}

void Simulation::flush_outbox() {
    const double now = clock_.now();
    // High-priority deliveries run inside the flush and may queue more
    // messages; keep draining until the outbox stays empty.
    while (!outbox_.empty()) {
        std::vector<Outgoing> batch;
        batch.swap(outbox_);
        for (const auto& out : batch) {
            std::vector<EntityId> recipients;
            for (const auto& n : vehicles_) {
                if (n.v.state != VehicleState::driving && n.v.state != VehicleState::halted)
                    continue;
                if (n.v.id == out.msg.sender_id) continue;
                const auto [x, y] = vehicle_world_pos(n);
                if (in_range(out.x, out.y, x, y, out.range)) {
                    recipients.push_back(n.v.id);
                }
            }
            for (const auto& rsu : rsus_) {
                if (rsu.r.id == out.msg.sender_id) continue;
                if (in_range(out.x, out.y, rsu.r.x, rsu.r.y, out.range)) {
                    recipients.push_back(rsu.r.id);
                }
            }
            std::sort(recipients.begin(), recipients.end());
            for (EntityId rcpt : recipients) {
                if (out.msg.addressee && *out.msg.addressee != rcpt) continue;
                if (out.msg.priority == MsgPriority::high) {
                    on_delivery(out.msg, rcpt);
                } else {
                    queue_.schedule(now + cfg_.step, DeliverMessage{out.msg, rcpt}, now);
                }
            }
        }
    }
}

// --- message handling ------------------------------------------------------

void Simulation::on_delivery(const Message& m, EntityId receiver) {
    if (is_rsu_id(receiver)) {
        for (auto& rsu : rsus_) {
            if (rsu.r.id == receiver) {
                rsu_on_message(rsu, m);
            }
        }
        return;
    }
    auto& n = vehicles_.at(static_cast<std::size_t>(receiver));
    if (n.v.state != VehicleState::driving && n.v.state != VehicleState::halted) {
        return; // off the road: no reception
    }
    vehicle_on_message(n, m);
}

void Simulation::vehicle_on_message(VehicleNode& n, const Message& m) {
    if (m.kind == MsgKind::beacon) {
        n.neighbors[m.origin_id] = NeighborInfo{m.pos_x, m.pos_y, clock_.now()};
        return;
    }
    if (!n.seen.insert(m.msg_id).second) {
        return; // duplicate: processed at most once per receiver
    }

    switch (m.kind) {
        case MsgKind::diversion:
        case MsgKind::event_announcement: {
            announcement_receivers_.insert(n.v.id);
            if (cfg_.trust.scheme == Scheme::receiver_side) {
                start_receiver_evaluation(n, m);
            } else {
                accept_announcement(n, m, 0.0); // believed immediately
            }
            break;
        }
        case MsgKind::trust_query: {
            Message resp;
            resp.msg_id = next_msg_id_++;
            resp.kind = MsgKind::trust_response;
            resp.origin_id = n.v.id;
            resp.sender_id = n.v.id;
            resp.sent_at = clock_.now();
            resp.addressee = m.sender_id;
            resp.subject = m.subject;
            resp.about_msg_id = m.about_msg_id;
            auto it = n.direct_evidence.find(m.subject);
            resp.trust_value = it == n.direct_evidence.end() ? 0.5 : it->second; // neutral prior
            const auto [x, y] = vehicle_world_pos(n);
            queue_send(std::move(resp), x, y, cfg_.radio_range);
            break;
        }
        case MsgKind::trust_response: {
            auto it = n.evals.find(m.about_msg_id);
            if (it == n.evals.end()) break; // late responses are discarded
            auto& eval = it->second;
            if (is_rsu_id(m.sender_id)) {
                if (!eval.rsu) eval.rsu = m.trust_value;
            } else if (eval.responded.insert(m.sender_id).second) {
                eval.indirect.push_back(m.trust_value);
            }
            break;
        }
        case MsgKind::corrective: {
            if (!n.v.passed_junction) {
                ++corrective_prejunction_;
            }
            std::erase_if(n.claims,
                          [&](const PendingClaim& c) { return c.msg_id == m.about_msg_id; });
            n.evals.erase(m.about_msg_id);
            relay_if_possible(n, m);
            break;
        }
        case MsgKind::trust_update: {
            n.direct_evidence[m.subject] = m.trust_value;
            break;
        }
        case MsgKind::attack_report:
        case MsgKind::beacon:
            break;
    }
}

void Simulation::accept_announcement(VehicleNode& n, const Message& m, double latency) {
    if (!n.decision_latency) {
        n.decision_latency = latency;
    }
    if (m.kind == MsgKind::diversion) {
        maybe_reroute(n.v, graph_);
    }
    if (cfg_.trust.scheme == Scheme::sender_side && m.event && m.origin_id != n.v.id) {
        n.claims.push_back(PendingClaim{m.msg_id, *m.event, m.origin_id});
    }
    relay_if_possible(n, m);
}

void Simulation::start_receiver_evaluation(VehicleNode& n, const Message& m) {
    PendingEval eval;
    eval.msg = m;
    eval.arrived_at = clock_.now();
    n.evals.emplace(m.msg_id, std::move(eval));

    const auto [x, y] = vehicle_world_pos(n);
    const double freshness = 2.0 * cfg_.beacon_period + kTimeEps;
    std::vector<EntityId> targets;
    for (const auto& [id, info] : n.neighbors) {
        if (id == m.origin_id) continue; // the evaluated sender is not a recommender
        if (clock_.now() - info.heard_at > freshness) continue;
        if (!in_range(x, y, info.x, info.y, cfg_.radio_range)) continue;
        targets.push_back(id);
    }
    if (auto rsu = nearest_rsu_in_range(x, y)) {
        targets.push_back(*rsu);
    }
    for (EntityId target : targets) {
        Message q;
        q.msg_id = next_msg_id_++;
        q.kind = MsgKind::trust_query;
        q.origin_id = n.v.id;
        q.sender_id = n.v.id;
        q.sent_at = clock_.now();
        q.addressee = target;
        q.subject = m.origin_id;
        q.about_msg_id = m.msg_id;
        queue_send(std::move(q), x, y, cfg_.radio_range);
    }
    queue_.schedule(clock_.now() + cfg_.trust.eval_timer, EvalTimer{n.v.id, m.msg_id},
                    clock_.now());
}

void Simulation::finish_receiver_evaluation(VehicleNode& n, std::uint64_t msg_id) {
    auto it = n.evals.find(msg_id);
    if (it == n.evals.end()) return; // cancelled (e.g. by a corrective)
    if (n.v.state != VehicleState::driving && n.v.state != VehicleState::halted) {
        n.evals.erase(it);
        return; // finished while evaluating
    }
    PendingEval eval = std::move(it->second);
    n.evals.erase(it);

    std::optional<double> direct;
    auto de = n.direct_evidence.find(eval.msg.origin_id);
    if (de != n.direct_evidence.end()) direct = de->second;

    const auto trust = aggregate_trust(direct, eval.indirect, eval.rsu, cfg_.trust);
    const bool accept = trust && *trust >= cfg_.trust.accept_threshold;
    if (accept) {
        accept_announcement(n, eval.msg, cfg_.trust.eval_timer);
    }
}

void Simulation::relay_if_possible(const VehicleNode& n, const Message& m) {
    if (auto copy = make_relay(m, n.v.id)) {
        const auto [x, y] = vehicle_world_pos(n);
        queue_send(std::move(*copy), x, y, cfg_.radio_range);
    }
}

void Simulation::rsu_on_message(RsuNode& rsu, const Message& m) {
    if (m.kind == MsgKind::beacon) return;
    if (!rsu.seen.insert(m.msg_id).second) return;

    switch (m.kind) {
        case MsgKind::diversion:
        case MsgKind::event_announcement: {
            if (m.event) {
                rsu.event_log.emplace(m.msg_id, RsuClaim{*m.event, m.origin_id});
            }
            break;
        }
        case MsgKind::trust_query: {
            Message resp;
            resp.msg_id = next_msg_id_++;
            resp.kind = MsgKind::trust_response;
            resp.origin_id = rsu.r.id;
            resp.sender_id = rsu.r.id;
            resp.sent_at = clock_.now();
            resp.addressee = m.sender_id;
            resp.subject = m.subject;
            resp.about_msg_id = m.about_msg_id;
            resp.trust_value = trust_table_.score(m.subject);
            queue_send(std::move(resp), rsu.r.x, rsu.r.y, rsu.r.range);
            break;
        }
        case MsgKind::attack_report: {
            if (!m.observation || adjudicated_.count(m.about_msg_id)) break;
            // Feedback only counts from trusted vehicles at the location;
            // filing already implies the reporter was on the claimed edge.
            if (trust_table_.score(m.origin_id) < cfg_.trust.accept_threshold) break;
            auto& file = rsu.open_adjudications[m.about_msg_id];
            if (file.reports.empty()) {
                file.record = m.event.value_or(EventRecord{});
                auto logged = rsu.event_log.find(m.about_msg_id);
                file.origin = logged != rsu.event_log.end() ? logged->second.origin : m.subject;
            }
            bool duplicate = false;
            for (const auto& [reporter, obs] : file.reports) {
                if (reporter == m.origin_id) duplicate = true;
            }
            if (duplicate) break;
            file.reports.emplace_back(m.origin_id, *m.observation);
            if (!file.timer_scheduled) {
                file.timer_scheduled = true;
                queue_.schedule(clock_.now() + cfg_.trust.adjudication_timeout,
                                AdjudicationTimeout{rsu.r.id, m.about_msg_id}, clock_.now());
            }
            if (static_cast<int>(file.reports.size()) >= cfg_.trust.quorum) {
                close_adjudication(rsu, m.about_msg_id, false);
            }
            break;
        }
        default:
            break;
    }
}

void Simulation::close_adjudication(RsuNode& rsu, std::uint64_t about, bool timed_out) {
    auto it = rsu.open_adjudications.find(about);
    if (it == rsu.open_adjudications.end()) return;
    if (adjudicated_.count(about)) {
        rsu.open_adjudications.erase(it);
        return;
    }
    AdjudicationFile file = std::move(it->second);
    rsu.open_adjudications.erase(it);
    (void)timed_out;

    std::vector<Observation> observations;
    observations.reserve(file.reports.size());
    for (const auto& [reporter, obs] : file.reports) {
        observations.push_back(obs);
    }
    const Verdict verdict =
        adjudicate(file.record, file.origin, observations, cfg_.trust.quorum, clock_.now());
    adjudicated_.insert(about);
    verdicts_.push_back(verdict);

    if (verdict.outcome == VerdictOutcome::inconclusive) return;

    // Severity by claim class: events that divert traffic weigh heaviest.
    const Severity severity =
        file.record.kind == EventKind::resolution ? Severity::low : Severity::high;
    apply_reward_punishment(trust_table_.state(file.origin), verdict.outcome, severity,
                            verdict.confidence, cfg_.trust);

    if (verdict.outcome == VerdictOutcome::refuted) {
        Message corr;
        corr.msg_id = next_msg_id_++;
        corr.kind = MsgKind::corrective;
        corr.origin_id = rsu.r.id;
        corr.sender_id = rsu.r.id;
        corr.event = file.record;
        corr.hops_remaining = cfg_.hop_budget;
        corr.sent_at = clock_.now();
        corr.about_msg_id = about;
        queue_send(std::move(corr), rsu.r.x, rsu.r.y, rsu.r.range);
    }
}

// --- geometry helpers -------------------------------------------------------

std::pair<double, double> Simulation::vehicle_world_pos(const VehicleNode& n) const {
    return world_position(graph_, n.v.route, n.v.pos);
}

double Simulation::route_offset_of(const VehicleNode& n) const {
    return route_offset(graph_, n.v.route, n.v.pos);
}

std::optional<EntityId> Simulation::nearest_rsu_in_range(double x, double y) const {
    std::optional<EntityId> best;
    double best_dist = kInf;
    for (const auto& rsu : rsus_) {
        const double dx = rsu.r.x - x;
        const double dy = rsu.r.y - y;
        const double d = std::sqrt(dx * dx + dy * dy);
        if (d <= cfg_.radio_range && d < best_dist) {
            best_dist = d;
            best = rsu.r.id;
        }
    }
    return best;
}

std::vector<int> Simulation::compute_leaders() const {
    std::vector<int> leaders(vehicles_.size(), -1);
    for (const auto& [route_name, edge_ids] : graph_.routes) {
        std::map<EdgeId, std::pair<int, double>> edge_pos; // edge -> (index, start offset)
        double start = 0.0;
        for (std::size_t i = 0; i < edge_ids.size(); ++i) {
            edge_pos[edge_ids[i]] = {static_cast<int>(i), start};
            start += graph_.edge(edge_ids[i]).length;
        }
        std::vector<std::pair<double, int>> on_route; // (offset along this route, vehicle)
        for (const auto& n : vehicles_) {
            if (n.v.state != VehicleState::driving && n.v.state != VehicleState::halted) continue;
            const EdgeId here =
                graph_.route(n.v.route)[static_cast<std::size_t>(n.v.pos.edge_index)];
            auto it = edge_pos.find(here);
            if (it == edge_pos.end()) continue;
            on_route.emplace_back(it->second.second + n.v.pos.offset, n.v.id);
        }
        std::sort(on_route.begin(), on_route.end());
        for (std::size_t i = 0; i + 1 < on_route.size(); ++i) {
            const int follower = on_route[i].second;
            if (vehicles_[static_cast<std::size_t>(follower)].v.route == route_name) {
                leaders[static_cast<std::size_t>(follower)] = on_route[i + 1].second;
            }
        }
    }
    return leaders;
}

std::optional<double> Simulation::gap_to(const VehicleNode& follower,
                                         const VehicleNode& leader) const {
    if (leader.v.state != VehicleState::driving && leader.v.state != VehicleState::halted) {
        return std::nullopt; // leader left the road this step
    }
    const auto& edges = graph_.route(follower.v.route);
    const EdgeId leader_edge =
        graph_.route(leader.v.route)[static_cast<std::size_t>(leader.v.pos.edge_index)];
    double start = 0.0;
    std::optional<double> leader_offset;
    for (const auto id : edges) {
        if (id == leader_edge) {
            leader_offset = start + leader.v.pos.offset;
            break;
        }
        start += graph_.edge(id).length;
    }
    if (!leader_offset) {
        return std::nullopt; // leader diverged onto the other branch
    }
    const double gap = *leader_offset - route_offset_of(follower);
    if (gap <= 0) return std::nullopt;
    return gap;
}

std::optional<double> Simulation::min_headway_gap() const {
    const auto leaders = compute_leaders();
    std::optional<double> best;
    for (const auto& n : vehicles_) {
        if (n.v.state != VehicleState::driving && n.v.state != VehicleState::halted) continue;
        const int li = leaders[static_cast<std::size_t>(n.v.id)];
        if (li < 0) continue;
        const auto& leader = vehicles_[static_cast<std::size_t>(li)];
        if (leader.v.state != VehicleState::driving && leader.v.state != VehicleState::halted)
            continue;
        // Raw signed gap, collisions included.
        const auto& edges = graph_.route(n.v.route);
        const EdgeId leader_edge =
            graph_.route(leader.v.route)[static_cast<std::size_t>(leader.v.pos.edge_index)];
        double start = 0.0;
        std::optional<double> leader_offset;
        for (const auto id : edges) {
            if (id == leader_edge) {
                leader_offset = start + leader.v.pos.offset;
                break;
            }
            start += graph_.edge(id).length;
        }
        if (!leader_offset) continue;
        const double gap = *leader_offset - route_offset_of(n);
        if (!best || gap < *best) best = gap;
    }
    return best;
}

// --- finalize ----------------------------------------------------------------

MetricsReport Simulation::finalize() {
    MetricsReport report;
    report.messages_sent = sent_counts_;
    report.suppressed_announcements = suppressed_;
    report.verdicts = verdicts_;
    report.announcement_receivers = static_cast<long>(announcement_receivers_.size());
    report.corrective_prejunction_deliveries = corrective_prejunction_;

    double total = 0.0;
    long finished = 0;
    for (const auto& n : vehicles_) {
        if (n.v.state == VehicleState::queued_for_insertion && n.v.inserted_at < 0) {
            report.incomplete = true; // scheduled but never entered
            continue;
        }
        VehicleMetrics vm;
        vm.id = n.v.id;
        vm.inserted_at = n.v.inserted_at;
        vm.finished_at = n.v.finished_at;
        vm.route = n.v.route;
        vm.decision_latency = n.decision_latency;
        if (n.v.finished_at) {
            total += *n.v.finished_at - n.v.inserted_at;
            ++finished;
        } else {
            report.incomplete = true;
        }
        report.vehicles.push_back(std::move(vm));
    }
    if (finished > 0) {
        report.average_travel_time = total / static_cast<double>(finished);
    }
    return report;
}

MetricsReport run(const ScenarioConfig& cfg) {
    Simulation sim(cfg);
    return sim.run();
}

std::optional<double> MetricsReport::mean_decision_latency() const {
    double total = 0.0;
    long count = 0;
    for (const auto& v : vehicles) {
        if (v.decision_latency) {
            total += *v.decision_latency;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return total / static_cast<double>(count);
}

} // namespace vanetsim
