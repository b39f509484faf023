#include "vanetsim/mobility.hpp"

#include <algorithm>
#include <stdexcept>

namespace vanetsim {

double follow_speed(double self_speed, double gap_to_leader, double leader_speed,
                    double limit, const FollowParams& p, double dt) {
    (void)leader_speed; // the safe-speed law bounds by gap alone
    if (gap_to_leader < 0) gap_to_leader = 0;

    const double v_safe = std::max(0.0, (gap_to_leader - p.min_gap) / p.headway);
    double v = std::min(limit, self_speed + p.max_accel * dt);
    // Comfortable braking first; the safety bound may override it (a
    // bounded-deceleration approach to a stopped leader cannot keep the
    // gap non-negative under this law).
    v = std::max(v, self_speed - p.max_decel * dt);
    v = std::min(v, std::max(0.0, v_safe));
    v = std::min(v, limit);
    return std::max(v, 0.0);
}

void advance(Vehicle& v, double dt, const RoadGraph& g, double now) {
    if (v.state != VehicleState::driving) {
        throw std::logic_error("advance: vehicle is not driving");
    }
    const auto& edges = g.route(v.route);
    double travel = v.speed * dt;
    while (travel > 0 || v.pos.offset >= g.edge(edges[static_cast<std::size_t>(v.pos.edge_index)]).length) {
        const auto& e = g.edge(edges[static_cast<std::size_t>(v.pos.edge_index)]);
        const double room = e.length - v.pos.offset;
        if (travel < room) {
            v.pos.offset += travel;
            travel = 0;
            break;
        }
        // Crossing the end node of this edge.
        travel -= room;
        if (e.to == g.junction) {
            v.passed_junction = true;
        }
        if (static_cast<std::size_t>(v.pos.edge_index) + 1 == edges.size()) {
            v.pos.offset = e.length;
            v.state = VehicleState::finished;
            v.finished_at = now;
            v.speed = 0;
            return;
        }
        v.pos.edge_index += 1;
        v.pos.offset = 0;
    }
}

std::optional<double> halt(Vehicle& v, double duration, double now) {
    if (v.state != VehicleState::driving) {
        throw std::logic_error("halt: vehicle is not driving");
    }
    if (duration < 0) {
        throw std::invalid_argument("halt: negative duration");
    }
    if (duration == 0) {
        return std::nullopt; // no-op on the trajectory
    }
    v.state = VehicleState::halted;
    v.speed = 0;
    return now + duration;
}

bool maybe_reroute(Vehicle& v, const RoadGraph& g) {
    if (v.passed_junction || v.route != "primary") {
        return false;
    }
    // The shared prefix is the common leading edge list of both routes, so
    // the (edge_index, offset) position stays valid after the switch.
    (void)g.route("alternate");
    v.route = "alternate";
    v.rerouted = true;
    return true;
}

} // namespace vanetsim
