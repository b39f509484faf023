#pragma once

#include "vanetsim/road.hpp"
#include "vanetsim/types.hpp"

#include <optional>
#include <string>

namespace vanetsim {

enum class VehicleRole { regular, official, malicious_capable };

enum class VehicleState { queued_for_insertion, driving, halted, finished };

/// Car-following parameters. All strictly positive.
struct FollowParams {
    double max_accel = 2.6; // m/s^2
    double max_decel = 4.5; // m/s^2, comfortable braking bound
    double headway = 1.0;   // s
    double min_gap = 2.5;   // m
};

struct Vehicle {
    int id = -1;
    VehicleRole role = VehicleRole::regular;
    std::string route = "primary";
    RoutePosition pos;
    double speed = 0.0;
    VehicleState state = VehicleState::queued_for_insertion;
    double inserted_at = -1.0;
    std::optional<double> finished_at;
    bool passed_junction = false;
    bool rerouted = false;
};

/// Safe-speed car-following law:
///   v_safe = max(0, (gap - min_gap) / headway)
///   v_next = min(limit, self + max_accel*dt, v_safe), floored at
///            self - max_decel*dt except where v_safe demands harder
///            braking (collision avoidance overrides the comfort bound).
/// The law ignores leader_speed by construction; a follower's speed is
/// bounded by the gap alone, which keeps gap >= min_gap invariant for
/// any leader trajectory. Pass gap_to_leader = +infinity for free flow.
double follow_speed(double self_speed, double gap_to_leader, double leader_speed,
                    double limit, const FollowParams& p, double dt);

/// Moves a driving vehicle speed*dt along its route, rolling over edge
/// boundaries. Sets passed_junction when the junction node is crossed and
/// finishes the vehicle (finished_at = now) at the destination.
void advance(Vehicle& v, double dt, const RoadGraph& g, double now);

/// Halts a driving vehicle (speed 0) and returns the resume time to be
/// scheduled as a halt-end event. duration == 0 is a no-op. Throws
/// std::logic_error when the vehicle is not driving.
std::optional<double> halt(Vehicle& v, double duration, double now);

/// Applies an accepted diversion: vehicles on the primary route that have
/// not passed the junction switch to the alternate route in place (the
/// position is on the shared prefix, which both routes begin with).
/// Returns true when the route changed. Idempotent otherwise.
bool maybe_reroute(Vehicle& v, const RoadGraph& g);

} // namespace vanetsim
