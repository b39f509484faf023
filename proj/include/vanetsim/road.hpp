#pragma once

#include "vanetsim/types.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace vanetsim {

struct RoadNode {
    NodeId id = -1;
    double x = 0.0;
    double y = 0.0;
};

struct RoadEdge {
    EdgeId id = -1;
    NodeId from = -1;
    NodeId to = -1;
    double length = 0.0;      // meters, > 0
    double speed_limit = 0.0; // m/s, > 0
};

/// Directed road network with named routes. The scenario graph always has
/// two routes, `primary` and `alternate`, sharing origin and destination,
/// diverging at a single junction node.
struct RoadGraph {
    std::vector<RoadNode> nodes;
    std::vector<RoadEdge> edges;
    std::map<std::string, std::vector<EdgeId>> routes;

    NodeId origin = -1;
    NodeId destination = -1;
    NodeId junction = -1;

    const RoadNode& node(NodeId id) const;
    const RoadEdge& edge(EdgeId id) const;
    const std::vector<EdgeId>& route(const std::string& name) const;
};

/// Position along a named route: which edge of the route, and how far
/// along that edge. Invariant: edge_index < route size, 0 <= offset <=
/// edge length.
struct RoutePosition {
    int edge_index = 0;
    double offset = 0.0;
};

/// Parameters of the two-route scenario network. Totals are
/// prefix + primary_branch (primary) and prefix + alternate_branch
/// (alternate); the alternate branch must be strictly longer.
struct GeometryParams {
    double prefix_length = 400.0;
    double primary_branch = 600.0;
    double alternate_branch = 1000.0;
    double speed_limit = 13.89;
};

/// Builds the two-route network: a shared prefix from the origin to the
/// junction, a straight primary branch, and a triangular alternate branch
/// whose two legs sum to alternate_branch. Edge lengths equal the
/// Euclidean node distances. Throws std::invalid_argument when the
/// alternate branch is not strictly longer than the primary branch.
RoadGraph build_reference_network(const GeometryParams& geom);

/// Sum of member edge lengths. Throws std::out_of_range for unknown routes.
double route_length(const RoadGraph& g, const std::string& route);

/// Congestion-free traversal time: sum over edges of length / speed_limit.
double free_flow_time(const RoadGraph& g, const std::string& route);

/// Structural checks: every edge references existing nodes, every route is
/// edge-contiguous, lengths and limits positive, and the primary/alternate
/// pair exists with shared endpoints and primary shorter. Violations are
/// returned as messages; an empty list means the graph is valid.
std::vector<std::string> validate(const RoadGraph& g);

/// Distance from the start of the route to the given position.
double route_offset(const RoadGraph& g, const std::string& route, const RoutePosition& pos);

/// Inverse of route_offset: the position at `offset` meters along the route.
RoutePosition position_at(const RoadGraph& g, const std::string& route, double offset);

/// World coordinates of a route position, interpolated linearly between
/// the edge's end nodes.
std::pair<double, double> world_position(const RoadGraph& g, const std::string& route,
                                         const RoutePosition& pos);

} // namespace vanetsim
