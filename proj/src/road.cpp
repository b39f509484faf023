#include "vanetsim/road.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vanetsim {

const RoadNode& RoadGraph::node(NodeId id) const {
    for (const auto& n : nodes) {
        if (n.id == id) return n;
    }
    throw std::out_of_range("RoadGraph: unknown node id " + std::to_string(id));
}

const RoadEdge& RoadGraph::edge(EdgeId id) const {
    for (const auto& e : edges) {
        if (e.id == id) return e;
    }
    throw std::out_of_range("RoadGraph: unknown edge id " + std::to_string(id));
}

const std::vector<EdgeId>& RoadGraph::route(const std::string& name) const {
    auto it = routes.find(name);
    if (it == routes.end()) {
        throw std::out_of_range("RoadGraph: unknown route '" + name + "'");
    }
    return it->second;
}

RoadGraph build_reference_network(const GeometryParams& geom) {
    if (geom.prefix_length <= 0 || geom.primary_branch <= 0 || geom.alternate_branch <= 0) {
        throw std::invalid_argument("geometry: all segment lengths must be > 0");
    }
    if (geom.speed_limit <= 0) {
        throw std::invalid_argument("geometry: speed_limit must be > 0");
    }
    if (geom.alternate_branch <= geom.primary_branch) {
        throw std::invalid_argument("geometry: alternate_branch must exceed primary_branch "
                                    "(the detour must cost time)");
    }

    const double p = geom.prefix_length;
    const double b1 = geom.primary_branch;
    const double b2 = geom.alternate_branch;
    // Alternate branch as two equal legs over a midpoint lifted off the
    // road axis; leg length b2/2 with chord b1 gives the midpoint height.
    const double leg = b2 / 2.0;
    const double half_chord = b1 / 2.0;
    const double h = std::sqrt(leg * leg - half_chord * half_chord);

    RoadGraph g;
    g.nodes = {
        {0, 0.0, 0.0},            // origin
        {1, p, 0.0},              // junction
        {2, p + b1, 0.0},         // destination
        {3, p + half_chord, h},   // alternate midpoint
    };
    g.edges = {
        {0, 0, 1, p, geom.speed_limit},
        {1, 1, 2, b1, geom.speed_limit},
        {2, 1, 3, leg, geom.speed_limit},
        {3, 3, 2, leg, geom.speed_limit},
    };
    g.routes["primary"] = {0, 1};
    g.routes["alternate"] = {0, 2, 3};
    g.origin = 0;
    g.destination = 2;
    g.junction = 1;
    return g;
}

double route_length(const RoadGraph& g, const std::string& route) {
    double total = 0.0;
    for (EdgeId id : g.route(route)) {
        total += g.edge(id).length;
    }
    return total;
}

double free_flow_time(const RoadGraph& g, const std::string& route) {
    double total = 0.0;
    for (EdgeId id : g.route(route)) {
        const auto& e = g.edge(id);
        total += e.length / e.speed_limit;
    }
    return total;
}

std::vector<std::string> validate(const RoadGraph& g) {
    std::vector<std::string> violations;
    auto has_node = [&](NodeId id) {
        for (const auto& n : g.nodes) {
            if (n.id == id) return true;
        }
        return false;
    };

    for (const auto& e : g.edges) {
        std::ostringstream os;
        if (!has_node(e.from) || !has_node(e.to)) {
            os << "edge " << e.id << " references an unknown node";
            violations.push_back(os.str());
        }
        if (e.length <= 0) {
            violations.push_back("edge " + std::to_string(e.id) + " has non-positive length");
        }
        if (e.speed_limit <= 0) {
            violations.push_back("edge " + std::to_string(e.id) + " has non-positive speed limit");
        }
    }

    for (const auto& [name, edges] : g.routes) {
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            bool known = true;
            for (EdgeId id : {edges[i], edges[i + 1]}) {
                bool found = false;
                for (const auto& e : g.edges) {
                    if (e.id == id) found = true;
                }
                if (!found) {
                    violations.push_back("route '" + name + "' references unknown edge " +
                                         std::to_string(id));
                    known = false;
                }
            }
            if (known && g.edge(edges[i]).to != g.edge(edges[i + 1]).from) {
                violations.push_back("route '" + name + "' is not edge-contiguous at position " +
                                     std::to_string(i));
            }
        }
    }

    const bool has_primary = g.routes.count("primary") != 0;
    const bool has_alternate = g.routes.count("alternate") != 0;
    if (!has_primary) violations.push_back("missing route 'primary'");
    if (!has_alternate) violations.push_back("missing route 'alternate'");
    if (has_primary && has_alternate && !g.routes.at("primary").empty() &&
        !g.routes.at("alternate").empty()) {
        const auto& pr = g.routes.at("primary");
        const auto& al = g.routes.at("alternate");
        bool endpoints_ok = true;
        for (EdgeId id : pr) {
            bool found = false;
            for (const auto& e : g.edges) {
                if (e.id == id) found = true;
            }
            if (!found) endpoints_ok = false;
        }
        for (EdgeId id : al) {
            bool found = false;
            for (const auto& e : g.edges) {
                if (e.id == id) found = true;
            }
            if (!found) endpoints_ok = false;
        }
        if (endpoints_ok) {
            if (g.edge(pr.front()).from != g.edge(al.front()).from) {
                violations.push_back("primary and alternate do not share an origin node");
            }
            if (g.edge(pr.back()).to != g.edge(al.back()).to) {
                violations.push_back("primary and alternate do not share a destination node");
            }
            if (route_length(g, "primary") >= route_length(g, "alternate")) {
                violations.push_back("primary route is not shorter than the alternate route");
            }
        }
    }
    return violations;
}

double route_offset(const RoadGraph& g, const std::string& route, const RoutePosition& pos) {
    const auto& edges = g.route(route);
    if (pos.edge_index < 0 || static_cast<std::size_t>(pos.edge_index) >= edges.size()) {
        throw std::out_of_range("route_offset: edge_index outside route");
    }
    double total = 0.0;
    for (int i = 0; i < pos.edge_index; ++i) {
        total += g.edge(edges[static_cast<std::size_t>(i)]).length;
    }
    return total + pos.offset;
}

RoutePosition position_at(const RoadGraph& g, const std::string& route, double offset) {
    const auto& edges = g.route(route);
    if (offset < 0) throw std::out_of_range("position_at: negative offset");
    double remaining = offset;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const double len = g.edge(edges[i]).length;
        if (remaining <= len || i + 1 == edges.size()) {
            return RoutePosition{static_cast<int>(i), remaining};
        }
        remaining -= len;
    }
    return RoutePosition{0, remaining}; // unreachable: empty routes throw above
}

std::pair<double, double> world_position(const RoadGraph& g, const std::string& route,
                                         const RoutePosition& pos) {
    const auto& edges = g.route(route);
    if (pos.edge_index < 0 || static_cast<std::size_t>(pos.edge_index) >= edges.size()) {
        throw std::out_of_range("world_position: edge_index outside route");
    }
    const auto& e = g.edge(edges[static_cast<std::size_t>(pos.edge_index)]);
    const auto& a = g.node(e.from);
    const auto& b = g.node(e.to);
    const double t = e.length > 0 ? pos.offset / e.length : 0.0;
    return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

} // namespace vanetsim
