#include "vanetsim/comms.hpp"

#include <cmath>
#include <stdexcept>

namespace vanetsim {

bool in_range(double ax, double ay, double bx, double by, double range) {
    const double dx = ax - bx;
    const double dy = ay - by;
    return std::sqrt(dx * dx + dy * dy) <= range;
}

std::optional<Message> make_relay(const Message& m, EntityId relayer) {
    if (m.kind != MsgKind::event_announcement && m.kind != MsgKind::diversion &&
        m.kind != MsgKind::corrective) {
        throw std::logic_error("make_relay: message kind is not relayable");
    }
    if (m.hops_remaining <= 0) {
        return std::nullopt; // budget exhausted: dropped
    }
    Message copy = m;
    copy.hops_remaining = m.hops_remaining - 1;
    copy.sender_id = relayer;
    return copy;
}

Message make_beacon(std::uint64_t msg_id, EntityId vehicle, double x, double y,
                    double speed, double now) {
    Message m;
    m.msg_id = msg_id;
    m.kind = MsgKind::beacon;
    m.origin_id = vehicle;
    m.sender_id = vehicle;
    m.hops_remaining = 0; // beacons are never relayed
    m.sent_at = now;
    m.pos_x = x;
    m.pos_y = y;
    m.speed = speed;
    return m;
}

std::string to_string(MsgKind k) {
    switch (k) {
        case MsgKind::beacon: return "beacon";
        case MsgKind::event_announcement: return "event_announcement";
        case MsgKind::diversion: return "diversion";
        case MsgKind::trust_query: return "trust_query";
        case MsgKind::trust_response: return "trust_response";
        case MsgKind::attack_report: return "attack_report";
        case MsgKind::corrective: return "corrective";
        case MsgKind::trust_update: return "trust_update";
    }
    return "unknown";
}

} // namespace vanetsim
