#pragma once

#include "vanetsim/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vanetsim {

enum class MsgKind {
    beacon,
    event_announcement,
    diversion,
    trust_query,
    trust_response,
    attack_report,
    corrective,
    trust_update,
};

enum class MsgPriority { normal, high };

/// Wire message. msg_id identifies the logical message: relayed copies
/// keep it (deduplication key), while sender_id changes per hop and
/// origin_id never does. Kind-specific fields are left defaulted when
/// unused.
struct Message {
    std::uint64_t msg_id = 0;
    MsgKind kind = MsgKind::beacon;
    EntityId origin_id = -1;
    EntityId sender_id = -1;
    std::optional<EventRecord> event;
    int hops_remaining = 0;
    MsgPriority priority = MsgPriority::normal;
    double sent_at = 0.0;

    std::optional<EntityId> addressee;       // unicast kinds (queries, responses, reports)
    EntityId subject = -1;                   // trust query/response/update: whom about
    std::uint64_t about_msg_id = 0;          // correlation with an earlier announcement
    double trust_value = 0.0;                // trust_response / trust_update payload
    std::optional<Observation> observation;  // attack_report payload
    double pos_x = 0.0, pos_y = 0.0;         // beacon payload
    double speed = 0.0;                      // beacon payload
};

/// Fixed roadside unit. Protocol state (event log, adjudications) lives in
/// the engine; the shared trust table stands in for the TA.
struct Rsu {
    EntityId id = -1;
    double x = 0.0;
    double y = 0.0;
    double range = 300.0;
};

/// Unit-disk reach, inclusive at the boundary.
bool in_range(double ax, double ay, double bx, double by, double range);

/// Relay copy for a message accepted by the receiver's trust scheme:
/// hops_remaining - 1, sender rewritten to the relayer, same msg_id.
/// Returns nothing when the hop budget is exhausted. Only announcements,
/// diversions and correctives are relayable; beacons and trust-protocol
/// messages never are (throws std::logic_error).
std::optional<Message> make_relay(const Message& m, EntityId relayer);

/// Builds the periodic single-hop status beacon for a vehicle.
Message make_beacon(std::uint64_t msg_id, EntityId vehicle, double x, double y,
                    double speed, double now);

std::string to_string(MsgKind k);

} // namespace vanetsim
