#pragma once

#include <cstdint>

namespace vanetsim {

/// Entity ids: vehicles start at 0, roadside units at kRsuIdBase.
using EntityId = int;
using NodeId = int;
using EdgeId = int;

inline constexpr EntityId kRsuIdBase = 10000;

inline constexpr bool is_rsu_id(EntityId id) { return id >= kRsuIdBase; }

enum class EventKind { diversion, accident, resolution };

/// What a vehicle can observe at a claimed event location.
enum class Observation { present, absent };

enum class Severity { low, medium, high };

/// A claimed road event. `ground_truth` is the simulator's oracle flag:
/// it is never read by any trust decision path, only by on-location
/// sensing and by metrics.
struct EventRecord {
    EventKind kind = EventKind::diversion;
    EdgeId location = -1;
    double reported_at = 0.0;
    bool ground_truth = true;
};

} // namespace vanetsim
