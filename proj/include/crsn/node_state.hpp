// Full per-node state: identity, kinematics, spectrum membership, and the
// routing table. Mutated only by the single-threaded simulation loop.
#pragma once

#include "crsn/routing.hpp"
#include "crsn/types.hpp"

#include <optional>
#include <set>

namespace crsn {

struct NodeState {
    NodeId id;
    Position pos;
    double speed_setpoint_mps = 0.0;
    double heading_rad = 0.0;
    std::set<int> channels;              // sensed free channel indices
    std::optional<int> cluster;          // cluster id once assigned
    bool is_primary_user = false;
    // Ground truth for the behavior injector only; protocol logic never
    // reads this flag.
    bool is_malicious = false;
    RouteTable routing_table;
};

}  // namespace crsn
