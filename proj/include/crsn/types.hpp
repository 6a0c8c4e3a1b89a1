// Shared domain types used across the simulator: node/channel identifiers,
// planar positions, and simulation-clock timestamps.
#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>

namespace crsn {

// Identifies one node for the whole run. Unique within a scenario.
struct NodeId {
    std::uint32_t value = 0;

    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

// One licensed channel on a uniform frequency grid. Switching cost between
// two channels is proportional to the index distance on the grid.
struct ChannelId {
    int index = 0;
    double center_offset_mhz = 0.0;

    friend constexpr bool operator==(const ChannelId& a, const ChannelId& b) {
        return a.index == b.index;
    }
    friend constexpr auto operator<=>(const ChannelId& a, const ChannelId& b) {
        return a.index <=> b.index;
    }
};

constexpr ChannelId make_channel(int index, double grid_step_mhz = 10.0) {
    return ChannelId{index, index * grid_step_mhz};
}

// Simulation-clock time in seconds.
using Timestamp = double;

struct Position {
    double x = 0.0;  // meters
    double y = 0.0;  // meters

    friend constexpr bool operator==(const Position&, const Position&) = default;
};

inline double distance(const Position& a, const Position& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace crsn

template <>
struct std::hash<crsn::NodeId> {
    std::size_t operator()(crsn::NodeId id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
