// Next-hop determination factor metric, route request/reply handling, and
// trust-aware path selection.
#pragma once

#include "crsn/kinematics.hpp"
#include "crsn/trust.hpp"
#include "crsn/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace crsn {

// Per-link metric bundle. nhdf = (transmit_weight / link_delay)^common_channels
// divided by the intruder factor; zero when the factor is INFINITE.
struct LinkMetrics {
    double transmit_weight = 0.0;    // from kinematics
    double link_delay_s = 0.0;       // from the delay model
    int common_channels = 0;         // shared free channels on the link
    IntruderFactor intruder_factor;  // of the upstream node, from the ledger
    double nhdf = 0.0;
};

struct RouteEntry {
    NodeId destination;
    std::vector<NodeId> path;  // simple path, source first, destination last
    double path_score = 0.0;   // cumulative NHDF over the links
    IntruderFactor min_if;     // worst intruder factor along the path
    Timestamp discovered_at = 0.0;
};

using RouteTable = std::map<NodeId, std::vector<RouteEntry>>;

enum class MsgKind { rreq, rrep, report, warning, acl };

struct ControlMessage {
    MsgKind kind = MsgKind::rreq;
    NodeId origin;                  // node that created the message
    NodeId target;                  // flow destination (rreq) / rreq origin (rrep)
    std::uint64_t seq = 0;          // strictly increasing per origin
    NodeId forwarder;               // node that transmitted this copy
    std::vector<NodeId> path;       // path-so-far (rreq) / full path (rrep)
    std::vector<LinkMetrics> hop_metrics;  // one entry per traversed link

    // Sender-side context refreshed at every hop so the receiver can evaluate
    // the mobility and delay equations for the incoming link.
    MobilitySample sample;
    std::set<int> sender_free_channels;
    int sender_channel = 0;
    int sender_degree = 0;
    Timestamp sent_at = 0.0;

    // Trust payload (report/warning): the subject plus a ledger slice to merge.
    NodeId subject;
    NodeId reporter;
    TrustLedger slice;

    std::size_t rrep_index = 0;  // position while walking the reverse path
};

// Per-node protocol bookkeeping that is not part of the routing table.
struct ProtocolState {
    NodeId self;
    std::set<std::pair<std::uint32_t, std::uint64_t>> seen_rreq;   // (origin, seq)
    std::set<std::pair<std::uint32_t, std::uint64_t>> seen_flood;  // report/warning dedupe
    std::uint64_t next_seq = 1;

    bool already_seen_rreq(NodeId origin, std::uint64_t seq) const {
        return seen_rreq.contains({origin.value, seq});
    }
};

// What the receiving node knows when handling an RREQ, assembled by the
// caller from the ACL view, delay model, and trust ledger.
struct RreqView {
    LinkMetrics incoming;                      // metrics of the link just traversed
    bool is_destination = false;
    bool destination_is_neighbor = false;
    std::optional<LinkMetrics> final_hop;      // metrics of the hop to the destination
    MobilitySample own_sample;                 // receiver context for the rebroadcast
    std::set<int> own_free_channels;
    int own_channel = 0;
    int own_degree = 0;
    Timestamp now = 0.0;
};

enum class RreqAction { drop_duplicate, drop_loop, drop_unusable, handled };

struct RreqResult {
    RreqAction action = RreqAction::handled;
    bool forwarded = false;
    std::optional<ControlMessage> forward;      // rebroadcast copy
    std::vector<ControlMessage> replies;        // rreps to send back
};

struct RrepView {
    NodeId self;
    const TrustLedger* ledger = nullptr;
    Timestamp now = 0.0;
};

enum class RrepAction { discarded_blacklisted, stored, forwarded };

struct RrepResult {
    RrepAction action = RrepAction::forwarded;
    std::optional<ControlMessage> forward;  // next hop on the reverse path
    std::optional<RouteEntry> installed;    // set when this node is the rreq origin
};

// The per-link metric: (weight / delay)^channels / factor. Throws
// std::domain_error("zero link delay") when delay is 0; requires
// common_channels >= 1 for a usable link.
double nhdf(double transmit_weight, double link_delay_s, int common_channels,
            const IntruderFactor& factor);

LinkMetrics make_link_metrics(double transmit_weight, double link_delay_s,
                              int common_channels, const IntruderFactor& factor);

// Cumulative path score: the sum of per-link NHDF values, with any zero-valued
// link vetoing the whole path to 0. Throws std::invalid_argument on an empty
// path.
double path_score(std::span<const double> link_nhdf);

// Highest-scoring entry with a positive score; ties broken by fewer hops,
// then by the lexicographically smallest node-id sequence. Empty optional
// when no entry has a positive score (route failure).
std::optional<RouteEntry> select_route(std::span<const RouteEntry> entries);

// Duplicate and loop suppression, per-hop metric accumulation, rebroadcast,
// and reply generation. The caller pre-computes the incoming link metrics and
// drops RREQs from blacklisted senders before calling.
RreqResult handle_rreq(ProtocolState& state, const ControlMessage& rreq,
                       const RreqView& view);

// Reverse-path walk: discards replies whose path contains a node blacklisted
// in the local ledger, installs the full-path entry at the request origin,
// and caches the downstream sub-path at intermediate nodes.
RrepResult handle_rrep(RouteTable& table, const ControlMessage& rrep,
                       const RrepView& view);

// Entry builder shared by handle_rrep and tests.
RouteEntry build_route_entry(const ControlMessage& rrep, std::size_t from_index,
                             Timestamp now);

}  // namespace crsn
