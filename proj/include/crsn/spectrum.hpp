// Channel availability under primary-user activity, ACL exchange among 1-hop
// neighbors, and cluster formation maximizing shared common channels.
#pragma once

#include "crsn/trust.hpp"
#include "crsn/types.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace crsn {

// Snapshot of one primary user for spectrum sensing.
struct PuState {
    Position pos;
    int channel_index = 0;
    bool active = false;
};

// What one node learns about a 1-hop neighbor from the ACL exchange.
struct AclEntry {
    std::set<int> free_channels;
    std::vector<NodeId> neighbors;  // the neighbor's own 1-hop list
};

using NeighborView = std::map<NodeId, AclEntry>;

// A peer as offered to the ACL exchange: identity plus advertised state.
struct PeerInfo {
    NodeId id;
    std::set<int> free_channels;
    std::vector<NodeId> neighbors;
};

struct Cluster {
    int id = 0;
    NodeId head;
    std::set<NodeId> members;
    std::set<int> common_channels;
};

// Node inputs to cluster formation: identity, position, and sensed channels.
struct ClusterInput {
    NodeId id;
    Position pos;
    std::set<int> free_channels;
};

// Channels with no active in-range primary user. Deterministic given the PU
// snapshot.
std::set<int> sense_spectrum(const Position& node_pos, const std::vector<PuState>& pus,
                             double interference_range_m, int channel_count);

// Builds the node's view of its 1-hop neighborhood from the peers' advertised
// ACLs. Entries advertised by blacklisted nodes are ignored.
NeighborView exchange_acl(const std::vector<PeerInfo>& in_range_peers,
                          const std::set<NodeId>& blacklist);

// Greedy cluster formation. Nodes are visited in ascending id order; each
// unassigned node seeds a cluster and absorbs unassigned in-range neighbors
// while the running channel intersection stays non-empty, preferring the
// neighbor that keeps the intersection largest (ties to the lowest id).
// Every node ends up in exactly one cluster; a node sharing no channel with
// anyone forms a singleton. The head is the member with the most pairwise
// common channels with the rest of the cluster, restricted to members that
// cover the whole cluster within tx_range; ties go to the lowest id.
std::vector<Cluster> form_clusters(const std::vector<ClusterInput>& nodes,
                                   double tx_range_m);

// Fixed-assignment alternative: members are striped into `cluster_count`
// groups by id order; common channels are still the member intersection.
std::vector<Cluster> form_clusters_fixed(const std::vector<ClusterInput>& nodes,
                                         int cluster_count);

std::set<int> intersect(const std::set<int>& a, const std::set<int>& b);

}  // namespace crsn
