#include "crsn/spectrum.hpp"

#include <algorithm>
#include <iterator>

namespace crsn {

std::set<int> intersect(const std::set<int>& a, const std::set<int>& b) {
    std::set<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::inserter(out, out.begin()));
    return out;
}

std::set<int> sense_spectrum(const Position& node_pos, const std::vector<PuState>& pus,
                             double interference_range_m, int channel_count) {
    std::set<int> free;
    for (int c = 0; c < channel_count; ++c) {
        free.insert(c);
    }
    for (const PuState& pu : pus) {
        if (pu.active && distance(node_pos, pu.pos) <= interference_range_m) {
            free.erase(pu.channel_index);
        }
    }
    return free;
}

NeighborView exchange_acl(const std::vector<PeerInfo>& in_range_peers,
                          const std::set<NodeId>& blacklist) {
    NeighborView view;
    for (const PeerInfo& peer : in_range_peers) {
        if (blacklist.contains(peer.id)) {
            continue;
        }
        view[peer.id] = AclEntry{peer.free_channels, peer.neighbors};
    }
    return view;
}

namespace {

// Total channels shared pairwise with the other members; the head election
// score.
int pairwise_common(const std::vector<ClusterInput>& nodes, std::size_t candidate,
                    const std::vector<std::size_t>& members) {
    int score = 0;
    for (std::size_t m : members) {
        if (m == candidate) continue;
        score += static_cast<int>(
            intersect(nodes[candidate].free_channels, nodes[m].free_channels).size());
    }
    return score;
}

NodeId elect_head(const std::vector<ClusterInput>& nodes,
                  const std::vector<std::size_t>& members, double tx_range_m) {
    std::size_t best = members.front();
    int best_score = -1;
    for (std::size_t candidate : members) {
        const bool covers_all = std::all_of(
            members.begin(), members.end(), [&](std::size_t m) {
                return distance(nodes[candidate].pos, nodes[m].pos) <= tx_range_m;
            });
        if (!covers_all) continue;
        const int score = pairwise_common(nodes, candidate, members);
        if (score > best_score ||
            (score == best_score && nodes[candidate].id < nodes[best].id)) {
            best = candidate;
            best_score = score;
        }
    }
    return nodes[best].id;
}

}  // namespace

std::vector<Cluster> form_clusters(const std::vector<ClusterInput>& nodes,
                                   double tx_range_m) {
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return nodes[a].id < nodes[b].id;
    });

    std::vector<bool> assigned(nodes.size(), false);
    std::vector<Cluster> clusters;

    for (std::size_t seed : order) {
        if (assigned[seed]) continue;
        assigned[seed] = true;

        std::vector<std::size_t> members{seed};
        std::set<int> common = nodes[seed].free_channels;

        // Candidates stay within range of the seed so the elected head (the
        // seed in the worst case) covers every member.
        std::vector<std::size_t> candidates;
        for (std::size_t i : order) {
            if (!assigned[i] &&
                distance(nodes[seed].pos, nodes[i].pos) <= tx_range_m) {
                candidates.push_back(i);
            }
        }

        while (true) {
            std::size_t best = nodes.size();
            std::size_t best_size = 0;
            for (std::size_t c : candidates) {
                if (assigned[c]) continue;
                const std::size_t kept = intersect(common, nodes[c].free_channels).size();
                if (kept == 0) continue;
                if (kept > best_size ||
                    (kept == best_size && best != nodes.size() &&
                     nodes[c].id < nodes[best].id)) {
                    best = c;
                    best_size = kept;
                }
            }
            if (best == nodes.size()) break;
            assigned[best] = true;
            members.push_back(best);
            common = intersect(common, nodes[best].free_channels);
        }

        Cluster cluster;
        cluster.id = static_cast<int>(clusters.size());
        cluster.head = elect_head(nodes, members, tx_range_m);
        for (std::size_t m : members) cluster.members.insert(nodes[m].id);
        cluster.common_channels = common;
        clusters.push_back(std::move(cluster));
    }
    return clusters;
}

std::vector<Cluster> form_clusters_fixed(const std::vector<ClusterInput>& nodes,
                                         int cluster_count) {
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return nodes[a].id < nodes[b].id;
    });

    const int groups = std::max(1, cluster_count);
    std::vector<Cluster> clusters;
    const std::size_t per =
        (nodes.size() + static_cast<std::size_t>(groups) - 1) / static_cast<std::size_t>(groups);
    for (std::size_t start = 0; start < nodes.size(); start += per) {
        Cluster cluster;
        cluster.id = static_cast<int>(clusters.size());
        bool first = true;
        for (std::size_t k = start; k < std::min(start + per, nodes.size()); ++k) {
            const ClusterInput& n = nodes[order[k]];
            cluster.members.insert(n.id);
            cluster.common_channels =
                first ? n.free_channels : intersect(cluster.common_channels, n.free_channels);
            first = false;
        }
        cluster.head = *cluster.members.begin();
        clusters.push_back(std::move(cluster));
    }
    return clusters;
}

}  // namespace crsn
