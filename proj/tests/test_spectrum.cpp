#include "crsn/spectrum.hpp"

#include "crsn/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace crsn;

TEST_CASE("sense_spectrum") {
    const Position at{10.0, 10.0};

    SUBCASE("no primary users leaves the full set") {
        CHECK(sense_spectrum(at, {}, 100.0, 4) == std::set<int>{0, 1, 2, 3});
    }
    SUBCASE("active in-range user blocks its channel") {
        const std::vector<PuState> pus = {{{20.0, 10.0}, 3, true}};
        CHECK(sense_spectrum(at, pus, 100.0, 5) == std::set<int>{0, 1, 2, 4});
    }
    SUBCASE("out-of-range user is invisible") {
        const std::vector<PuState> pus = {{{500.0, 10.0}, 3, true}};
        CHECK(sense_spectrum(at, pus, 100.0, 5) == std::set<int>{0, 1, 2, 3, 4});
    }
    SUBCASE("inactive user is invisible") {
        const std::vector<PuState> pus = {{{20.0, 10.0}, 3, false}};
        CHECK(sense_spectrum(at, pus, 100.0, 5) == std::set<int>{0, 1, 2, 3, 4});
    }
}

TEST_CASE("exchange_acl") {
    SUBCASE("isolated node sees nothing") {
        CHECK(exchange_acl({}, {}).empty());
    }
    SUBCASE("peers learn each other's channel sets") {
        const std::vector<PeerInfo> peers = {
            {NodeId{1}, {1, 2}, {NodeId{0}}},
            {NodeId{2}, {2, 3}, {NodeId{0}}},
        };
        const NeighborView view = exchange_acl(peers, {});
        REQUIRE(view.size() == 2);
        CHECK(view.at(NodeId{1}).free_channels == std::set<int>{1, 2});
        CHECK(view.at(NodeId{2}).free_channels == std::set<int>{2, 3});
        CHECK(intersect(view.at(NodeId{1}).free_channels, view.at(NodeId{2}).free_channels) ==
              std::set<int>{2});
    }
    SUBCASE("blacklisted neighbor's advertisement is ignored") {
        const std::vector<PeerInfo> peers = {
            {NodeId{1}, {1, 2}, {}},
            {NodeId{2}, {2, 3}, {}},
        };
        const NeighborView view = exchange_acl(peers, {NodeId{2}});
        CHECK(view.size() == 1);
        CHECK(view.contains(NodeId{1}));
    }
}

namespace {

ClusterInput node(std::uint32_t id, double x, double y, std::set<int> channels) {
    return ClusterInput{NodeId{id}, Position{x, y}, std::move(channels)};
}

}  // namespace

TEST_CASE("form_clusters groups identical channel sets in range") {
    const std::vector<ClusterInput> nodes = {
        node(0, 0, 0, {1, 2}),
        node(1, 5, 0, {1, 2}),
        node(2, 0, 5, {1, 2}),
    };
    const auto clusters = form_clusters(nodes, 50.0);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].members == std::set<NodeId>{NodeId{0}, NodeId{1}, NodeId{2}});
    CHECK(clusters[0].common_channels == std::set<int>{1, 2});
    CHECK(clusters[0].head == NodeId{0});  // identical sets tie, lowest id wins
}

TEST_CASE("form_clusters splits disjoint channel sets") {
    const std::vector<ClusterInput> nodes = {
        node(0, 0, 0, {1}),
        node(1, 5, 0, {2}),
    };
    const auto clusters = form_clusters(nodes, 50.0);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0].members == std::set<NodeId>{NodeId{0}});
    CHECK(clusters[1].members == std::set<NodeId>{NodeId{1}});
}

TEST_CASE("form_clusters respects radio range on a chain") {
    // A-B and B-C in range, A-C not; all share channel 1
    const std::vector<ClusterInput> nodes = {
        node(0, 0, 0, {1}),
        node(1, 40, 0, {1}),
        node(2, 80, 0, {1}),
    };
    const auto clusters = form_clusters(nodes, 50.0);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0].members == std::set<NodeId>{NodeId{0}, NodeId{1}});
    CHECK(clusters[0].head == NodeId{0});
    CHECK(clusters[1].members == std::set<NodeId>{NodeId{2}});
}

TEST_CASE("form_clusters prefers the neighbor keeping the intersection largest") {
    // seed 0 can absorb 1 (keeps {1,2}) or 2 (keeps {1}); it must take 1 first
    const std::vector<ClusterInput> nodes = {
        node(0, 0, 0, {1, 2}),
        node(1, 5, 0, {1, 2}),
        node(2, 0, 5, {1, 3}),
    };
    const auto clusters = form_clusters(nodes, 50.0);
    REQUIRE(!clusters.empty());
    CHECK(clusters[0].members == std::set<NodeId>{NodeId{0}, NodeId{1}, NodeId{2}});
    CHECK(clusters[0].common_channels == std::set<int>{1});
}

TEST_CASE("form_clusters partitions every node exactly once") {
    DetRng rng(91);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ClusterInput> nodes;
        const int n = 2 + static_cast<int>(rng.uniform_int(30));
        for (int i = 0; i < n; ++i) {
            std::set<int> channels;
            const int k = 1 + static_cast<int>(rng.uniform_int(4));
            for (int c = 0; c < k; ++c) {
                channels.insert(static_cast<int>(rng.uniform_int(5)));
            }
            nodes.push_back(node(static_cast<std::uint32_t>(i), rng.uniform(0, 100),
                                 rng.uniform(0, 100), std::move(channels)));
        }
        const auto clusters = form_clusters(nodes, 30.0);

        std::set<NodeId> seen;
        for (const Cluster& c : clusters) {
            REQUIRE(!c.members.empty());
            CHECK(!c.common_channels.empty());
            CHECK(c.members.contains(c.head));
            // common set equals the recomputed intersection of member sets
            std::set<int> recomputed;
            bool first = true;
            for (NodeId m : c.members) {
                const auto& mc = nodes[m.value].free_channels;
                recomputed = first ? mc : intersect(recomputed, mc);
                first = false;
            }
            CHECK(c.common_channels == recomputed);
            // members stay within range of the head
            for (NodeId m : c.members) {
                CHECK(distance(nodes[c.head.value].pos, nodes[m.value].pos) <= 30.0);
            }
            for (NodeId m : c.members) {
                CHECK(seen.insert(m).second);
            }
        }
        CHECK(seen.size() == nodes.size());

        // deterministic in the input
        const auto again = form_clusters(nodes, 30.0);
        REQUIRE(again.size() == clusters.size());
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            CHECK(again[i].members == clusters[i].members);
            CHECK(again[i].head == clusters[i].head);
        }
    }
}

TEST_CASE("form_clusters_fixed stripes nodes into the requested group count") {
    std::vector<ClusterInput> nodes;
    for (std::uint32_t i = 0; i < 10; ++i) {
        nodes.push_back(node(i, static_cast<double>(i), 0.0, {0, 1}));
    }
    const auto clusters = form_clusters_fixed(nodes, 5);
    CHECK(clusters.size() == 5);
    std::size_t total = 0;
    for (const Cluster& c : clusters) total += c.members.size();
    CHECK(total == nodes.size());
}
