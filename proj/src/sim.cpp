#include "crsn/sim.hpp"

#include "crsn/delay.hpp"
#include "crsn/kinematics.hpp"
#include "crsn/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <memory>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace crsn {

Position advance_with_reflection(Position pos, double& heading_rad, double speed_mps,
                                 double dt_s, double area_w, double area_h) {
    if (!(dt_s > 0.0)) {
        throw std::invalid_argument("advance_with_reflection: dt must be positive");
    }
    double vx = speed_mps * std::cos(heading_rad);
    double vy = speed_mps * std::sin(heading_rad);
    double x = pos.x + vx * dt_s;
    double y = pos.y + vy * dt_s;
    // Mirror back into the area, flipping the velocity component each time.
    while (x < 0.0 || x > area_w) {
        if (x < 0.0) x = -x;
        if (x > area_w) x = 2.0 * area_w - x;
        vx = -vx;
    }
    while (y < 0.0 || y > area_h) {
        if (y < 0.0) y = -y;
        if (y > area_h) y = 2.0 * area_h - y;
        vy = -vy;
    }
    heading_rad = std::atan2(vy, vx);
    return Position{x, y};
}

ForwardDecision inject_malicious_behavior(const NodeState& node, double drop_prob,
                                          DetRng& rng) {
    if (!node.is_malicious) {
        return ForwardDecision::forward;
    }
    if (drop_prob >= 1.0) return ForwardDecision::drop;
    if (drop_prob <= 0.0) return ForwardDecision::forward;
    return rng.uniform01() < drop_prob ? ForwardDecision::drop : ForwardDecision::forward;
}

namespace {

struct Event {
    double at = 0.0;
    std::uint64_t seq = 0;
    SimEventKind kind = SimEventKind::mobility_tick;
    int node = -1;    // receiving/acting node index
    int aux = -1;     // flow index, pu index, or destination id
    std::uint32_t pkt = 0;
    std::shared_ptr<const ControlMessage> msg;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.at != b.at) return a.at > b.at;
        return a.seq > b.seq;
    }
};

struct PendingDiscovery {
    std::vector<std::uint32_t> buffered;
    bool active = false;
    double last_attempt = -1e300;
};

struct SimNode {
    NodeState st;
    ProtocolState proto;
    TrustLedger ledger;
    NeighborView acl;          // 1-hop knowledge from the last ACL exchange
    std::set<int> capability;  // channels this radio can use at all
    int current_channel = 0;
    Position prev_pos;
    double prev_time = 0.0;
    std::map<NodeId, PendingDiscovery> pending;
    std::map<NodeId, RouteEntry> current_route;
    // primary-user runtime
    int pu_channel = 0;
    bool pu_active = false;
};

struct PacketRec {
    NodeId src;
    NodeId dst;
    double generated_at = 0.0;
    enum class Status { pending, delivered, dropped } status = Status::pending;
    std::vector<NodeId> path;
    std::size_t hop = 0;  // index of the current holder within path
};

struct Flow {
    int src = 0;
    NodeId dst;
    double period = 0.2;
};

std::string path_str(const std::vector<NodeId>& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) out.push_back('-');
        out += std::to_string(path[i].value);
    }
    return out;
}

std::string channels_str(const std::set<int>& channels) {
    if (channels.empty()) return "-";
    std::string out;
    for (int c : channels) {
        if (!out.empty()) out.push_back('|');
        out += std::to_string(c);
    }
    return out;
}

class Engine {
public:
    Engine(const ScenarioConfig& cfg, TraceSink& trace)
        : cfg_(cfg),
          rng_(cfg.rng_seed),
          trace_(trace),
          trust_enabled_(cfg.protocol_variant == ProtocolVariant::proposed) {}

    RunMetrics run();

private:
    // ---- setup ----------------------------------------------------------
    void build_nodes();
    void build_flows();

    // ---- world state ----------------------------------------------------
    void rebuild_adjacency();
    void sense_all();
    void refresh_acl();
    void do_recluster(double now, const char* reason);
    bool multi_member_cluster_lost_channels() const;
    int degree(int idx) const { return static_cast<int>(adj_[idx].size()); }
    int index_of(NodeId id) const { return id_to_index_.at(id.value); }

    // ---- event handlers --------------------------------------------------
    void on_tick(double now);
    void on_pu_toggle(double now, int pu);
    void on_send(double now, int flow_index);
    void on_window_close(double now, int node, NodeId dst);
    void on_snapshot(double now);
    void on_deliver_control(double now, int node, const ControlMessage& msg,
                            const std::shared_ptr<const ControlMessage>& shared);
    void on_deliver_data(double now, int node, std::uint32_t pkt);

    // ---- protocol glue ----------------------------------------------------
    void start_discovery(double now, int src, NodeId dst);
    void transmit_data(double now, std::uint32_t pkt, int from);
    void process_rrep_at(double now, int holder, std::shared_ptr<const ControlMessage> msg);
    void broadcast_control(double now, int from, std::shared_ptr<const ControlMessage> msg,
                           bool skip_no_common);
    void handle_trust_flood(double now, int node, const ControlMessage& msg);
    void on_local_blacklist(double now, int node, NodeId subject, bool emit_warning);
    void invalidate_routes_containing(int node, NodeId subject);
    std::optional<RouteEntry> reselect(double now, int node, NodeId dst);

    // ---- link evaluation ---------------------------------------------------
    MobilitySample make_sample(double now, int sender, int dest) const;
    LinkMetrics eval_incoming_link(double now, int receiver, const ControlMessage& msg);
    std::optional<LinkMetrics> eval_final_hop(double now, int node, NodeId target);
    double estimate_rssi_distance(int a, int b);
    double metric_link_delay(int sender_channel, int sender_degree, int link_channel) const;
    double control_latency(int sender);
    double data_latency(int sender, int link_channel);
    double jittered(double backoff);
    int lowest_common_channel(const std::set<int>& a, const std::set<int>& b) const;

    // ---- bookkeeping --------------------------------------------------------
    void drop_packet(double now, std::uint32_t pkt, int holder, const char* reason);
    void deliver_packet(double now, std::uint32_t pkt, int holder);
    void push(double at, SimEventKind kind, int node, int aux, std::uint32_t pkt,
              std::shared_ptr<const ControlMessage> msg);
    void line(const std::string& record) { trace_.line(record); }

    const ScenarioConfig& cfg_;
    DetRng rng_;
    TraceSink& trace_;
    bool trust_enabled_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
    std::uint64_t next_event_seq_ = 0;
    double last_processed_ = 0.0;

    std::vector<SimNode> nodes_;  // secondary users first, then primary users
    int su_count_ = 0;
    std::map<std::uint32_t, int> id_to_index_;
    std::vector<std::vector<int>> adj_;  // secondary-user graph, by index
    std::vector<Flow> flows_;
    std::vector<PacketRec> packets_;
    std::vector<Cluster> clusters_;
    std::set<std::uint32_t> blacklist_union_;
    RunMetrics metrics_;
};

// ---------------------------------------------------------------------------
// setup

void Engine::build_nodes() {
    std::set<int> full_set;
    for (int c = 0; c < cfg_.channel_count; ++c) full_set.insert(c);

    if (!cfg_.nodes.empty()) {
        for (const NodeDecl& d : cfg_.nodes) {
            SimNode n;
            n.st.id = NodeId{d.id};
            n.st.pos = Position{d.x, d.y};
            n.st.is_primary_user = d.is_primary_user;
            n.st.is_malicious = d.is_malicious;
            n.st.speed_setpoint_mps = d.is_primary_user ? 0.0 : cfg_.speed_mps;
            n.st.heading_rad = rng_.uniform(0.0, 2.0 * std::numbers::pi);
            n.capability = d.channels.empty()
                               ? full_set
                               : std::set<int>(d.channels.begin(), d.channels.end());
            if (d.is_primary_user) {
                n.pu_channel = d.channels.empty() ? 0 : d.channels.front();
            }
            n.prev_pos = n.st.pos;
            nodes_.push_back(std::move(n));
        }
        // secondary users first, stable by id, so indices are deterministic
        std::stable_sort(nodes_.begin(), nodes_.end(), [](const SimNode& a, const SimNode& b) {
            if (a.st.is_primary_user != b.st.is_primary_user) return !a.st.is_primary_user;
            return a.st.id < b.st.id;
        });
        su_count_ = 0;
        for (const SimNode& n : nodes_) {
            if (!n.st.is_primary_user) ++su_count_;
        }
    } else {
        su_count_ = cfg_.node_count;
        for (int i = 0; i < su_count_; ++i) {
            SimNode n;
            n.st.id = NodeId{static_cast<std::uint32_t>(i)};
            n.st.pos = Position{rng_.uniform(0.0, cfg_.area_width_m),
                                rng_.uniform(0.0, cfg_.area_height_m)};
            n.st.heading_rad = rng_.uniform(0.0, 2.0 * std::numbers::pi);
            n.st.speed_setpoint_mps = cfg_.speed_mps;
            n.capability = full_set;
            n.prev_pos = n.st.pos;
            nodes_.push_back(std::move(n));
        }
        // malicious sample: partial Fisher-Yates over the id range
        std::vector<int> pool(static_cast<std::size_t>(su_count_));
        for (int i = 0; i < su_count_; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (int j = 0; j < cfg_.malicious_count; ++j) {
            const auto pick =
                j + static_cast<int>(rng_.uniform_int(static_cast<std::uint64_t>(su_count_ - j)));
            std::swap(pool[static_cast<std::size_t>(j)], pool[static_cast<std::size_t>(pick)]);
            nodes_[static_cast<std::size_t>(pool[static_cast<std::size_t>(j)])].st.is_malicious =
                true;
        }
        for (int k = 0; k < cfg_.pu_count; ++k) {
            SimNode n;
            n.st.id = NodeId{static_cast<std::uint32_t>(su_count_ + k)};
            n.st.pos = Position{rng_.uniform(0.0, cfg_.area_width_m),
                                rng_.uniform(0.0, cfg_.area_height_m)};
            n.st.is_primary_user = true;
            n.capability = full_set;
            n.pu_channel = k % cfg_.channel_count;
            n.prev_pos = n.st.pos;
            nodes_.push_back(std::move(n));
        }
    }

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        id_to_index_[nodes_[i].st.id.value] = static_cast<int>(i);
        nodes_[i].proto.self = nodes_[i].st.id;
    }

    // primary-user initial activity and first toggle
    for (std::size_t i = static_cast<std::size_t>(su_count_); i < nodes_.size(); ++i) {
        SimNode& pu = nodes_[i];
        const double duty = cfg_.pu_mean_on_s / (cfg_.pu_mean_on_s + cfg_.pu_mean_off_s);
        pu.pu_active = rng_.uniform01() < duty;
        const double first =
            rng_.exponential(pu.pu_active ? cfg_.pu_mean_on_s : cfg_.pu_mean_off_s);
        push(first, SimEventKind::pu_toggle, static_cast<int>(i),
             static_cast<int>(i) - su_count_, 0, nullptr);
    }
}

void Engine::build_flows() {
    // The measured workload is legitimate traffic: every honest node sources
    // one constant-rate flow to another honest node. Malicious nodes take
    // part only as relays and attackers.
    std::vector<int> honest;
    for (int i = 0; i < su_count_; ++i) {
        if (!nodes_[static_cast<std::size_t>(i)].st.is_malicious) honest.push_back(i);
    }
    if (honest.size() < 2) return;
    const double period = 1.0 / cfg_.cbr_rate_pps;
    for (int src : honest) {
        Flow f;
        f.src = src;
        int dst;
        do {
            dst = honest[rng_.uniform_int(honest.size())];
        } while (dst == src);
        f.dst = nodes_[static_cast<std::size_t>(dst)].st.id;
        f.period = period;
        const double start = rng_.uniform(0.0, period);
        flows_.push_back(f);
        push(start, SimEventKind::send_packet, src, static_cast<int>(flows_.size()) - 1, 0,
             nullptr);
    }
}

// ---------------------------------------------------------------------------
// world state

void Engine::rebuild_adjacency() {
    adj_.assign(static_cast<std::size_t>(su_count_), {});
    for (int i = 0; i < su_count_; ++i) {
        for (int j = i + 1; j < su_count_; ++j) {
            if (distance(nodes_[i].st.pos, nodes_[j].st.pos) <= cfg_.tx_range_m) {
                adj_[static_cast<std::size_t>(i)].push_back(j);
                adj_[static_cast<std::size_t>(j)].push_back(i);
            }
        }
    }
}

void Engine::sense_all() {
    std::vector<PuState> pus;
    for (std::size_t i = static_cast<std::size_t>(su_count_); i < nodes_.size(); ++i) {
        pus.push_back(PuState{nodes_[i].st.pos, nodes_[i].pu_channel, nodes_[i].pu_active});
    }
    for (int i = 0; i < su_count_; ++i) {
        SimNode& n = nodes_[static_cast<std::size_t>(i)];
        n.st.channels = intersect(
            sense_spectrum(n.st.pos, pus, cfg_.tx_range_m, cfg_.channel_count), n.capability);
    }
}

void Engine::refresh_acl() {
    static const std::set<NodeId> no_blacklist;
    for (int i = 0; i < su_count_; ++i) {
        SimNode& n = nodes_[static_cast<std::size_t>(i)];
        std::vector<PeerInfo> peers;
        peers.reserve(adj_[static_cast<std::size_t>(i)].size());
        for (int j : adj_[static_cast<std::size_t>(i)]) {
            const SimNode& peer = nodes_[static_cast<std::size_t>(j)];
            PeerInfo info;
            info.id = peer.st.id;
            info.free_channels = peer.st.channels;
            for (int k : adj_[static_cast<std::size_t>(j)]) {
                info.neighbors.push_back(nodes_[static_cast<std::size_t>(k)].st.id);
            }
            peers.push_back(std::move(info));
        }
        n.acl = exchange_acl(peers, trust_enabled_ ? n.ledger.blacklist : no_blacklist);
    }
}

bool Engine::multi_member_cluster_lost_channels() const {
    for (const Cluster& c : clusters_) {
        if (c.members.size() < 2) continue;
        std::set<int> live;
        bool first = true;
        for (NodeId m : c.members) {
            const SimNode& n = nodes_[static_cast<std::size_t>(index_of(m))];
            live = first ? n.st.channels : intersect(live, n.st.channels);
            first = false;
            if (live.empty()) break;
        }
        if (live.empty()) return true;
    }
    return false;
}

void Engine::do_recluster(double now, const char* reason) {
    std::vector<ClusterInput> inputs;
    inputs.reserve(static_cast<std::size_t>(su_count_));
    for (int i = 0; i < su_count_; ++i) {
        const SimNode& n = nodes_[static_cast<std::size_t>(i)];
        inputs.push_back(ClusterInput{n.st.id, n.st.pos, n.st.channels});
    }
    clusters_ = cfg_.cluster_mode == ClusterMode::greedy
                    ? form_clusters(inputs, cfg_.tx_range_m)
                    : form_clusters_fixed(inputs, cfg_.fixed_cluster_count);

    line("t=" + fmt_time(now) + " ev=recluster reason=" + reason +
         " clusters=" + std::to_string(clusters_.size()));
    for (const Cluster& c : clusters_) {
        std::vector<NodeId> members(c.members.begin(), c.members.end());
        line("t=" + fmt_time(now) + " ev=cluster id=" + std::to_string(c.id) +
             " head=" + std::to_string(c.head.value) + " members=" + path_str(members) +
             " channels=" + channels_str(c.common_channels));
        for (NodeId m : c.members) {
            SimNode& n = nodes_[static_cast<std::size_t>(index_of(m))];
            n.st.cluster = c.id;
            if (!c.common_channels.empty()) {
                n.current_channel = *c.common_channels.begin();
            } else if (!n.st.channels.empty()) {
                n.current_channel = *n.st.channels.begin();
            }
        }
    }
}

// ---------------------------------------------------------------------------
// link evaluation

int Engine::lowest_common_channel(const std::set<int>& a, const std::set<int>& b) const {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia == *ib) return *ia;
        if (*ia < *ib) {
            ++ia;
        } else {
            ++ib;
        }
    }
    return -1;
}

MobilitySample Engine::make_sample(double now, int sender, int dest) const {
    const SimNode& s = nodes_[static_cast<std::size_t>(sender)];
    const SimNode& d = nodes_[static_cast<std::size_t>(dest)];
    MobilitySample sample;
    sample.recv_pos = s.prev_pos;
    sample.t_recv = s.prev_time;
    sample.send_pos = s.st.pos;
    sample.t_send = now;
    sample.dest_recv_pos = d.prev_pos;
    sample.dest_send_pos = d.st.pos;
    sample.tx_time_s = cfg_.packet_size_bits() / cfg_.data_rate_bps;
    return sample;
}

double Engine::estimate_rssi_distance(int a, int b) {
    const double true_d =
        std::max(1e-3, distance(nodes_[static_cast<std::size_t>(a)].st.pos,
                                nodes_[static_cast<std::size_t>(b)].st.pos));
    RadioParams params{0.0, cfg_.loss_exponent, cfg_.wavelength_m, cfg_.ref_distance_m};
    params.path_loss_db = path_loss_at_distance(true_d, params);
    if (cfg_.rssi_noise_db > 0.0) {
        params.path_loss_db += rng_.normal(0.0, cfg_.rssi_noise_db);
    }
    try {
        return distance_from_rssi(params);
    } catch (const std::domain_error&) {
        return cfg_.tx_range_m;  // out-of-model reading, assume edge of range
    }
}

double Engine::metric_link_delay(int sender_channel, int sender_degree,
                                 int link_channel) const {
    const double sw = switching_delay(
        SwitchInputs{make_channel(sender_channel, cfg_.channel_step_mhz),
                     make_channel(link_channel, cfg_.channel_step_mhz),
                     cfg_.channel_step_delay_s});
    const int contenders = std::max(sender_degree, 1);
    const double q = queuing_delay(
        QueueInputs{cfg_.packet_size_bits(), contenders, cfg_.data_rate_bps});
    const double b = backoff_delay(
        BackoffInputs{cfg_.collision_prob, contenders, cfg_.contention_window_s});
    return link_delay(sw, q, b);
}

LinkMetrics Engine::eval_incoming_link(double now, int receiver, const ControlMessage& msg) {
    const SimNode& r = nodes_[static_cast<std::size_t>(receiver)];
    const std::set<int> common = intersect(msg.sender_free_channels, r.st.channels);
    if (common.empty()) {
        LinkMetrics unusable;
        unusable.intruder_factor = IntruderFactor::finite(1.0);
        return unusable;  // common_channels == 0, nhdf == 0
    }
    const int sender = index_of(msg.forwarder);

    const double d_est = estimate_rssi_distance(sender, receiver);
    const double theta = direction_angle_or_zero(msg.sample);
    const double tau = displacement(d_est, theta);
    const double spd = speed(msg.sample);
    const double probe = 2.0 * (now - msg.sent_at);
    const double weight = transmit_weight(
        TransmitWeightInputs{cfg_.tx_range_m, tau, probe, spd}, cfg_.denominator_floor);

    const double delay = metric_link_delay(msg.sender_channel, msg.sender_degree,
                                           *common.begin());
    const IntruderFactor factor = trust_enabled_ ? if_value(r.ledger, msg.forwarder)
                                                 : IntruderFactor::finite(1.0);
    return make_link_metrics(weight, delay, static_cast<int>(common.size()), factor);
}

std::optional<LinkMetrics> Engine::eval_final_hop(double now, int node, NodeId target) {
    const SimNode& n = nodes_[static_cast<std::size_t>(node)];
    const auto known = n.acl.find(target);
    if (known == n.acl.end()) {
        return std::nullopt;
    }
    const int t = index_of(target);
    const std::set<int> common = intersect(n.st.channels, known->second.free_channels);
    if (common.empty()) {
        return std::nullopt;
    }
    const MobilitySample sample = make_sample(now, node, t);
    const double d_est = estimate_rssi_distance(node, t);
    const double theta = direction_angle_or_zero(sample);
    const double tau = displacement(d_est, theta);
    const double spd = speed(sample);
    // No measured probe for the terminal hop; use the analytic one-hop
    // control round trip.
    const double bits = cfg_.control_size_bits();
    const int contenders = std::max(degree(node), 1);
    const double one_way =
        queuing_delay(QueueInputs{bits, contenders, cfg_.data_rate_bps}) +
        backoff_delay(BackoffInputs{cfg_.collision_prob, contenders, cfg_.contention_window_s}) +
        bits / cfg_.data_rate_bps;
    const double weight = transmit_weight(
        TransmitWeightInputs{cfg_.tx_range_m, tau, 2.0 * one_way, spd},
        cfg_.denominator_floor);
    const double delay =
        metric_link_delay(n.current_channel, degree(node), *common.begin());
    const IntruderFactor factor =
        trust_enabled_ ? if_value(n.ledger, target) : IntruderFactor::finite(1.0);
    return make_link_metrics(weight, delay, static_cast<int>(common.size()), factor);
}

double Engine::jittered(double backoff) {
    if (cfg_.backoff_jitter_frac <= 0.0) return backoff;
    return backoff * (1.0 + cfg_.backoff_jitter_frac * (2.0 * rng_.uniform01() - 1.0));
}

double Engine::control_latency(int sender) {
    const double bits = cfg_.control_size_bits();
    const int contenders = std::max(degree(sender), 1);
    const double q = queuing_delay(QueueInputs{bits, contenders, cfg_.data_rate_bps});
    const double b = jittered(backoff_delay(
        BackoffInputs{cfg_.collision_prob, contenders, cfg_.contention_window_s}));
    return q + b + bits / cfg_.data_rate_bps;
}

double Engine::data_latency(int sender, int link_channel) {
    SimNode& n = nodes_[static_cast<std::size_t>(sender)];
    const double bits = cfg_.packet_size_bits();
    const double sw = switching_delay(
        SwitchInputs{make_channel(n.current_channel, cfg_.channel_step_mhz),
                     make_channel(link_channel, cfg_.channel_step_mhz),
                     cfg_.channel_step_delay_s});
    n.current_channel = link_channel;
    const int contenders = std::max(degree(sender), 1);
    const double q = queuing_delay(QueueInputs{bits, contenders, cfg_.data_rate_bps});
    const double b = jittered(backoff_delay(
        BackoffInputs{cfg_.collision_prob, contenders, cfg_.contention_window_s}));
    return link_delay(sw, q, b) + bits / cfg_.data_rate_bps;
}

// ---------------------------------------------------------------------------
// route management

void Engine::invalidate_routes_containing(int node, NodeId subject) {
    SimNode& n = nodes_[static_cast<std::size_t>(node)];
    for (auto it = n.st.routing_table.begin(); it != n.st.routing_table.end();) {
        auto& entries = it->second;
        std::erase_if(entries, [&](const RouteEntry& e) {
            return std::find(e.path.begin(), e.path.end(), subject) != e.path.end();
        });
        it = entries.empty() ? n.st.routing_table.erase(it) : std::next(it);
    }
    for (auto it = n.current_route.begin(); it != n.current_route.end();) {
        const auto& path = it->second.path;
        if (std::find(path.begin(), path.end(), subject) != path.end()) {
            it = n.current_route.erase(it);
        } else {
            ++it;
        }
    }
}

std::optional<RouteEntry> Engine::reselect(double now, int node, NodeId dst) {
    SimNode& n = nodes_[static_cast<std::size_t>(node)];
    auto it = n.st.routing_table.find(dst);
    if (it == n.st.routing_table.end()) return std::nullopt;
    std::erase_if(it->second, [&](const RouteEntry& e) {
        if (now - e.discovered_at > cfg_.route_ttl_s) return true;
        if (!(e.path_score > 0.0)) return true;
        if (trust_enabled_) {
            for (NodeId m : e.path) {
                if (n.ledger.is_blacklisted(m)) return true;
            }
        }
        return false;
    });
    if (it->second.empty()) {
        n.st.routing_table.erase(it);
        return std::nullopt;
    }
    auto chosen = select_route(it->second);
    if (!chosen) return std::nullopt;
    n.current_route[dst] = *chosen;
    line("t=" + fmt_time(now) + " ev=select node=" + std::to_string(n.st.id.value) +
         " dst=" + std::to_string(dst.value) + " score=" + fmt_exact(chosen->path_score) +
         " path=" + path_str(chosen->path));
    return chosen;
}

// ---------------------------------------------------------------------------
// discovery and control handling

void Engine::start_discovery(double now, int src, NodeId dst) {
    SimNode& n = nodes_[static_cast<std::size_t>(src)];
    auto msg = std::make_shared<ControlMessage>();
    msg->kind = MsgKind::rreq;
    msg->origin = n.st.id;
    msg->target = dst;
    msg->seq = n.proto.next_seq++;
    msg->path = {n.st.id};
    msg->forwarder = n.st.id;
    msg->sample = make_sample(now, src, index_of(dst));
    msg->sender_free_channels = n.st.channels;
    msg->sender_channel = n.current_channel;
    msg->sender_degree = degree(src);
    msg->sent_at = now;
    n.proto.seen_rreq.insert({n.st.id.value, msg->seq});

    PendingDiscovery& p = n.pending[dst];
    p.active = true;
    p.last_attempt = now;

    line("t=" + fmt_time(now) + " ev=rreq origin=" + std::to_string(n.st.id.value) +
         " seq=" + std::to_string(msg->seq) + " node=" + std::to_string(n.st.id.value) +
         " action=start");
    push(now + cfg_.rrep_wait_s, SimEventKind::rrep_window_close, src,
         static_cast<int>(dst.value), 0, nullptr);
    broadcast_control(now, src, std::move(msg), true);
}

void Engine::broadcast_control(double now, int from, std::shared_ptr<const ControlMessage> msg,
                               bool skip_no_common) {
    const double latency = control_latency(from);
    const SimNode& f = nodes_[static_cast<std::size_t>(from)];
    for (int v : adj_[static_cast<std::size_t>(from)]) {
        if (skip_no_common &&
            lowest_common_channel(f.st.channels,
                                  nodes_[static_cast<std::size_t>(v)].st.channels) < 0) {
            continue;
        }
        push(now + latency, SimEventKind::deliver_msg, v, -1, 0, msg);
    }
}

void Engine::process_rrep_at(double now, int holder, std::shared_ptr<const ControlMessage> msg) {
    SimNode& n = nodes_[static_cast<std::size_t>(holder)];
    RrepView view;
    view.self = n.st.id;
    view.ledger = trust_enabled_ ? &n.ledger : nullptr;
    view.now = now;
    RrepResult result = handle_rrep(n.st.routing_table, *msg, view);

    const std::string head = "t=" + fmt_time(now) + " ev=rrep origin=" +
                             std::to_string(msg->origin.value) +
                             " target=" + std::to_string(msg->target.value) +
                             " node=" + std::to_string(n.st.id.value);
    switch (result.action) {
        case RrepAction::discarded_blacklisted:
            line(head + " action=discard_blacklisted");
            return;
        case RrepAction::stored:
            if (result.installed) {
                line(head + " action=stored");
                line("t=" + fmt_time(now) + " ev=route_install node=" +
                     std::to_string(n.st.id.value) +
                     " dst=" + std::to_string(result.installed->destination.value) +
                     " score=" + fmt_exact(result.installed->path_score) +
                     " path=" + path_str(result.installed->path));
            } else {
                line(head + " action=stale");
            }
            return;
        case RrepAction::forwarded: {
            const ControlMessage& fwd = *result.forward;
            const NodeId next_id = fwd.path[fwd.rrep_index];
            const int next = index_of(next_id);
            if (distance(n.st.pos, nodes_[static_cast<std::size_t>(next)].st.pos) >
                cfg_.tx_range_m) {
                line(head + " action=lost");
                return;
            }
            line(head + " action=forward");
            push(now + control_latency(holder), SimEventKind::deliver_msg, next, -1, 0,
                 std::make_shared<const ControlMessage>(fwd));
            return;
        }
    }
}

void Engine::on_deliver_control(double now, int node, const ControlMessage& msg,
                                const std::shared_ptr<const ControlMessage>& shared) {
    SimNode& n = nodes_[static_cast<std::size_t>(node)];
    if (n.st.is_primary_user) return;

    if (msg.kind == MsgKind::rreq) {
        const std::string head = "t=" + fmt_time(now) + " ev=rreq origin=" +
                                 std::to_string(msg.origin.value) +
                                 " seq=" + std::to_string(msg.seq) +
                                 " node=" + std::to_string(n.st.id.value);
        if (trust_enabled_ && n.ledger.is_blacklisted(msg.forwarder)) {
            line(head + " action=from_blacklisted");
            return;
        }

        RreqView view;
        view.incoming = eval_incoming_link(now, node, msg);
        view.is_destination = n.st.id == msg.target;
        if (!view.is_destination) {
            // target known as 1-hop neighbor through the ACL exchange, still
            // physically in range, and not convicted since the last exchange
            const int target_idx =
                id_to_index_.contains(msg.target.value) ? index_of(msg.target) : -1;
            const bool in_range =
                target_idx >= 0 &&
                distance(n.st.pos, nodes_[static_cast<std::size_t>(target_idx)].st.pos) <=
                    cfg_.tx_range_m;
            if (in_range && n.acl.contains(msg.target) &&
                (!trust_enabled_ || !n.ledger.is_blacklisted(msg.target))) {
                view.final_hop = eval_final_hop(now, node, msg.target);
                view.destination_is_neighbor = view.final_hop.has_value();
            }
            view.own_sample = make_sample(now, node, target_idx >= 0 ? target_idx : node);
        } else {
            view.own_sample = make_sample(now, node, node);
        }
        view.own_free_channels = n.st.channels;
        view.own_channel = n.current_channel;
        view.own_degree = degree(node);
        view.now = now;

        RreqResult result = handle_rreq(n.proto, msg, view);
        switch (result.action) {
            case RreqAction::drop_duplicate:
                line(head + " action=dup");
                return;
            case RreqAction::drop_loop:
                line(head + " action=loop");
                return;
            case RreqAction::drop_unusable:
                line(head + " action=unusable");
                return;
            case RreqAction::handled:
                break;
        }
        if (!result.replies.empty()) {
            line(head + (result.forwarded ? " action=reply_forward" : " action=reply"));
            for (ControlMessage& reply : result.replies) {
                process_rrep_at(now, node, std::make_shared<const ControlMessage>(reply));
            }
        } else {
            line(head + " action=forward");
        }
        if (result.forward) {
            broadcast_control(now, node,
                              std::make_shared<const ControlMessage>(*result.forward), true);
        }
        return;
    }

    if (msg.kind == MsgKind::rrep) {
        process_rrep_at(now, node, shared);
        return;
    }

    if (msg.kind == MsgKind::report || msg.kind == MsgKind::warning) {
        handle_trust_flood(now, node, msg);
        return;
    }
}

void Engine::handle_trust_flood(double now, int node, const ControlMessage& msg) {
    SimNode& n = nodes_[static_cast<std::size_t>(node)];
    if (!trust_enabled_) return;
    if (!n.proto.seen_flood.insert({msg.origin.value, msg.seq}).second) return;
    if (n.ledger.is_blacklisted(msg.forwarder)) return;

    const bool was_blacklisted = n.ledger.is_blacklisted(msg.subject);
    n.ledger = merge_ledgers(n.ledger, msg.slice);

    if (msg.kind == MsgKind::report) {
        const EvalResult eval = evaluate_malicious(n.ledger, msg.subject);
        if (eval.newly_blacklisted) {
            on_local_blacklist(now, node, msg.subject, true);
        }
    } else if (!was_blacklisted && n.ledger.is_blacklisted(msg.subject)) {
        on_local_blacklist(now, node, msg.subject, false);
    }

    // keep the flood moving with this node as forwarder
    auto fwd = std::make_shared<ControlMessage>(msg);
    fwd->forwarder = n.st.id;
    broadcast_control(now, node, std::move(fwd), false);
}

void Engine::on_local_blacklist(double now, int node, NodeId subject, bool emit_warning) {
    SimNode& n = nodes_[static_cast<std::size_t>(node)];
    line("t=" + fmt_time(now) + " ev=blacklist node=" + std::to_string(n.st.id.value) +
         " subject=" + std::to_string(subject.value));
    metrics_.blacklist_timeline.push_back(BlacklistEvent{now, n.st.id, subject});
    blacklist_union_.insert(subject.value);
    invalidate_routes_containing(node, subject);

    if (emit_warning) {
        auto warning = std::make_shared<ControlMessage>();
        warning->kind = MsgKind::warning;
        warning->origin = n.st.id;
        warning->seq = n.proto.next_seq++;
        warning->subject = subject;
        warning->forwarder = n.st.id;
        warning->slice = ledger_slice(n.ledger, subject);
        n.proto.seen_flood.insert({n.st.id.value, warning->seq});
        line("t=" + fmt_time(now) + " ev=warning origin=" + std::to_string(n.st.id.value) +
             " subject=" + std::to_string(subject.value));
        broadcast_control(now, node, std::move(warning), false);
    }
}

// ---------------------------------------------------------------------------
// data path

void Engine::on_send(double now, int flow_index) {
    const Flow& flow = flows_[static_cast<std::size_t>(flow_index)];
    const double next = now + flow.period;
    if (next <= cfg_.run_time_s) {
        push(next, SimEventKind::send_packet, flow.src, flow_index, 0, nullptr);
    }

    SimNode& n = nodes_[static_cast<std::size_t>(flow.src)];
    const auto pkt = static_cast<std::uint32_t>(packets_.size());
    packets_.push_back(PacketRec{n.st.id, flow.dst, now, PacketRec::Status::pending, {}, 0});
    ++metrics_.generated_count;
    line("t=" + fmt_time(now) + " ev=gen pkt=" + std::to_string(pkt) +
         " src=" + std::to_string(n.st.id.value) + " dst=" + std::to_string(flow.dst.value) +
         " bytes=" + std::to_string(cfg_.packet_size_bytes));

    // current route still valid?
    std::optional<RouteEntry> route;
    if (auto it = n.current_route.find(flow.dst); it != n.current_route.end()) {
        bool ok = now - it->second.discovered_at <= cfg_.route_ttl_s;
        if (ok && trust_enabled_) {
            for (NodeId m : it->second.path) {
                if (n.ledger.is_blacklisted(m)) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) {
            route = it->second;
        } else {
            n.current_route.erase(it);
        }
    }
    if (!route) {
        route = reselect(now, flow.src, flow.dst);
    }

    if (route) {
        packets_[pkt].path = route->path;
        packets_[pkt].hop = 0;
        transmit_data(now, pkt, flow.src);
        return;
    }

    PendingDiscovery& p = n.pending[flow.dst];
    if (p.active) {
        p.buffered.push_back(pkt);
    } else if (now - p.last_attempt >= cfg_.discovery_retry_s) {
        p.buffered.push_back(pkt);
        start_discovery(now, flow.src, flow.dst);
    } else {
        drop_packet(now, pkt, flow.src, "no_route");
    }
}

void Engine::on_window_close(double now, int node, NodeId dst) {
    SimNode& n = nodes_[static_cast<std::size_t>(node)];
    PendingDiscovery& p = n.pending[dst];
    p.active = false;
    const std::optional<RouteEntry> route = reselect(now, node, dst);
    if (!route) {
        line("t=" + fmt_time(now) + " ev=route_fail node=" + std::to_string(n.st.id.value) +
             " dst=" + std::to_string(dst.value));
    }
    for (std::uint32_t pkt : p.buffered) {
        if (packets_[pkt].status != PacketRec::Status::pending) continue;
        if (route) {
            packets_[pkt].path = route->path;
            packets_[pkt].hop = 0;
            transmit_data(now, pkt, node);
        } else {
            drop_packet(now, pkt, node, "no_route");
        }
    }
    p.buffered.clear();
}

void Engine::transmit_data(double now, std::uint32_t pkt, int from) {
    PacketRec& rec = packets_[pkt];
    SimNode& f = nodes_[static_cast<std::size_t>(from)];
    const NodeId next_id = rec.path[rec.hop + 1];
    const int next = index_of(next_id);

    if (trust_enabled_ && f.ledger.is_blacklisted(next_id)) {
        drop_packet(now, pkt, from, "blacklisted_next_hop");
        return;
    }
    if (distance(f.st.pos, nodes_[static_cast<std::size_t>(next)].st.pos) > cfg_.tx_range_m) {
        drop_packet(now, pkt, from, "link_break");
        return;
    }
    const int link_ch = lowest_common_channel(
        f.st.channels, nodes_[static_cast<std::size_t>(next)].st.channels);
    if (link_ch < 0) {
        drop_packet(now, pkt, from, "no_common_channel");
        return;
    }
    const double latency = data_latency(from, link_ch);
    line("t=" + fmt_time(now) + " ev=send pkt=" + std::to_string(pkt) +
         " from=" + std::to_string(f.st.id.value) + " to=" + std::to_string(next_id.value));
    push(now + latency, SimEventKind::deliver_msg, next, -1, pkt, nullptr);
}

void Engine::on_deliver_data(double now, int node, std::uint32_t pkt) {
    PacketRec& rec = packets_[pkt];
    if (rec.status != PacketRec::Status::pending) return;
    rec.hop += 1;
    SimNode& n = nodes_[static_cast<std::size_t>(node)];

    if (n.st.id == rec.dst) {
        deliver_packet(now, pkt, node);
        return;
    }

    if (inject_malicious_behavior(n.st, cfg_.malicious_drop_prob, rng_) ==
        ForwardDecision::drop) {
        drop_packet(now, pkt, node, "malicious");
        if (!trust_enabled_) return;
        // Every neighbor that overheard the expected forward reports the
        // dropper and floods the report.
        const int subject_degree = degree(node);
        for (int o : adj_[static_cast<std::size_t>(node)]) {
            SimNode& observer = nodes_[static_cast<std::size_t>(o)];
            observer.ledger.neighbor_counts[n.st.id] = subject_degree;
            const ReportResult res =
                record_report(observer.ledger, n.st.id, observer.st.id, now);
            if (res.status != ReportStatus::recorded) continue;
            line("t=" + fmt_time(now) + " ev=report observer=" +
                 std::to_string(observer.st.id.value) +
                 " subject=" + std::to_string(n.st.id.value) +
                 " rn=" + std::to_string(observer.ledger.report_count(n.st.id)));
            auto report = std::make_shared<ControlMessage>();
            report->kind = MsgKind::report;
            report->origin = observer.st.id;
            report->seq = observer.proto.next_seq++;
            report->subject = n.st.id;
            report->reporter = observer.st.id;
            report->forwarder = observer.st.id;
            report->slice = ledger_slice(observer.ledger, n.st.id);
            observer.proto.seen_flood.insert({observer.st.id.value, report->seq});
            if (res.newly_blacklisted) {
                on_local_blacklist(now, o, n.st.id, true);
            }
            broadcast_control(now, o, std::move(report), false);
        }
        return;
    }

    transmit_data(now, pkt, node);
}

void Engine::drop_packet(double now, std::uint32_t pkt, int holder, const char* reason) {
    packets_[pkt].status = PacketRec::Status::dropped;
    ++metrics_.dropped_count;
    line("t=" + fmt_time(now) + " ev=drop pkt=" + std::to_string(pkt) +
         " node=" + std::to_string(nodes_[static_cast<std::size_t>(holder)].st.id.value) +
         " reason=" + reason);
}

void Engine::deliver_packet(double now, std::uint32_t pkt, int holder) {
    PacketRec& rec = packets_[pkt];
    rec.status = PacketRec::Status::delivered;
    ++metrics_.delivered_count;
    const double delay = now - rec.generated_at;
    metrics_.delay_samples_s.push_back(delay);
    line("t=" + fmt_time(now) + " ev=deliver pkt=" + std::to_string(pkt) +
         " node=" + std::to_string(nodes_[static_cast<std::size_t>(holder)].st.id.value) +
         " delay=" + fmt_exact(delay));
}

// ---------------------------------------------------------------------------
// periodic events

void Engine::on_tick(double now) {
    const double dt = cfg_.mobility_tick_s;
    for (int i = 0; i < su_count_; ++i) {
        SimNode& n = nodes_[static_cast<std::size_t>(i)];
        n.prev_pos = n.st.pos;
        n.prev_time = now - dt;
        n.st.pos = advance_with_reflection(n.st.pos, n.st.heading_rad,
                                           n.st.speed_setpoint_mps, dt, cfg_.area_width_m,
                                           cfg_.area_height_m);
    }
    rebuild_adjacency();
    sense_all();
    refresh_acl();

    std::uint64_t poshash = kFnvOffset;
    for (const SimNode& n : nodes_) {
        poshash = fnv1a_bytes(&n.st.pos.x, sizeof(double), poshash);
        poshash = fnv1a_bytes(&n.st.pos.y, sizeof(double), poshash);
    }
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(poshash));
    line("t=" + fmt_time(now) + " ev=tick poshash=" + hex);

    if (multi_member_cluster_lost_channels()) {
        do_recluster(now, "empty_common");
    }

    const double next = now + dt;
    if (next <= cfg_.run_time_s) {
        push(next, SimEventKind::mobility_tick, -1, -1, 0, nullptr);
    }
}

void Engine::on_pu_toggle(double now, int node_index) {
    SimNode& pu = nodes_[static_cast<std::size_t>(node_index)];
    pu.pu_active = !pu.pu_active;
    line("t=" + fmt_time(now) + " ev=pu pu=" + std::to_string(pu.st.id.value) +
         " ch=" + std::to_string(pu.pu_channel) + " state=" + (pu.pu_active ? "on" : "off"));
    sense_all();
    refresh_acl();
    const double hold = rng_.exponential(pu.pu_active ? cfg_.pu_mean_on_s : cfg_.pu_mean_off_s);
    const double next = now + hold;
    if (next <= cfg_.run_time_s) {
        push(next, SimEventKind::pu_toggle, node_index, -1, 0, nullptr);
    }
    if (multi_member_cluster_lost_channels()) {
        do_recluster(now, "empty_common");
    }
}

void Engine::on_snapshot(double now) {
    TrustLedger merged;
    for (int i = 0; i < su_count_; ++i) {
        merged = merge_ledgers(merged, nodes_[static_cast<std::size_t>(i)].ledger);
    }
    std::size_t report_pairs = 0;
    for (const auto& [subject, reporters] : merged.reports) {
        report_pairs += reporters.size();
    }
    line("t=" + fmt_time(now) + " ev=snapshot subjects=" +
         std::to_string(merged.reports.size()) +
         " blacklisted=" + std::to_string(merged.blacklist.size()) +
         " reports=" + std::to_string(report_pairs));
    const double next = now + cfg_.snapshot_interval_s;
    if (next <= cfg_.run_time_s) {
        push(next, SimEventKind::snapshot, -1, -1, 0, nullptr);
    }
}

// ---------------------------------------------------------------------------
// main loop

void Engine::push(double at, SimEventKind kind, int node, int aux, std::uint32_t pkt,
                  std::shared_ptr<const ControlMessage> msg) {
    Event ev;
    ev.at = at;
    ev.seq = next_event_seq_++;
    ev.kind = kind;
    ev.node = node;
    ev.aux = aux;
    ev.pkt = pkt;
    ev.msg = std::move(msg);
    queue_.push(std::move(ev));
}

RunMetrics Engine::run() {
    build_nodes();
    line("t=" + fmt_time(0.0) + " ev=init nodes=" + std::to_string(su_count_) +
         " pus=" + std::to_string(nodes_.size() - static_cast<std::size_t>(su_count_)) +
         " channels=" + std::to_string(cfg_.channel_count) +
         " variant=" + to_string(cfg_.protocol_variant) +
         " seed=" + std::to_string(cfg_.rng_seed));
    rebuild_adjacency();
    sense_all();
    refresh_acl();
    do_recluster(0.0, "init");
    build_flows();

    if (cfg_.mobility_tick_s <= cfg_.run_time_s) {
        push(cfg_.mobility_tick_s, SimEventKind::mobility_tick, -1, -1, 0, nullptr);
    }
    if (cfg_.recluster_period_s <= cfg_.run_time_s) {
        push(cfg_.recluster_period_s, SimEventKind::recluster, -1, -1, 0, nullptr);
    }
    if (cfg_.snapshot_interval_s <= cfg_.run_time_s) {
        push(cfg_.snapshot_interval_s, SimEventKind::snapshot, -1, -1, 0, nullptr);
    }

    while (!queue_.empty()) {
        const Event ev = queue_.top();
        if (ev.at > cfg_.run_time_s) break;
        queue_.pop();
        if (ev.at < last_processed_) {
            throw std::logic_error("event causality violated");
        }
        last_processed_ = ev.at;

        switch (ev.kind) {
            case SimEventKind::mobility_tick:
                on_tick(ev.at);
                break;
            case SimEventKind::pu_toggle:
                on_pu_toggle(ev.at, ev.node);
                break;
            case SimEventKind::send_packet:
                on_send(ev.at, ev.aux);
                break;
            case SimEventKind::deliver_msg:
                if (ev.msg != nullptr) {
                    on_deliver_control(ev.at, ev.node, *ev.msg, ev.msg);
                } else {
                    on_deliver_data(ev.at, ev.node, ev.pkt);
                }
                break;
            case SimEventKind::rrep_window_close:
                on_window_close(ev.at, ev.node,
                                NodeId{static_cast<std::uint32_t>(ev.aux)});
                break;
            case SimEventKind::recluster:
                do_recluster(ev.at, "periodic");
                if (ev.at + cfg_.recluster_period_s <= cfg_.run_time_s) {
                    push(ev.at + cfg_.recluster_period_s, SimEventKind::recluster, -1, -1, 0,
                         nullptr);
                }
                break;
            case SimEventKind::snapshot:
                on_snapshot(ev.at);
                break;
        }
    }

    metrics_.in_flight_at_end =
        metrics_.generated_count - metrics_.delivered_count - metrics_.dropped_count;
    metrics_.blacklisted_nodes = blacklist_union_.size();
    metrics_.mean_e2e_delay_s = e2e_delay(metrics_.delay_samples_s);
    metrics_.throughput_bps =
        cfg_.run_time_s > 0.0
            ? throughput_bps(metrics_.delivered_count, cfg_.packet_size_bits(), cfg_.run_time_s)
            : 0.0;
    line("t=" + fmt_time(last_processed_) + " ev=end generated=" +
         std::to_string(metrics_.generated_count) +
         " delivered=" + std::to_string(metrics_.delivered_count) +
         " dropped=" + std::to_string(metrics_.dropped_count) +
         " in_flight=" + std::to_string(metrics_.in_flight_at_end));
    return metrics_;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    const std::vector<std::string> violations = validate_scenario(config);
    if (!violations.empty()) {
        std::string joined = "invalid scenario:";
        for (const std::string& v : violations) {
            joined += "\n  " + v;
        }
        throw std::invalid_argument(joined);
    }

    TraceSink sink(options.keep_trace, options.trace_out);
    RunResult result;
    if (config.run_time_s > 0.0) {
        Engine engine(config, sink);
        result.metrics = engine.run();
    }
    result.metrics.trace_hash = sink.hash();
    result.trace_hash = sink.hash();
    result.trace_lines = sink.count();
    result.trace = sink.lines();
    return result;
}

}  // namespace crsn
