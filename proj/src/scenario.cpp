#include "crsn/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace crsn {

using nlohmann::json;

std::string to_string(ProtocolVariant v) {
    return v == ProtocolVariant::proposed ? "proposed" : "no_trust";
}

ProtocolVariant variant_from_string(const std::string& s) {
    if (s == "proposed") return ProtocolVariant::proposed;
    if (s == "no_trust") return ProtocolVariant::no_trust;
    throw std::runtime_error("invalid config field sim.protocol_variant: " + s);
}

std::vector<std::string> validate_scenario(const ScenarioConfig& c) {
    std::vector<std::string> v;
    auto require = [&](bool ok, const std::string& message) {
        if (!ok) v.push_back(message);
    };

    require(c.node_count >= 1, "core.node_count must be >= 1");
    require(c.area_width_m > 0.0, "core.area_width_m must be positive");
    require(c.area_height_m > 0.0, "core.area_height_m must be positive");
    require(c.channel_count >= 1, "core.channel_count must be >= 1");
    require(c.channel_step_mhz > 0.0, "core.channel_step_mhz must be positive");

    require(c.loss_exponent > 0.0, "kinematics.loss_exponent must be positive");
    require(c.wavelength_m > 0.0, "kinematics.wavelength_m must be positive");
    require(c.ref_distance_m > 0.0, "kinematics.ref_distance_m must be positive");
    require(c.rssi_noise_db >= 0.0, "kinematics.rssi_noise_db must be >= 0");
    require(c.denominator_floor > 0.0, "kinematics.denominator_floor must be positive");

    require(c.collision_prob >= 0.0 && c.collision_prob < 1.0,
            "delay.collision_prob must be in [0, 1)");
    require(c.contention_window_s > 0.0, "delay.contention_window_s must be positive");
    require(c.channel_step_delay_s > 0.0, "delay.channel_step_delay_s must be positive");
    require(c.data_rate_bps > 0.0, "delay.data_rate_bps must be positive");

    require(c.pu_count >= 0, "spectrum.pu_count must be >= 0");
    require(c.pu_mean_on_s > 0.0, "spectrum.pu_mean_on_s must be positive");
    require(c.pu_mean_off_s > 0.0, "spectrum.pu_mean_off_s must be positive");
    require(c.recluster_period_s > 0.0, "spectrum.recluster_period_s must be positive");
    require(c.fixed_cluster_count >= 1, "spectrum.fixed_cluster_count must be >= 1");

    require(c.rrep_wait_s > 0.0, "routing.rrep_wait_s must be positive");
    require(c.route_ttl_s > 0.0, "routing.route_ttl_s must be positive");
    require(c.discovery_retry_s >= 0.0, "routing.discovery_retry_s must be >= 0");

    require(c.run_time_s >= 0.0, "sim.run_time_s must be >= 0");
    require(c.speed_mps >= 0.0, "sim.speed_mps must be >= 0");
    require(c.tx_range_m > 0.0, "sim.tx_range_m must be positive");
    require(c.packet_size_bytes > 0, "sim.packet_size_bytes must be positive");
    require(c.cbr_rate_pps > 0.0, "sim.cbr_rate_pps must be positive");
    require(c.malicious_count >= 0, "sim.malicious_count must be >= 0");
    require(c.malicious_count < std::max(c.node_count, 1),
            "sim.malicious_count must be smaller than core.node_count");
    require(c.malicious_drop_prob >= 0.0 && c.malicious_drop_prob <= 1.0,
            "sim.malicious_drop_prob must be in [0, 1]");
    require(c.mobility_tick_s > 0.0, "sim.mobility_tick_s must be positive");
    require(c.snapshot_interval_s > 0.0, "sim.snapshot_interval_s must be positive");
    require(c.control_packet_bytes > 0, "sim.control_packet_bytes must be positive");
    require(c.backoff_jitter_frac >= 0.0 && c.backoff_jitter_frac < 1.0,
            "sim.backoff_jitter_frac must be in [0, 1)");

    if (!c.nodes.empty()) {
        std::set<std::uint32_t> ids;
        int su_count = 0;
        for (const NodeDecl& n : c.nodes) {
            const std::string tag = "node " + std::to_string(n.id);
            if (!ids.insert(n.id).second) {
                v.push_back(tag + ": duplicate NodeId");
            }
            if (n.x < 0.0 || n.x > c.area_width_m || n.y < 0.0 || n.y > c.area_height_m) {
                v.push_back(tag + ": position outside the simulation area");
            }
            if (!n.is_primary_user) {
                ++su_count;
                if (n.channels.empty()) {
                    v.push_back(tag + ": secondary user with empty channel set");
                }
            }
            if (n.is_primary_user && n.is_malicious) {
                v.push_back(tag + ": a primary user cannot be malicious");
            }
            for (int ch : n.channels) {
                if (ch < 0 || ch >= c.channel_count) {
                    v.push_back(tag + ": channel index " + std::to_string(ch) +
                                " outside [0, core.channel_count)");
                }
            }
        }
        if (su_count != c.node_count) {
            v.push_back("core.node_count does not match the declared secondary-user count");
        }
    }
    return v;
}

namespace {

// Reads every key of `section`, erroring on unknown keys so typos surface.
class SectionReader {
public:
    SectionReader(const json& doc, std::string name) : name_(std::move(name)) {
        if (doc.contains(name_)) {
            section_ = &doc.at(name_);
            if (!section_->is_object()) {
                throw std::runtime_error("invalid config field " + name_ +
                                         ": expected an object");
            }
        }
    }

    template <typename T>
    void get(const char* key, T& out) {
        if (section_ == nullptr || !section_->contains(key)) return;
        try {
            out = section_->at(key).get<T>();
        } catch (const json::exception&) {
            throw std::runtime_error("invalid config field " + name_ + "." + key);
        }
        consumed_.insert(key);
    }

    void finish() const {
        if (section_ == nullptr) return;
        for (auto it = section_->begin(); it != section_->end(); ++it) {
            if (!consumed_.contains(it.key())) {
                throw std::runtime_error("unknown config field " + name_ + "." + it.key());
            }
        }
    }

    const json* raw() const { return section_; }

private:
    std::string name_;
    const json* section_ = nullptr;
    std::set<std::string> consumed_;
};

}  // namespace

ScenarioConfig load_config_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) {
        throw std::runtime_error("config parse error: top level must be an object");
    }

    static const std::set<std::string> known_sections = {
        "core", "kinematics", "delay", "spectrum", "routing", "sim", "nodes"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!known_sections.contains(it.key())) {
            throw std::runtime_error("unknown config section " + it.key());
        }
    }

    ScenarioConfig c;

    SectionReader core(doc, "core");
    core.get("node_count", c.node_count);
    core.get("area_width_m", c.area_width_m);
    core.get("area_height_m", c.area_height_m);
    core.get("channel_count", c.channel_count);
    core.get("channel_step_mhz", c.channel_step_mhz);
    core.finish();

    SectionReader kin(doc, "kinematics");
    kin.get("loss_exponent", c.loss_exponent);
    kin.get("wavelength_m", c.wavelength_m);
    kin.get("ref_distance_m", c.ref_distance_m);
    kin.get("rssi_noise_db", c.rssi_noise_db);
    kin.get("denominator_floor", c.denominator_floor);
    kin.finish();

    SectionReader delay(doc, "delay");
    delay.get("collision_prob", c.collision_prob);
    delay.get("contention_window_s", c.contention_window_s);
    delay.get("channel_step_delay_s", c.channel_step_delay_s);
    delay.get("data_rate_bps", c.data_rate_bps);
    delay.finish();

    SectionReader spectrum(doc, "spectrum");
    spectrum.get("pu_count", c.pu_count);
    spectrum.get("pu_mean_on_s", c.pu_mean_on_s);
    spectrum.get("pu_mean_off_s", c.pu_mean_off_s);
    spectrum.get("recluster_period_s", c.recluster_period_s);
    std::string cluster_mode = c.cluster_mode == ClusterMode::greedy ? "greedy" : "fixed";
    spectrum.get("cluster_mode", cluster_mode);
    if (cluster_mode == "greedy") {
        c.cluster_mode = ClusterMode::greedy;
    } else if (cluster_mode == "fixed") {
        c.cluster_mode = ClusterMode::fixed;
    } else {
        throw std::runtime_error("invalid config field spectrum.cluster_mode: " + cluster_mode);
    }
    spectrum.get("fixed_cluster_count", c.fixed_cluster_count);
    spectrum.finish();

    SectionReader routing(doc, "routing");
    routing.get("rrep_wait_s", c.rrep_wait_s);
    routing.get("route_ttl_s", c.route_ttl_s);
    routing.get("discovery_retry_s", c.discovery_retry_s);
    routing.finish();

    SectionReader sim(doc, "sim");
    sim.get("run_time_s", c.run_time_s);
    sim.get("speed_mps", c.speed_mps);
    sim.get("tx_range_m", c.tx_range_m);
    sim.get("packet_size_bytes", c.packet_size_bytes);
    sim.get("cbr_rate_pps", c.cbr_rate_pps);
    sim.get("malicious_count", c.malicious_count);
    sim.get("malicious_drop_prob", c.malicious_drop_prob);
    sim.get("rng_seed", c.rng_seed);
    std::string variant = to_string(c.protocol_variant);
    sim.get("protocol_variant", variant);
    c.protocol_variant = variant_from_string(variant);
    sim.get("mobility_tick_s", c.mobility_tick_s);
    sim.get("snapshot_interval_s", c.snapshot_interval_s);
    sim.get("control_packet_bytes", c.control_packet_bytes);
    sim.get("backoff_jitter_frac", c.backoff_jitter_frac);
    sim.finish();

    if (doc.contains("nodes")) {
        const json& nodes = doc.at("nodes");
        if (!nodes.is_array()) {
            throw std::runtime_error("invalid config field nodes: expected an array");
        }
        for (const json& jn : nodes) {
            NodeDecl d;
            try {
                d.id = jn.at("id").get<std::uint32_t>();
                d.x = jn.at("x").get<double>();
                d.y = jn.at("y").get<double>();
                if (jn.contains("channels")) {
                    d.channels = jn.at("channels").get<std::vector<int>>();
                }
                if (jn.contains("is_primary_user")) {
                    d.is_primary_user = jn.at("is_primary_user").get<bool>();
                }
                if (jn.contains("is_malicious")) {
                    d.is_malicious = jn.at("is_malicious").get<bool>();
                }
            } catch (const json::exception& e) {
                throw std::runtime_error(std::string("invalid config field nodes: ") + e.what());
            }
            c.nodes.push_back(std::move(d));
        }
    }
    return c;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::system_error(ENOENT, std::generic_category(),
                                "cannot open config file " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_config_json(buf.str());
}

std::string config_to_json(const ScenarioConfig& c) {
    json doc;
    doc["core"] = {{"node_count", c.node_count},
                   {"area_width_m", c.area_width_m},
                   {"area_height_m", c.area_height_m},
                   {"channel_count", c.channel_count},
                   {"channel_step_mhz", c.channel_step_mhz}};
    doc["kinematics"] = {{"loss_exponent", c.loss_exponent},
                         {"wavelength_m", c.wavelength_m},
                         {"ref_distance_m", c.ref_distance_m},
                         {"rssi_noise_db", c.rssi_noise_db},
                         {"denominator_floor", c.denominator_floor}};
    doc["delay"] = {{"collision_prob", c.collision_prob},
                    {"contention_window_s", c.contention_window_s},
                    {"channel_step_delay_s", c.channel_step_delay_s},
                    {"data_rate_bps", c.data_rate_bps}};
    doc["spectrum"] = {{"pu_count", c.pu_count},
                       {"pu_mean_on_s", c.pu_mean_on_s},
                       {"pu_mean_off_s", c.pu_mean_off_s},
                       {"recluster_period_s", c.recluster_period_s},
                       {"cluster_mode", c.cluster_mode == ClusterMode::greedy ? "greedy" : "fixed"},
                       {"fixed_cluster_count", c.fixed_cluster_count}};
    doc["routing"] = {{"rrep_wait_s", c.rrep_wait_s},
                      {"route_ttl_s", c.route_ttl_s},
                      {"discovery_retry_s", c.discovery_retry_s}};
    doc["sim"] = {{"run_time_s", c.run_time_s},
                  {"speed_mps", c.speed_mps},
                  {"tx_range_m", c.tx_range_m},
                  {"packet_size_bytes", c.packet_size_bytes},
                  {"cbr_rate_pps", c.cbr_rate_pps},
                  {"malicious_count", c.malicious_count},
                  {"malicious_drop_prob", c.malicious_drop_prob},
                  {"rng_seed", c.rng_seed},
                  {"protocol_variant", to_string(c.protocol_variant)},
                  {"mobility_tick_s", c.mobility_tick_s},
                  {"snapshot_interval_s", c.snapshot_interval_s},
                  {"control_packet_bytes", c.control_packet_bytes},
                  {"backoff_jitter_frac", c.backoff_jitter_frac}};
    if (!c.nodes.empty()) {
        json nodes = json::array();
        for (const NodeDecl& d : c.nodes) {
            nodes.push_back({{"id", d.id},
                             {"x", d.x},
                             {"y", d.y},
                             {"channels", d.channels},
                             {"is_primary_user", d.is_primary_user},
                             {"is_malicious", d.is_malicious}});
        }
        doc["nodes"] = std::move(nodes);
    }
    return doc.dump(2) + "\n";
}

}  // namespace crsn
