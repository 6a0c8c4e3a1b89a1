// Scenario configuration: every tunable of every module, with defaults, plus
// validation and JSON load/save. The JSON document has one section per
// module so every default is visible and overridable.
#pragma once

#include "crsn/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace crsn {

enum class ProtocolVariant { proposed, no_trust };
enum class ClusterMode { greedy, fixed };

std::string to_string(ProtocolVariant v);
ProtocolVariant variant_from_string(const std::string& s);

// Optional explicit node declaration; when present the scenario uses these
// instead of procedurally generated nodes.
struct NodeDecl {
    std::uint32_t id = 0;
    double x = 0.0;
    double y = 0.0;
    std::vector<int> channels;  // sensed-at-start free set; may be empty for PUs
    bool is_primary_user = false;
    bool is_malicious = false;
};

struct ScenarioConfig {
    // core
    int node_count = 50;          // secondary users
    double area_width_m = 63.25;  // 4000 m^2 default, any rectangle allowed
    double area_height_m = 63.25;
    int channel_count = 5;
    double channel_step_mhz = 10.0;

    // kinematics
    double loss_exponent = 2.0;
    double wavelength_m = 0.125;
    double ref_distance_m = 1.0;
    double rssi_noise_db = 0.0;       // stddev of synthetic RSSI noise
    double denominator_floor = 1e-6;  // transmit-weight clamp

    // delay
    double collision_prob = 0.1;        // per-channel constant
    double contention_window_s = 0.005;
    double channel_step_delay_s = 0.010;  // 10 ms per 10 MHz step
    double data_rate_bps = 1e6;

    // spectrum
    int pu_count = 3;
    double pu_mean_on_s = 30.0;
    double pu_mean_off_s = 30.0;
    double recluster_period_s = 10.0;
    ClusterMode cluster_mode = ClusterMode::greedy;
    int fixed_cluster_count = 10;

    // routing
    double rrep_wait_s = 0.2;
    double route_ttl_s = 10.0;
    double discovery_retry_s = 2.0;  // back-off after a failed discovery

    // sim
    double run_time_s = 120.0;
    double speed_mps = 5.0;
    double tx_range_m = 500.0;
    int packet_size_bytes = 256;
    double cbr_rate_pps = 5.0;
    int malicious_count = 5;
    double malicious_drop_prob = 1.0;
    std::uint64_t rng_seed = 1;
    ProtocolVariant protocol_variant = ProtocolVariant::proposed;
    double mobility_tick_s = 1.0;
    double snapshot_interval_s = 5.0;
    int control_packet_bytes = 64;
    double backoff_jitter_frac = 0.0;

    std::vector<NodeDecl> nodes;  // optional explicit node list

    double packet_size_bits() const { return packet_size_bytes * 8.0; }
    double control_size_bits() const { return control_packet_bytes * 8.0; }
};

// Returns human-readable violations, one per broken invariant, each naming
// the offending field or node id. Empty iff the configuration is valid.
// Side-effect free and idempotent.
std::vector<std::string> validate_scenario(const ScenarioConfig& config);

// Parses a JSON config document. Unknown sections or keys are an error so a
// typo cannot silently fall back to a default. Throws std::runtime_error
// with the offending field name.
ScenarioConfig load_config_json(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

// Serializes the full configuration, defaults included.
std::string config_to_json(const ScenarioConfig& config);

}  // namespace crsn
