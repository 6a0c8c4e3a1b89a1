// Deterministic discrete-event simulation core: event queue, mobility,
// primary-user activity, CBR traffic, malicious-behavior injection, and the
// wiring of the spectrum, trust, delay, and routing modules. A (config, seed)
// pair always produces a bit-identical trace.
#pragma once

#include "crsn/metrics.hpp"
#include "crsn/node_state.hpp"
#include "crsn/rng.hpp"
#include "crsn/scenario.hpp"
#include "crsn/trace.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace crsn {

enum class SimEventKind {
    mobility_tick,
    pu_toggle,
    send_packet,
    deliver_msg,
    rrep_window_close,
    recluster,
    snapshot,
};

struct RunOptions {
    bool keep_trace = true;        // retain trace lines in memory
    std::ostream* trace_out = nullptr;  // stream records as they are produced
};

struct RunResult {
    RunMetrics metrics;
    std::vector<std::string> trace;  // empty unless keep_trace
    std::uint64_t trace_hash = 0;
    std::size_t trace_lines = 0;
};

// Simulates the configured scenario for run_time seconds. Refuses to start
// (std::invalid_argument listing the violations) when validate_scenario
// fails. run_time == 0 yields empty metrics and an empty trace.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

// One mobility step: advance along the heading at constant speed, reflecting
// off the area boundary. Mutates the heading on reflection. dt must be > 0.
Position advance_with_reflection(Position pos, double& heading_rad, double speed_mps,
                                 double dt_s, double area_w, double area_h);

enum class ForwardDecision { forward, drop };

// Behavior injector: only malicious nodes ever drop; honest nodes always
// forward. Draws from the run stream only when the probability is fractional.
ForwardDecision inject_malicious_behavior(const NodeState& node, double drop_prob,
                                          DetRng& rng);

}  // namespace crsn
