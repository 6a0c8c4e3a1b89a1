#include "crsn/sweep.hpp"

#include "crsn/sim.hpp"

#include <exception>

namespace crsn {

SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec) {
    SweepResult result;
    for (ProtocolVariant variant : spec.variants) {
        for (int node_count : spec.node_counts) {
            for (std::uint64_t seed : spec.seeds) {
                ScenarioConfig cfg = base;
                cfg.protocol_variant = variant;
                cfg.node_count = node_count;
                cfg.rng_seed = seed;
                if (cfg.malicious_count >= node_count) {
                    cfg.malicious_count = node_count - 1;
                }

                SummaryRow row;
                row.variant = to_string(variant);
                row.node_count = node_count;
                row.seed = seed;
                try {
                    RunOptions opts;
                    opts.keep_trace = false;
                    const RunResult run = run_scenario(cfg, opts);
                    row.mean_delay_s = run.metrics.mean_e2e_delay_s;
                    row.throughput_bps = run.metrics.throughput_bps;
                    row.blacklisted_count = run.metrics.blacklisted_nodes;
                } catch (const std::exception& e) {
                    row.failed = true;
                    row.error = e.what();
                    result.any_failed = true;
                }
                result.rows.push_back(std::move(row));
            }
        }
    }
    result.means = aggregate_means(result.rows);
    return result;
}

}  // namespace crsn
