// Per-run measurement aggregation: mean end-to-end delay and delivered
// throughput, plus recomputation of both directly from a raw trace.
#pragma once

#include "crsn/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace crsn {

struct BlacklistEvent {
    Timestamp at = 0.0;
    NodeId observer;  // node whose ledger convicted the subject
    NodeId subject;
};

struct RunMetrics {
    std::optional<double> mean_e2e_delay_s;  // absent when nothing was delivered
    double throughput_bps = 0.0;             // delivered payload bits / run time
    std::uint64_t delivered_count = 0;
    std::uint64_t generated_count = 0;
    std::uint64_t dropped_count = 0;
    std::uint64_t in_flight_at_end = 0;
    std::vector<double> delay_samples_s;     // per delivered packet, delivery order
    std::vector<BlacklistEvent> blacklist_timeline;
    std::uint64_t blacklisted_nodes = 0;     // distinct subjects convicted anywhere
    std::uint64_t trace_hash = 0;
};

// Arithmetic mean of the delay samples; empty optional when none exist.
std::optional<double> e2e_delay(std::span<const double> samples);

// delivered_count * packet_size_bits / run_time. Requires run_time > 0.
double throughput_bps(std::uint64_t delivered_count, double packet_size_bits,
                      double run_time_s);

// Rebuilds generated/delivered counts, delay samples, mean delay, and
// throughput from raw trace lines. The trace is the source of truth: this
// must reproduce the engine-reported RunMetrics exactly.
struct TraceDerived {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::vector<double> delays_s;
    std::optional<double> mean_delay_s;
    double throughput_bps = 0.0;
};
TraceDerived recompute_from_trace(std::span<const std::string> lines,
                                  double packet_size_bits, double run_time_s);

// One summary row per run; columns are fixed:
// variant,node_count,seed,mean_delay_s,throughput_bps,blacklisted_count
struct SummaryRow {
    std::string variant;
    int node_count = 0;
    std::uint64_t seed = 0;
    std::optional<double> mean_delay_s;
    double throughput_bps = 0.0;
    std::uint64_t blacklisted_count = 0;
    bool failed = false;
    std::string error;
};

std::string summary_csv_header();
std::string summary_csv_row(const SummaryRow& row);

// Per (variant, node_count) means over seeds, for direct plotting.
struct MeanRow {
    std::string variant;
    int node_count = 0;
    std::optional<double> mean_delay_s;  // mean over seeds with delivered packets
    double throughput_bps = 0.0;         // mean over all seeds
    int seeds = 0;
};

std::string means_csv_header();
std::string means_csv_row(const MeanRow& row);
std::vector<MeanRow> aggregate_means(std::span<const SummaryRow> rows);

// key=value field access for trace analysis.
std::optional<std::string_view> trace_field(std::string_view line, std::string_view key);

}  // namespace crsn
