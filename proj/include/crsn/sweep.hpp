// Multi-run sweeps over node counts, seeds, and protocol variants, producing
// per-run summary rows plus per-point means for plotting.
#pragma once

#include "crsn/metrics.hpp"
#include "crsn/scenario.hpp"

#include <cstdint>
#include <vector>

namespace crsn {

struct SweepSpec {
    std::vector<int> node_counts = {10, 30, 50, 70, 100};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::vector<ProtocolVariant> variants = {ProtocolVariant::proposed,
                                             ProtocolVariant::no_trust};
};

struct SweepResult {
    std::vector<SummaryRow> rows;   // one per (variant, node_count, seed), run order
    std::vector<MeanRow> means;
    bool any_failed = false;
};

// Runs the full cross product. A failing run is recorded on its row and the
// sweep continues. The base config supplies every other parameter.
SweepResult run_sweep(const ScenarioConfig& base, const SweepSpec& spec);

}  // namespace crsn
