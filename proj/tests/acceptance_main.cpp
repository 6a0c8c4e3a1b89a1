// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.

#include "crsn/delay.hpp"
#include "crsn/metrics.hpp"
#include "crsn/rng.hpp"
#include "crsn/routing.hpp"
#include "crsn/scenario.hpp"
#include "crsn/sim.hpp"
#include "crsn/sweep.hpp"
#include "crsn/trace.hpp"
#include "crsn/trust.hpp"
#include "crsn/verify.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace crsn;

namespace {

int failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << " " << detail << "\n";
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Scenario used for the trend criteria: a multi-hop topology (the default
// area/range pair forms a single-hop clique, which would never exercise
// relays, trust, or rerouting).
ScenarioConfig multihop_base() {
    ScenarioConfig cfg;
    cfg.area_width_m = 120.0;
    cfg.area_height_m = 120.0;
    cfg.tx_range_m = 50.0;
    cfg.pu_count = 3;
    cfg.malicious_count = 5;
    cfg.malicious_drop_prob = 1.0;
    cfg.run_time_s = 60.0;
    cfg.rrep_wait_s = 0.5;
    cfg.route_ttl_s = 3.0;
    return cfg;
}

// Sparser and with default routing timers: cheaper per run, still plenty of
// relaying and convictions for the exclusion property.
ScenarioConfig exclusion_base() {
    ScenarioConfig cfg;
    cfg.area_width_m = 150.0;
    cfg.area_height_m = 150.0;
    cfg.tx_range_m = 50.0;
    cfg.pu_count = 3;
    cfg.malicious_count = 5;
    cfg.malicious_drop_prob = 1.0;
    cfg.run_time_s = 60.0;
    return cfg;
}

// ---------------------------------------------------------------------------

void criterion_1_formula_suite() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<CheckResult> results = run_verify_checks();
    const double elapsed = seconds_since(t0);
    std::size_t passed = 0;
    std::string first_failure;
    for (const CheckResult& r : results) {
        if (r.pass) {
            ++passed;
        } else if (first_failure.empty()) {
            first_failure = r.group + "::" + r.name + " (" + r.detail + ")";
        }
    }
    std::ostringstream os;
    os << "formula example suite: " << passed << "/" << results.size() << " checks in "
       << elapsed << " s";
    if (!first_failure.empty()) os << "; first failure: " << first_failure;
    report("C1", passed == results.size() && elapsed < 1.0, os.str());
}

void criterion_2_switching_constant() {
    // 10 ms per 10 MHz step: one step must cost exactly 10 ms
    const double one_step =
        switching_delay(SwitchInputs{make_channel(2, 10.0), make_channel(3, 10.0), 0.010});
    report("C2", one_step == 0.010,
           "channel switching, one 10 MHz step at 10 ms/step = " + fmt_exact(one_step) +
               " s (exact)");
}

void criterion_3_majority_threshold() {
    // five nodes: subject X plus four neighbors
    TrustLedger ledger;
    const NodeId x{0};
    ledger.neighbor_counts[x] = 4;
    record_report(ledger, x, NodeId{1}, 1.0);
    record_report(ledger, x, NodeId{2}, 2.0);
    const bool half_trusted = !ledger.is_blacklisted(x);
    record_report(ledger, x, NodeId{3}, 3.0);
    const bool majority_convicted = ledger.is_blacklisted(x);
    report("C3", half_trusted && majority_convicted,
           std::string("2 of 4 reporters: ") + (half_trusted ? "trusted" : "blacklisted") +
               "; 3 of 4 reporters: " + (majority_convicted ? "blacklisted" : "trusted"));
}

void criterion_4_blacklist_exclusion() {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioConfig cfg = exclusion_base();
    cfg.node_count = 50;
    cfg.malicious_count = 5;
    cfg.malicious_drop_prob = 1.0;

    std::uint64_t selections = 0;
    std::uint64_t violations = 0;
    std::uint64_t blacklist_events = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        cfg.rng_seed = seed;
        const RunResult run = run_scenario(cfg);
        // replay: per-observer blacklist as of each line, checked at selections
        std::map<std::string, std::set<std::string>> blacklisted_by;
        for (const std::string& line : run.trace) {
            const auto ev = trace_field(line, "ev");
            if (!ev) continue;
            if (*ev == "blacklist") {
                ++blacklist_events;
                blacklisted_by[std::string(*trace_field(line, "node"))].insert(
                    std::string(*trace_field(line, "subject")));
            } else if (*ev == "select") {
                ++selections;
                const auto& bad = blacklisted_by[std::string(*trace_field(line, "node"))];
                std::string member;
                const std::string path = std::string(*trace_field(line, "path")) + "-";
                for (char ch : path) {
                    if (ch == '-') {
                        if (bad.contains(member)) ++violations;
                        member.clear();
                    } else {
                        member.push_back(ch);
                    }
                }
            }
        }
    }
    const double elapsed = seconds_since(t0);
    std::ostringstream os;
    os << "blacklist exclusion over 50 runs: " << violations << " violations in "
       << selections << " route selections (" << blacklist_events << " blacklist events) in "
       << elapsed << " s";
    report("C4", violations == 0 && selections > 0 && blacklist_events > 0 && elapsed < 120.0,
           os.str());
}

void criterion_5_selection_oracle() {
    DetRng rng(20260808);
    int graphs = 0;
    int agreements = 0;
    while (graphs < 200) {
        const test::TestGraph g = test::random_graph(rng);
        const auto paths = test::all_simple_paths(g, 0, g.n - 1);
        std::vector<RouteEntry> entries;
        for (const auto& p : paths) entries.push_back(test::entry_for_path(g, p));
        const auto expected = test::brute_force_best(entries);
        const auto actual = select_route(entries);
        ++graphs;
        const bool same = expected.has_value() == actual.has_value() &&
                          (!expected || (expected->path == actual->path &&
                                         expected->path_score == actual->path_score));
        if (same) ++agreements;
    }
    report("C5", agreements == graphs,
           "route selection vs exhaustive path enumeration: " + std::to_string(agreements) +
               "/" + std::to_string(graphs) + " random graphs agree");
}

void criterion_6_ledger_semilattice() {
    DetRng rng(424242);
    const auto random_ledger = [&rng] {
        TrustLedger ledger;
        const int subjects = 1 + static_cast<int>(rng.uniform_int(4));
        for (int s = 0; s < subjects; ++s) {
            const NodeId subject{static_cast<std::uint32_t>(rng.uniform_int(6))};
            const int reporters = static_cast<int>(rng.uniform_int(4));
            for (int r = 0; r < reporters; ++r) {
                ledger.reports[subject].insert(
                    NodeId{static_cast<std::uint32_t>(rng.uniform_int(8))});
            }
            if (ledger.reports[subject].empty()) {
                ledger.reports.erase(subject);
            } else if (rng.uniform01() < 0.3) {
                ledger.blacklist.insert(subject);
            }
            ledger.neighbor_counts[subject] = 1 + static_cast<int>(rng.uniform_int(6));
        }
        return ledger;
    };

    int pass = 0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
        const TrustLedger a = random_ledger();
        const TrustLedger b = random_ledger();
        const TrustLedger c = random_ledger();
        const bool idempotent = merge_ledgers(a, a) == a;
        const bool commutative = merge_ledgers(a, b) == merge_ledgers(b, a);
        const bool associative =
            merge_ledgers(merge_ledgers(a, b), c) == merge_ledgers(a, merge_ledgers(b, c));
        if (idempotent && commutative && associative) ++pass;
    }
    report("C6", pass == trials,
           "ledger merge semilattice laws: " + std::to_string(pass) + "/" +
               std::to_string(trials) + " randomized triples");
}

// non-decreasing with at most one adjacent dip of bounded relative size
struct TrendOutcome {
    bool ok = true;
    std::string detail;
};

TrendOutcome check_trend(const std::vector<double>& values, double allowance) {
    TrendOutcome out;
    int violations = 0;
    std::ostringstream os;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] < values[i - 1]) {
            const double rel = (values[i - 1] - values[i]) / values[i - 1];
            ++violations;
            os << " dip " << rel * 100.0 << "% at step " << i;
            if (rel > allowance) out.ok = false;
        }
    }
    if (violations > 1) out.ok = false;
    out.detail = violations == 0 ? " (monotone)" : os.str();
    return out;
}

std::string series_str(const std::vector<double>& values) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ", ";
        os << values[i];
    }
    os << "]";
    return os.str();
}

void criteria_7_8_9_trends() {
    const auto t0 = std::chrono::steady_clock::now();
    SweepSpec spec;
    spec.node_counts = {10, 30, 50, 70, 100};
    spec.seeds = {1, 2, 3, 4, 5, 6, 7};
    const SweepResult result = run_sweep(multihop_base(), spec);
    const double elapsed = seconds_since(t0);

    std::map<std::pair<std::string, int>, MeanRow> by_point;
    for (const MeanRow& m : result.means) {
        by_point[{m.variant, m.node_count}] = m;
    }

    std::vector<double> proposed_delay, no_trust_delay, proposed_thr, no_trust_thr;
    bool all_present = !result.any_failed;
    for (int n : spec.node_counts) {
        const MeanRow& pp = by_point[{"proposed", n}];
        const MeanRow& nt = by_point[{"no_trust", n}];
        if (!pp.mean_delay_s || !nt.mean_delay_s) {
            all_present = false;
            continue;
        }
        proposed_delay.push_back(*pp.mean_delay_s);
        no_trust_delay.push_back(*nt.mean_delay_s);
        proposed_thr.push_back(pp.throughput_bps);
        no_trust_thr.push_back(nt.throughput_bps);
    }

    // C7: delay grows with network density (proposed variant)
    {
        TrendOutcome trend{false, " incomplete data"};
        if (all_present) trend = check_trend(proposed_delay, 0.05);
        std::ostringstream os;
        os << "mean delay across nodes " << series_str(proposed_delay) << trend.detail
           << "; sweep of " << result.rows.size() << " runs took " << elapsed << " s";
        report("C7", all_present && trend.ok && elapsed < 600.0, os.str());
    }

    // C8: the trust-checking variant pays at least as much delay everywhere
    {
        bool ordered = all_present;
        std::ostringstream os;
        os << "delay proposed vs no_trust:";
        for (std::size_t i = 0; i < proposed_delay.size(); ++i) {
            const bool ok = proposed_delay[i] >= no_trust_delay[i];
            ordered = ordered && ok;
            os << " N=" << spec.node_counts[i] << (ok ? " >=" : " <!") << " ("
               << proposed_delay[i] - no_trust_delay[i] << ")";
        }
        report("C8", ordered, os.str());
    }

    // C9: throughput rises with node count, and trust recovers throughput
    {
        TrendOutcome trend{false, " incomplete data"};
        if (all_present) trend = check_trend(proposed_thr, 0.05);
        bool ordered = all_present;
        std::ostringstream os;
        os << "throughput across nodes " << series_str(proposed_thr) << trend.detail
           << "; proposed vs no_trust:";
        for (std::size_t i = 0; i < proposed_thr.size(); ++i) {
            const bool ok = proposed_thr[i] >= no_trust_thr[i];
            ordered = ordered && ok;
            os << " N=" << spec.node_counts[i] << (ok ? " >=" : " <!");
        }
        report("C9", all_present && trend.ok && ordered, os.str());
    }
}

void criterion_10_determinism() {
    std::vector<ScenarioConfig> configs;

    ScenarioConfig a = multihop_base();
    a.node_count = 30;
    a.rng_seed = 3;
    configs.push_back(a);

    ScenarioConfig b = multihop_base();
    b.node_count = 50;
    b.rng_seed = 7;
    b.protocol_variant = ProtocolVariant::no_trust;
    configs.push_back(b);

    ScenarioConfig c;  // default single-hop clique, shortened
    c.node_count = 40;
    c.run_time_s = 15.0;
    c.rng_seed = 11;
    c.backoff_jitter_frac = 0.2;  // jitter draws must replay identically too
    configs.push_back(c);

    bool all_equal = true;
    std::ostringstream os;
    os << "trace hashes:";
    RunOptions opts;
    opts.keep_trace = false;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const RunResult first = run_scenario(configs[i], opts);
        const RunResult second = run_scenario(configs[i], opts);
        const bool same =
            first.trace_hash == second.trace_hash && first.trace_lines == second.trace_lines;
        all_equal = all_equal && same;
        char hex[20];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(first.trace_hash));
        os << " cfg" << i + 1 << "=" << hex << (same ? " (repeatable)" : " (MISMATCH)");
    }
    report("C10", all_equal, os.str());
}

}  // namespace

int main() {
    criterion_1_formula_suite();
    criterion_2_switching_constant();
    criterion_3_majority_threshold();
    criterion_4_blacklist_exclusion();
    criterion_5_selection_oracle();
    criterion_6_ledger_semilattice();
    criteria_7_8_9_trends();
    criterion_10_determinism();

    if (failures == 0) {
        std::cout << "acceptance: all criteria passed\n";
    } else {
        std::cout << "acceptance: " << failures << " criterion(s) failed\n";
    }
    return failures;
}
