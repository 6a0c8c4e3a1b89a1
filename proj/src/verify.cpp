#include "crsn/verify.hpp"

#include "crsn/delay.hpp"
#include "crsn/kinematics.hpp"
#include "crsn/routing.hpp"
#include "crsn/trace.hpp"
#include "crsn/trust.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace crsn {

namespace {

constexpr double kRelTol = 1e-9;

bool close(double expected, double actual) {
    if (expected == actual) return true;
    const double scale = std::max(std::abs(expected), std::abs(actual));
    if (scale < 1.0) {
        return std::abs(expected - actual) <= 1e-9;
    }
    return std::abs(expected - actual) <= kRelTol * scale;
}

class Table {
public:
    void numeric(const std::string& group, const std::string& name, double expected,
                 const std::function<double()>& fn) {
        CheckResult r{group, name, false, {}};
        try {
            const double actual = fn();
            r.pass = close(expected, actual);
            r.detail = "expected " + fmt_exact(expected) + ", got " + fmt_exact(actual);
        } catch (const std::exception& e) {
            r.detail = std::string("threw: ") + e.what();
        }
        results.push_back(std::move(r));
    }

    void exact(const std::string& group, const std::string& name, double expected,
               const std::function<double()>& fn) {
        CheckResult r{group, name, false, {}};
        try {
            const double actual = fn();
            r.pass = expected == actual;
            r.detail = "expected exactly " + fmt_exact(expected) + ", got " + fmt_exact(actual);
        } catch (const std::exception& e) {
            r.detail = std::string("threw: ") + e.what();
        }
        results.push_back(std::move(r));
    }

    void boolean(const std::string& group, const std::string& name,
                 const std::function<bool()>& fn) {
        CheckResult r{group, name, false, {}};
        try {
            r.pass = fn();
            r.detail = r.pass ? "holds" : "violated";
        } catch (const std::exception& e) {
            r.detail = std::string("threw: ") + e.what();
        }
        results.push_back(std::move(r));
    }

    std::vector<CheckResult> results;
};

// --- small helpers for the behavioral checks --------------------------------

MobilitySample vectors(Position a0, Position a1, Position b0, Position b1) {
    MobilitySample s;
    s.recv_pos = a0;
    s.send_pos = a1;
    s.dest_recv_pos = b0;
    s.dest_send_pos = b1;
    s.t_recv = 0.0;
    s.t_send = 0.9;
    s.tx_time_s = 0.1;
    return s;
}

ControlMessage make_rreq(NodeId origin, NodeId target, std::uint64_t seq,
                         std::vector<NodeId> path) {
    ControlMessage m;
    m.kind = MsgKind::rreq;
    m.origin = origin;
    m.target = target;
    m.seq = seq;
    m.forwarder = path.empty() ? origin : path.back();
    m.path = std::move(path);
    for (std::size_t i = 0; i + 1 < m.path.size(); ++i) {
        m.hop_metrics.push_back(
            make_link_metrics(2.0, 1.0, 1, IntruderFactor::finite(1.0)));
    }
    return m;
}

RreqView usable_view() {
    RreqView v;
    v.incoming = make_link_metrics(2.0, 1.0, 1, IntruderFactor::finite(1.0));
    return v;
}

ControlMessage make_rrep(std::vector<NodeId> path, std::size_t holder_index,
                         double per_link_nhdf = 2.0) {
    ControlMessage m;
    m.kind = MsgKind::rrep;
    m.origin = path.back();
    m.target = path.front();
    m.path = std::move(path);
    for (std::size_t i = 0; i + 1 < m.path.size(); ++i) {
        m.hop_metrics.push_back(
            make_link_metrics(per_link_nhdf, 1.0, 1, IntruderFactor::finite(1.0)));
    }
    m.rrep_index = holder_index;
    return m;
}

RouteEntry entry_with(std::vector<NodeId> path, double score) {
    RouteEntry e;
    e.destination = path.back();
    e.path = std::move(path);
    e.path_score = score;
    e.min_if = IntruderFactor::finite(1.0);
    return e;
}

}  // namespace

std::vector<CheckResult> run_verify_checks() {
    Table t;
    const double pi = std::numbers::pi;

    // ---- kinematics: RSSI distance -----------------------------------------
    {
        const double baseline = 20.0 * std::log10(4.0 * pi * 1.0 / 0.125);
        t.numeric("kinematics/distance_from_rssi", "loss_at_reference_baseline", 1.0, [=] {
            return distance_from_rssi(RadioParams{baseline, 2.0, 0.125, 1.0});
        });
        t.numeric("kinematics/distance_from_rssi", "plus_10_omega_decades", 10.0, [=] {
            return distance_from_rssi(RadioParams{baseline + 20.0, 2.0, 0.125, 1.0});
        });
        t.numeric("kinematics/distance_from_rssi", "loss_60db", 9.947183943243454, [] {
            return distance_from_rssi(RadioParams{60.0, 2.0, 0.125, 1.0});
        });
        // substitute the estimate back into the loss model
        t.numeric("kinematics/distance_from_rssi", "loss_60db_round_trip", 60.0, [] {
            const RadioParams p{60.0, 2.0, 0.125, 1.0};
            return path_loss_at_distance(distance_from_rssi(p), p);
        });
    }

    // ---- kinematics: direction angle ---------------------------------------
    t.numeric("kinematics/direction_angle", "parallel", 0.0, [] {
        return direction_angle(vectors({0, 0}, {1, 0}, {5, 5}, {6, 5}));
    });
    t.numeric("kinematics/direction_angle", "orthogonal", pi / 2.0, [] {
        return direction_angle(vectors({0, 0}, {1, 0}, {0, 0}, {0, 1}));
    });
    t.numeric("kinematics/direction_angle", "antiparallel", pi, [] {
        return direction_angle(vectors({0, 0}, {1, 0}, {0, 0}, {-1, 0}));
    });

    // ---- kinematics: displacement ------------------------------------------
    t.exact("kinematics/displacement", "zero_angle", 0.0, [] { return displacement(7.3, 0.0); });
    t.numeric("kinematics/displacement", "d10_theta1", 10.0, [] { return displacement(10.0, 1.0); });
    t.numeric("kinematics/displacement", "d2_theta_pi", 2.0 * pi,
              [=] { return displacement(2.0, pi); });

    // ---- kinematics: speed ---------------------------------------------------
    t.exact("kinematics/speed", "zero_displacement", 0.0, [] {
        return speed(vectors({4, 4}, {4, 4}, {0, 0}, {1, 1}));
    });
    t.numeric("kinematics/speed", "three_four_five", 5.0, [] {
        return speed(vectors({0, 0}, {3, 4}, {0, 0}, {1, 1}));
    });
    t.numeric("kinematics/speed", "constant_5mps_sample", 5.0, [] {
        // a node moving 5 m in a 1 s observation interval
        return speed(vectors({0, 0}, {5, 0}, {0, 0}, {1, 0}));
    });

    // ---- kinematics: transmit weight ----------------------------------------
    t.numeric("kinematics/transmit_weight", "range_500_unit_denominator", 500.0, [] {
        return transmit_weight(TransmitWeightInputs{500.0, 1.0, 1.0, 1.0});
    });
    t.numeric("kinematics/transmit_weight", "range_500_mixed", 1000.0, [] {
        return transmit_weight(TransmitWeightInputs{500.0, 2.0, 0.05, 5.0});
    });
    t.numeric("kinematics/transmit_weight", "zero_displacement_clamped", 5e8, [] {
        return transmit_weight(TransmitWeightInputs{500.0, 0.0, 1.0, 1.0});
    });

    // ---- delay: queuing -------------------------------------------------------
    t.exact("delay/queuing_delay", "empty_neighborhood", 0.0, [] {
        return queuing_delay(QueueInputs{2048.0, 0, 1e6});
    });
    t.numeric("delay/queuing_delay", "packet_2048b_4_neighbors", 0.008192, [] {
        return queuing_delay(QueueInputs{2048.0, 4, 1e6});
    });
    t.numeric("delay/queuing_delay", "doubling_neighbors_doubles", 0.016384, [] {
        return queuing_delay(QueueInputs{2048.0, 8, 1e6});
    });

    // ---- delay: back-off -------------------------------------------------------
    t.numeric("delay/backoff_delay", "half_collision_two_nodes", 4.0, [] {
        return backoff_delay(BackoffInputs{0.5, 2, 1.0});
    });
    t.numeric("delay/backoff_delay", "half_collision_three_nodes", 16.0 / 3.0, [] {
        return backoff_delay(BackoffInputs{0.5, 3, 2.0});
    });
    t.exact("delay/backoff_delay", "contention_free_floor", 0.01, [] {
        return backoff_delay(BackoffInputs{0.3, 1, 0.01});
    });

    // ---- delay: switching -------------------------------------------------------
    t.exact("delay/switching_delay", "same_channel", 0.0, [] {
        return switching_delay(SwitchInputs{make_channel(2), make_channel(2), 0.010});
    });
    t.numeric("delay/switching_delay", "three_steps_at_10ms", 0.030, [] {
        return switching_delay(SwitchInputs{make_channel(1), make_channel(4), 0.010});
    });
    t.exact("delay/switching_delay", "one_step_at_10ms_exact", 0.010, [] {
        return switching_delay(SwitchInputs{make_channel(1), make_channel(2), 0.010});
    });

    // ---- delay: link composition --------------------------------------------------
    t.exact("delay/link_delay", "all_zero", 0.0, [] { return link_delay(0.0, 0.0, 0.0); });
    t.numeric("delay/link_delay", "component_sum", 0.042192, [] {
        return link_delay(0.030, 0.008192, 0.004);
    });
    t.boolean("delay/link_delay", "argument_order_irrelevant", [] {
        const double a = link_delay(0.030, 0.008192, 0.004);
        const double b = link_delay(0.004, 0.030, 0.008192);
        const double c = link_delay(0.008192, 0.004, 0.030);
        return close(a, b) && close(a, c);
    });

    // ---- trust: intruder factor ------------------------------------------------
    t.exact("trust/if_value", "no_reports_is_one", 1.0, [] {
        TrustLedger ledger;
        return if_value(ledger, NodeId{7}).value();
    });
    t.numeric("trust/if_value", "one_report_is_e", 2.718281828459045, [] {
        TrustLedger ledger;
        ledger.neighbor_counts[NodeId{7}] = 10;  // below majority, stays finite
        record_report(ledger, NodeId{7}, NodeId{1}, 0.0);
        return if_value(ledger, NodeId{7}).value();
    });
    t.numeric("trust/if_value", "three_reports_is_e_cubed", 20.085536923187668, [] {
        TrustLedger ledger;
        ledger.neighbor_counts[NodeId{7}] = 10;  // below majority, stays finite
        record_report(ledger, NodeId{7}, NodeId{1}, 0.0);
        record_report(ledger, NodeId{7}, NodeId{2}, 0.0);
        record_report(ledger, NodeId{7}, NodeId{3}, 0.0);
        return if_value(ledger, NodeId{7}).value();
    });

    // ---- trust: reports -----------------------------------------------------------
    t.boolean("trust/record_report", "first_report_counts", [] {
        TrustLedger ledger;
        ledger.neighbor_counts[NodeId{7}] = 4;
        const ReportResult r = record_report(ledger, NodeId{7}, NodeId{1}, 1.0);
        return r.status == ReportStatus::recorded && ledger.report_count(NodeId{7}) == 1 &&
               close(if_value(ledger, NodeId{7}).value(), 2.718281828459045);
    });
    t.boolean("trust/record_report", "duplicate_report_ignored", [] {
        TrustLedger ledger;
        ledger.neighbor_counts[NodeId{7}] = 4;
        record_report(ledger, NodeId{7}, NodeId{1}, 1.0);
        const ReportResult r = record_report(ledger, NodeId{7}, NodeId{1}, 2.0);
        return r.status == ReportStatus::duplicate && ledger.report_count(NodeId{7}) == 1;
    });
    t.boolean("trust/record_report", "blacklisted_reporter_ignored", [] {
        TrustLedger ledger;
        ledger.reports[NodeId{9}].insert(NodeId{1});
        ledger.blacklist.insert(NodeId{9});
        const TrustLedger before = ledger;
        const ReportResult r = record_report(ledger, NodeId{7}, NodeId{9}, 1.0);
        return r.status == ReportStatus::ignored_blacklisted_reporter && ledger == before;
    });

    // ---- trust: majority rule --------------------------------------------------------
    t.boolean("trust/evaluate_malicious", "two_of_three_convicts", [] {
        TrustLedger ledger;
        ledger.neighbor_counts[NodeId{7}] = 3;
        record_report(ledger, NodeId{7}, NodeId{1}, 0.0);
        const ReportResult r = record_report(ledger, NodeId{7}, NodeId{2}, 0.0);
        return r.verdict == Verdict::malicious && ledger.is_blacklisted(NodeId{7}) &&
               if_value(ledger, NodeId{7}).is_infinite();
    });
    t.boolean("trust/evaluate_malicious", "exactly_half_is_trusted", [] {
        TrustLedger ledger;
        ledger.neighbor_counts[NodeId{7}] = 4;
        record_report(ledger, NodeId{7}, NodeId{1}, 0.0);
        const ReportResult r = record_report(ledger, NodeId{7}, NodeId{2}, 0.0);
        return r.verdict == Verdict::trusted && !ledger.is_blacklisted(NodeId{7});
    });
    t.boolean("trust/evaluate_malicious", "no_reports_trusted", [] {
        TrustLedger ledger;
        ledger.neighbor_counts[NodeId{7}] = 4;
        const EvalResult r = evaluate_malicious(ledger, NodeId{7});
        return r.verdict == Verdict::trusted &&
               if_value(ledger, NodeId{7}).value() == 1.0;
    });

    // ---- trust: ledger merge ------------------------------------------------------------
    t.boolean("trust/merge_ledgers", "empty_is_identity", [] {
        TrustLedger a;
        a.reports[NodeId{3}] = {NodeId{1}, NodeId{2}};
        a.blacklist.insert(NodeId{4});
        a.reports[NodeId{4}] = {NodeId{1}};
        a.neighbor_counts[NodeId{3}] = 5;
        return merge_ledgers(a, TrustLedger{}) == a && merge_ledgers(TrustLedger{}, a) == a;
    });
    t.boolean("trust/merge_ledgers", "commutative", [] {
        TrustLedger a;
        a.reports[NodeId{3}] = {NodeId{1}};
        a.neighbor_counts[NodeId{3}] = 2;
        TrustLedger b;
        b.reports[NodeId{3}] = {NodeId{2}};
        b.reports[NodeId{5}] = {NodeId{6}};
        b.neighbor_counts[NodeId{3}] = 4;
        return merge_ledgers(a, b) == merge_ledgers(b, a);
    });
    t.boolean("trust/merge_ledgers", "union_of_reporters", [] {
        TrustLedger a;
        record_report(a, NodeId{7}, NodeId{1}, 0.0);
        TrustLedger b;
        record_report(b, NodeId{7}, NodeId{2}, 0.0);
        return merge_ledgers(a, b).report_count(NodeId{7}) == 2;
    });

    // ---- routing: nhdf ---------------------------------------------------------------------
    t.numeric("routing/nhdf", "unit_ratio_unit_factor", 1.0, [] {
        return nhdf(3.0, 3.0, 4, IntruderFactor::finite(1.0));
    });
    t.numeric("routing/nhdf", "ratio2_channels3", 8.0, [] {
        return nhdf(2.0, 1.0, 3, IntruderFactor::finite(1.0));
    });
    t.exact("routing/nhdf", "infinite_factor_zeroes", 0.0, [] {
        return nhdf(2.0, 1.0, 3, IntruderFactor::infinite());
    });

    // ---- routing: rreq handling -----------------------------------------------------------
    t.boolean("routing/handle_rreq", "destination_neighbor_replies", [] {
        ProtocolState state;
        state.self = NodeId{2};
        RreqView view = usable_view();
        view.destination_is_neighbor = true;
        view.final_hop = make_link_metrics(2.0, 1.0, 1, IntruderFactor::finite(1.0));
        const RreqResult r =
            handle_rreq(state, make_rreq(NodeId{0}, NodeId{9}, 1, {NodeId{0}}), view);
        return r.action == RreqAction::handled && r.replies.size() == 1 &&
               r.replies[0].kind == MsgKind::rrep &&
               r.replies[0].path.back() == NodeId{9};
    });
    t.boolean("routing/handle_rreq", "duplicate_dropped", [] {
        ProtocolState state;
        state.self = NodeId{2};
        handle_rreq(state, make_rreq(NodeId{0}, NodeId{9}, 1, {NodeId{0}}), usable_view());
        const RreqResult second =
            handle_rreq(state, make_rreq(NodeId{0}, NodeId{9}, 1, {NodeId{0}, NodeId{1}}),
                        usable_view());
        return second.action == RreqAction::drop_duplicate;
    });
    t.boolean("routing/handle_rreq", "loop_dropped", [] {
        ProtocolState state;
        state.self = NodeId{2};
        const RreqResult r = handle_rreq(
            state, make_rreq(NodeId{0}, NodeId{9}, 5, {NodeId{0}, NodeId{2}, NodeId{1}}),
            usable_view());
        return r.action == RreqAction::drop_loop;
    });

    // ---- routing: rrep handling --------------------------------------------------------------
    t.boolean("routing/handle_rrep", "single_path_becomes_route", [] {
        RouteTable table;
        TrustLedger ledger;
        RrepView view{NodeId{0}, &ledger, 1.0};
        const RrepResult r =
            handle_rrep(table, make_rrep({NodeId{0}, NodeId{1}, NodeId{2}}, 0), view);
        return r.action == RrepAction::stored && r.installed.has_value() &&
               table[NodeId{2}].size() == 1;
    });
    t.boolean("routing/handle_rrep", "two_paths_both_stored", [] {
        RouteTable table;
        TrustLedger ledger;
        RrepView view{NodeId{0}, &ledger, 1.0};
        handle_rrep(table, make_rrep({NodeId{0}, NodeId{1}, NodeId{2}}, 0), view);
        handle_rrep(table, make_rrep({NodeId{0}, NodeId{3}, NodeId{2}}, 0, 3.0), view);
        return table[NodeId{2}].size() == 2;
    });
    t.boolean("routing/handle_rrep", "blacklisted_relay_discarded", [] {
        RouteTable table;
        TrustLedger ledger;
        ledger.blacklist.insert(NodeId{1});
        RrepView view{NodeId{0}, &ledger, 1.0};
        const RrepResult r =
            handle_rrep(table, make_rrep({NodeId{0}, NodeId{1}, NodeId{2}}, 0), view);
        return r.action == RrepAction::discarded_blacklisted && table.empty();
    });

    // ---- routing: path score ---------------------------------------------------------------
    t.numeric("routing/path_score", "sum_of_unit_links", 3.0, [] {
        const double values[] = {1.0, 1.0, 1.0};
        return path_score(values);
    });
    t.exact("routing/path_score", "zero_link_vetoes", 0.0, [] {
        const double values[] = {2.0, 0.0, 5.0};
        return path_score(values);
    });
    t.numeric("routing/path_score", "singleton", 8.0, [] {
        const double values[] = {8.0};
        return path_score(values);
    });

    // ---- routing: selection ---------------------------------------------------------------
    t.boolean("routing/select_route", "argmax_score", [] {
        const RouteEntry entries[] = {
            entry_with({NodeId{0}, NodeId{1}, NodeId{9}}, 3.0),
            entry_with({NodeId{0}, NodeId{2}, NodeId{9}}, 2.9),
        };
        const auto chosen = select_route(entries);
        return chosen.has_value() && chosen->path[1] == NodeId{1};
    });
    t.boolean("routing/select_route", "tie_prefers_fewer_hops", [] {
        const RouteEntry entries[] = {
            entry_with({NodeId{0}, NodeId{1}, NodeId{2}, NodeId{9}}, 3.0),
            entry_with({NodeId{0}, NodeId{3}, NodeId{9}}, 3.0),
        };
        const auto chosen = select_route(entries);
        return chosen.has_value() && chosen->path.size() == 3;
    });
    t.boolean("routing/select_route", "all_blacklisted_fails", [] {
        const RouteEntry entries[] = {
            entry_with({NodeId{0}, NodeId{1}, NodeId{9}}, 0.0),
            entry_with({NodeId{0}, NodeId{2}, NodeId{9}}, 0.0),
        };
        return !select_route(entries).has_value();
    });

    return t.results;
}

bool print_verify_report(const std::vector<CheckResult>& results, std::ostream& os) {
    std::size_t passed = 0;
    for (const CheckResult& r : results) {
        os << (r.pass ? "[PASS] " : "[FAIL] ") << r.group << " :: " << r.name;
        if (!r.pass) {
            os << "  (" << r.detail << ")";
        }
        os << '\n';
        if (r.pass) ++passed;
    }
    os << passed << "/" << results.size() << " checks passed\n";
    return passed == results.size();
}

}  // namespace crsn
