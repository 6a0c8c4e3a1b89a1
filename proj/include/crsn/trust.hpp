// Replicated report ledger and intruder detection. Each node keeps a ledger
// view; views converge by merging ledger slices piggybacked on control
// messages. A node reported by a strict majority of its 1-hop neighborhood
// is blacklisted, and the blacklist is absorbing.
#pragma once

#include "crsn/types.hpp"

#include <map>
#include <set>

namespace crsn {

// Intruder determination factor: e^(report count), or the distinguished
// INFINITE value once the subject is blacklisted. Finite values are >= 1.
class IntruderFactor {
public:
    constexpr IntruderFactor() = default;

    static IntruderFactor finite(double v) { return IntruderFactor{v, false}; }
    static IntruderFactor infinite() { return IntruderFactor{0.0, true}; }
    static IntruderFactor from_report_count(int reports);

    bool is_infinite() const { return infinite_; }

    // Finite value; only meaningful when !is_infinite().
    double value() const { return value_; }

    friend bool operator==(const IntruderFactor& a, const IntruderFactor& b) {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }

private:
    constexpr IntruderFactor(double v, bool inf) : value_(v), infinite_(inf) {}

    double value_ = 1.0;
    bool infinite_ = false;
};

struct TrustLedger {
    // subject -> distinct reporters. The report count RN of a subject is the
    // size of its reporter set.
    std::map<NodeId, std::set<NodeId>> reports;
    std::set<NodeId> blacklist;
    // subject -> 1-hop neighborhood size observed when the subject was last
    // reported or advertised.
    std::map<NodeId, int> neighbor_counts;

    int report_count(NodeId subject) const {
        auto it = reports.find(subject);
        return it == reports.end() ? 0 : static_cast<int>(it->second.size());
    }

    bool is_blacklisted(NodeId n) const { return blacklist.contains(n); }

    friend bool operator==(const TrustLedger&, const TrustLedger&) = default;
};

enum class Verdict { trusted, malicious };

enum class ReportStatus {
    recorded,
    duplicate,
    rejected_self_report,
    ignored_blacklisted_reporter,
};

struct ReportResult {
    ReportStatus status = ReportStatus::recorded;
    bool propagate = false;          // broadcast intent for a newly recorded report
    Verdict verdict = Verdict::trusted;
    bool newly_blacklisted = false;  // warning-broadcast intent
};

struct EvalResult {
    Verdict verdict = Verdict::trusted;
    bool newly_blacklisted = false;
};

// e^RN for the subject, or INFINITE once blacklisted. A subject with no
// recorded reports yields 1.
IntruderFactor if_value(const TrustLedger& ledger, NodeId subject);

// Adds `reporter` to the subject's reporter set (idempotent) and then applies
// evaluate_malicious. Self-reports are rejected and reports from blacklisted
// reporters are ignored; neither mutates the ledger.
ReportResult record_report(TrustLedger& ledger, NodeId subject, NodeId reporter,
                           Timestamp now);

// Malicious iff distinct reporters exceed 50% of the subject's current 1-hop
// neighbor count (strictly greater). On conviction the subject enters the
// blacklist and a warning-broadcast intent is reported. Reporters are 1-hop
// neighbors by construction, so the effective neighborhood is never smaller
// than the reporter count.
EvalResult evaluate_malicious(TrustLedger& ledger, NodeId subject);

// Join of two ledger views: union of reporter sets and blacklists, max of
// neighborhood counts. Commutative, associative, idempotent.
TrustLedger merge_ledgers(const TrustLedger& a, const TrustLedger& b);

// Minimal slice of `ledger` describing one subject, for piggybacking on
// report/warning messages.
TrustLedger ledger_slice(const TrustLedger& ledger, NodeId subject);

}  // namespace crsn
