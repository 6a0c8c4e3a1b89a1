#include "crsn/trust.hpp"

#include <algorithm>
#include <cmath>

namespace crsn {

IntruderFactor IntruderFactor::from_report_count(int reports) {
    return finite(std::exp(static_cast<double>(reports)));
}

IntruderFactor if_value(const TrustLedger& ledger, NodeId subject) {
    if (ledger.is_blacklisted(subject)) {
        return IntruderFactor::infinite();
    }
    return IntruderFactor::from_report_count(ledger.report_count(subject));
}

ReportResult record_report(TrustLedger& ledger, NodeId subject, NodeId reporter,
                           Timestamp /*now*/) {
    ReportResult result;
    if (reporter == subject) {
        result.status = ReportStatus::rejected_self_report;
        return result;
    }
    if (ledger.is_blacklisted(reporter)) {
        result.status = ReportStatus::ignored_blacklisted_reporter;
        return result;
    }
    const bool inserted = ledger.reports[subject].insert(reporter).second;
    result.status = inserted ? ReportStatus::recorded : ReportStatus::duplicate;
    result.propagate = inserted;

    const EvalResult eval = evaluate_malicious(ledger, subject);
    result.verdict = eval.verdict;
    result.newly_blacklisted = eval.newly_blacklisted;
    return result;
}

EvalResult evaluate_malicious(TrustLedger& ledger, NodeId subject) {
    EvalResult result;
    if (ledger.is_blacklisted(subject)) {
        result.verdict = Verdict::malicious;
        return result;
    }
    const int rn = ledger.report_count(subject);
    if (rn == 0) {
        return result;
    }
    auto it = ledger.neighbor_counts.find(subject);
    const int recorded = it == ledger.neighbor_counts.end() ? 0 : it->second;
    const int neighborhood = std::max(recorded, rn);
    // Strict majority: more than 50% of the neighborhood must have reported.
    if (2 * rn > neighborhood) {
        ledger.blacklist.insert(subject);
        result.verdict = Verdict::malicious;
        result.newly_blacklisted = true;
    }
    return result;
}

TrustLedger merge_ledgers(const TrustLedger& a, const TrustLedger& b) {
    TrustLedger out = a;
    for (const auto& [subject, reporters] : b.reports) {
        out.reports[subject].insert(reporters.begin(), reporters.end());
    }
    out.blacklist.insert(b.blacklist.begin(), b.blacklist.end());
    for (const auto& [subject, count] : b.neighbor_counts) {
        auto [it, inserted] = out.neighbor_counts.try_emplace(subject, count);
        if (!inserted) {
            it->second = std::max(it->second, count);
        }
    }
    return out;
}

TrustLedger ledger_slice(const TrustLedger& ledger, NodeId subject) {
    TrustLedger slice;
    if (auto it = ledger.reports.find(subject); it != ledger.reports.end()) {
        slice.reports.emplace(subject, it->second);
    }
    if (ledger.is_blacklisted(subject)) {
        slice.blacklist.insert(subject);
    }
    if (auto it = ledger.neighbor_counts.find(subject); it != ledger.neighbor_counts.end()) {
        slice.neighbor_counts.emplace(subject, it->second);
    }
    return slice;
}

}  // namespace crsn
