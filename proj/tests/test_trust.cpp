#include "crsn/trust.hpp"

#include "crsn/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace crsn;

namespace {

TrustLedger random_ledger(DetRng& rng) {
    TrustLedger ledger;
    const int subjects = 1 + static_cast<int>(rng.uniform_int(4));
    for (int s = 0; s < subjects; ++s) {
        const NodeId subject{static_cast<std::uint32_t>(rng.uniform_int(6))};
        const int reporters = static_cast<int>(rng.uniform_int(4));
        for (int r = 0; r < reporters; ++r) {
            ledger.reports[subject].insert(NodeId{static_cast<std::uint32_t>(rng.uniform_int(8))});
        }
        if (!ledger.reports[subject].empty() && rng.uniform01() < 0.3) {
            ledger.blacklist.insert(subject);
        }
        if (ledger.reports[subject].empty()) {
            ledger.reports.erase(subject);
        }
        ledger.neighbor_counts[subject] = 1 + static_cast<int>(rng.uniform_int(6));
    }
    return ledger;
}

}  // namespace

TEST_CASE("if_value matches e^RN and the blacklist") {
    TrustLedger ledger;
    const NodeId x{7};
    CHECK(if_value(ledger, x).value() == 1.0);

    ledger.neighbor_counts[x] = 10;
    record_report(ledger, x, NodeId{1}, 0.0);
    CHECK(if_value(ledger, x).value() == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    record_report(ledger, x, NodeId{2}, 0.0);
    record_report(ledger, x, NodeId{3}, 0.0);
    CHECK(if_value(ledger, x).value() == doctest::Approx(std::exp(3.0)).epsilon(1e-12));

    ledger.blacklist.insert(x);
    CHECK(if_value(ledger, x).is_infinite());
}

TEST_CASE("record_report semantics") {
    TrustLedger ledger;
    const NodeId x{7};
    ledger.neighbor_counts[x] = 4;

    SUBCASE("self-report rejected") {
        const ReportResult r = record_report(ledger, x, x, 0.0);
        CHECK(r.status == ReportStatus::rejected_self_report);
        CHECK(ledger.report_count(x) == 0);
    }
    SUBCASE("duplicates collapse") {
        record_report(ledger, x, NodeId{1}, 0.0);
        const ReportResult r = record_report(ledger, x, NodeId{1}, 1.0);
        CHECK(r.status == ReportStatus::duplicate);
        CHECK_FALSE(r.propagate);
        CHECK(ledger.report_count(x) == 1);
    }
    SUBCASE("blacklisted reporters cannot frame") {
        ledger.reports[NodeId{9}].insert(NodeId{2});
        ledger.blacklist.insert(NodeId{9});
        const TrustLedger before = ledger;
        const ReportResult r = record_report(ledger, x, NodeId{9}, 0.0);
        CHECK(r.status == ReportStatus::ignored_blacklisted_reporter);
        CHECK(ledger == before);
    }
    SUBCASE("new reports propagate") {
        const ReportResult r = record_report(ledger, x, NodeId{1}, 0.0);
        CHECK(r.status == ReportStatus::recorded);
        CHECK(r.propagate);
    }
}

TEST_CASE("strict majority convicts") {
    TrustLedger ledger;
    const NodeId x{7};
    ledger.neighbor_counts[x] = 4;

    record_report(ledger, x, NodeId{1}, 0.0);
    ReportResult r = record_report(ledger, x, NodeId{2}, 0.0);
    CHECK(r.verdict == Verdict::trusted);  // exactly half
    CHECK_FALSE(ledger.is_blacklisted(x));

    r = record_report(ledger, x, NodeId{3}, 0.0);
    CHECK(r.verdict == Verdict::malicious);  // 3 of 4
    CHECK(r.newly_blacklisted);
    CHECK(ledger.is_blacklisted(x));
    CHECK(if_value(ledger, x).is_infinite());
}

TEST_CASE("two of three neighbors convict") {
    TrustLedger ledger;
    const NodeId x{7};
    ledger.neighbor_counts[x] = 3;
    record_report(ledger, x, NodeId{1}, 0.0);
    const ReportResult r = record_report(ledger, x, NodeId{2}, 0.0);
    CHECK(r.verdict == Verdict::malicious);
    CHECK(ledger.is_blacklisted(x));
}

TEST_CASE("verdict is invariant under report order") {
    const std::vector<NodeId> reporters = {NodeId{1}, NodeId{2}, NodeId{3}, NodeId{4}};
    std::vector<std::size_t> order = {0, 1, 2, 3};
    std::vector<bool> verdicts;
    do {
        TrustLedger ledger;
        ledger.neighbor_counts[NodeId{7}] = 5;
        for (std::size_t i : order) {
            record_report(ledger, NodeId{7}, reporters[i], 0.0);
        }
        verdicts.push_back(ledger.is_blacklisted(NodeId{7}));
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(std::all_of(verdicts.begin(), verdicts.end(), [&](bool v) { return v == verdicts[0]; }));
}

TEST_CASE("blacklist is absorbing and if_value is monotone over a run") {
    TrustLedger ledger;
    const NodeId x{3};
    ledger.neighbor_counts[x] = 50;
    double previous = if_value(ledger, x).value();
    for (std::uint32_t r = 0; r < 20; ++r) {
        record_report(ledger, x, NodeId{100 + r}, static_cast<double>(r));
        const IntruderFactor f = if_value(ledger, x);
        if (f.is_infinite()) break;
        CHECK(f.value() >= previous);
        previous = f.value();
    }
    ledger.blacklist.insert(x);
    CHECK(if_value(ledger, x).is_infinite());
    // still infinite after more reports arrive
    record_report(ledger, x, NodeId{200}, 99.0);
    CHECK(if_value(ledger, x).is_infinite());
}

TEST_CASE("merge_ledgers forms a join-semilattice") {
    DetRng rng(2024);
    for (int i = 0; i < 300; ++i) {
        const TrustLedger a = random_ledger(rng);
        const TrustLedger b = random_ledger(rng);
        const TrustLedger c = random_ledger(rng);
        CHECK(merge_ledgers(a, a) == a);
        CHECK(merge_ledgers(a, b) == merge_ledgers(b, a));
        CHECK(merge_ledgers(merge_ledgers(a, b), c) == merge_ledgers(a, merge_ledgers(b, c)));
    }
}

TEST_CASE("merge unions reporters across replicas") {
    TrustLedger a;
    record_report(a, NodeId{7}, NodeId{1}, 0.0);
    TrustLedger b;
    record_report(b, NodeId{7}, NodeId{2}, 0.0);
    const TrustLedger merged = merge_ledgers(a, b);
    CHECK(merged.report_count(NodeId{7}) == 2);
    CHECK(merge_ledgers(a, TrustLedger{}) == a);
}

TEST_CASE("ledger_slice carries just the subject") {
    TrustLedger ledger;
    ledger.neighbor_counts[NodeId{7}] = 3;
    record_report(ledger, NodeId{7}, NodeId{1}, 0.0);
    record_report(ledger, NodeId{8}, NodeId{2}, 0.0);
    const TrustLedger slice = ledger_slice(ledger, NodeId{7});
    CHECK(slice.reports.size() == 1);
    CHECK(slice.report_count(NodeId{7}) == 1);
    CHECK(merge_ledgers(ledger, slice) == ledger);
}
