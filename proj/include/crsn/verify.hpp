// Closed-form check table for the metric, delay, trust, and routing
// operations: every check evaluates one documented input/output pair against
// the implementation at tight tolerance.
#pragma once

#include <string>
#include <vector>

namespace crsn {

struct CheckResult {
    std::string group;  // e.g. "kinematics/transmit_weight"
    std::string name;
    bool pass = false;
    std::string detail;  // expected vs actual, or a short explanation
};

// Runs the whole table. Numeric checks use relative tolerance 1e-9 (absolute
// 1e-9 near zero) unless the check demands exact equality.
std::vector<CheckResult> run_verify_checks();

// Prints one line per check plus a summary; returns true iff all pass.
bool print_verify_report(const std::vector<CheckResult>& results, std::ostream& os);

}  // namespace crsn
