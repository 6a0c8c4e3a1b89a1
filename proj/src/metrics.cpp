#include "crsn/metrics.hpp"

#include "crsn/trace.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

namespace crsn {

std::optional<double> e2e_delay(std::span<const double> samples) {
    if (samples.empty()) {
        return std::nullopt;
    }
    double sum = 0.0;
    for (double s : samples) sum += s;
    return sum / static_cast<double>(samples.size());
}

double throughput_bps(std::uint64_t delivered_count, double packet_size_bits,
                      double run_time_s) {
    if (!(run_time_s > 0.0)) {
        throw std::invalid_argument("throughput_bps: run_time must be positive");
    }
    return static_cast<double>(delivered_count) * packet_size_bits / run_time_s;
}

std::optional<std::string_view> trace_field(std::string_view line, std::string_view key) {
    std::size_t pos = 0;
    while (pos < line.size()) {
        std::size_t end = line.find(' ', pos);
        if (end == std::string_view::npos) end = line.size();
        const std::string_view token = line.substr(pos, end - pos);
        const std::size_t eq = token.find('=');
        if (eq != std::string_view::npos && token.substr(0, eq) == key) {
            return token.substr(eq + 1);
        }
        pos = end + 1;
    }
    return std::nullopt;
}

TraceDerived recompute_from_trace(std::span<const std::string> lines,
                                  double packet_size_bits, double run_time_s) {
    TraceDerived out;
    for (const std::string& line : lines) {
        const auto ev = trace_field(line, "ev");
        if (!ev) continue;
        if (*ev == "gen") {
            ++out.generated;
        } else if (*ev == "deliver") {
            ++out.delivered;
            if (const auto delay = trace_field(line, "delay")) {
                out.delays_s.push_back(std::strtod(std::string(*delay).c_str(), nullptr));
            }
        }
    }
    out.mean_delay_s = e2e_delay(out.delays_s);
    out.throughput_bps =
        run_time_s > 0.0 ? throughput_bps(out.delivered, packet_size_bits, run_time_s) : 0.0;
    return out;
}

std::string summary_csv_header() {
    return "variant,node_count,seed,mean_delay_s,throughput_bps,blacklisted_count";
}

std::string summary_csv_row(const SummaryRow& row) {
    std::ostringstream os;
    os << row.variant << ',' << row.node_count << ',' << row.seed << ',';
    if (row.mean_delay_s) os << fmt_exact(*row.mean_delay_s);
    os << ',' << fmt_exact(row.throughput_bps) << ',' << row.blacklisted_count;
    return os.str();
}

std::string means_csv_header() {
    return "variant,node_count,mean_delay_s,throughput_bps,seeds";
}

std::string means_csv_row(const MeanRow& row) {
    std::ostringstream os;
    os << row.variant << ',' << row.node_count << ',';
    if (row.mean_delay_s) os << fmt_exact(*row.mean_delay_s);
    os << ',' << fmt_exact(row.throughput_bps) << ',' << row.seeds;
    return os.str();
}

std::vector<MeanRow> aggregate_means(std::span<const SummaryRow> rows) {
    struct Acc {
        double delay_sum = 0.0;
        int delay_n = 0;
        double thr_sum = 0.0;
        int n = 0;
    };
    std::map<std::pair<std::string, int>, Acc> acc;
    for (const SummaryRow& r : rows) {
        if (r.failed) continue;
        Acc& a = acc[{r.variant, r.node_count}];
        if (r.mean_delay_s) {
            a.delay_sum += *r.mean_delay_s;
            ++a.delay_n;
        }
        a.thr_sum += r.throughput_bps;
        ++a.n;
    }
    std::vector<MeanRow> out;
    for (const auto& [key, a] : acc) {
        MeanRow m;
        m.variant = key.first;
        m.node_count = key.second;
        if (a.delay_n > 0) m.mean_delay_s = a.delay_sum / a.delay_n;
        m.throughput_bps = a.n > 0 ? a.thr_sum / a.n : 0.0;
        m.seeds = a.n;
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace crsn
