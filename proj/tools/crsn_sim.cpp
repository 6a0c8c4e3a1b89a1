// Command-line front end: single runs, node-count sweeps, and the formula
// verification table.
//
//   crsn_sim run    --config scenario.json --seed 1 --out out/
//   crsn_sim sweep  --config scenario.json --nodes 10,30,50,70,100 \
//                   --seeds 1,2,3,4,5 --variants proposed,no_trust --out out/
//   crsn_sim verify

#include "crsn/metrics.hpp"
#include "crsn/scenario.hpp"
#include "crsn/sim.hpp"
#include "crsn/sweep.hpp"
#include "crsn/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 1;
constexpr int kExitMissingFile = 2;
constexpr int kExitRunFailures = 3;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int load_or_fail(const std::string& path, crsn::ScenarioConfig& cfg) {
    try {
        cfg = crsn::load_config_file(path);
    } catch (const std::system_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitMissingFile;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    }
    const std::vector<std::string> violations = crsn::validate_scenario(cfg);
    if (!violations.empty()) {
        for (const std::string& v : violations) {
            std::cerr << "error: " << v << "\n";
        }
        return kExitInvalidConfig;
    }
    return kExitOk;
}

int cmd_run(const std::string& config_path, std::uint64_t seed, bool seed_set,
            const std::string& out_dir) {
    crsn::ScenarioConfig cfg;
    if (const int rc = load_or_fail(config_path, cfg); rc != kExitOk) return rc;
    if (seed_set) cfg.rng_seed = seed;

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << out_dir << "\n";
        return kExitInvalidConfig;
    }

    std::ofstream trace_file(out_dir + "/trace.txt");
    if (!trace_file) {
        std::cerr << "error: cannot open " << out_dir << "/trace.txt for writing\n";
        return kExitInvalidConfig;
    }

    crsn::RunOptions opts;
    opts.keep_trace = false;
    opts.trace_out = &trace_file;
    crsn::RunResult result;
    try {
        result = crsn::run_scenario(cfg, opts);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    }

    crsn::SummaryRow row;
    row.variant = crsn::to_string(cfg.protocol_variant);
    row.node_count = cfg.node_count;
    row.seed = cfg.rng_seed;
    row.mean_delay_s = result.metrics.mean_e2e_delay_s;
    row.throughput_bps = result.metrics.throughput_bps;
    row.blacklisted_count = result.metrics.blacklisted_nodes;

    std::ofstream summary(out_dir + "/summary.csv");
    summary << crsn::summary_csv_header() << "\n" << crsn::summary_csv_row(row) << "\n";

    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(result.trace_hash));
    std::cout << "run complete: generated=" << result.metrics.generated_count
              << " delivered=" << result.metrics.delivered_count
              << " dropped=" << result.metrics.dropped_count
              << " blacklisted=" << result.metrics.blacklisted_nodes
              << " trace_hash=" << hash << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& nodes_list,
              const std::string& seeds_list, const std::string& variants_list,
              const std::string& out_dir) {
    crsn::ScenarioConfig cfg;
    if (const int rc = load_or_fail(config_path, cfg); rc != kExitOk) return rc;

    crsn::SweepSpec spec;
    try {
        if (!nodes_list.empty()) {
            spec.node_counts.clear();
            for (const std::string& s : split_list(nodes_list)) {
                spec.node_counts.push_back(std::stoi(s));
            }
        }
        if (!seeds_list.empty()) {
            spec.seeds.clear();
            for (const std::string& s : split_list(seeds_list)) {
                spec.seeds.push_back(std::stoull(s));
            }
        }
        if (!variants_list.empty()) {
            spec.variants.clear();
            for (const std::string& s : split_list(variants_list)) {
                spec.variants.push_back(crsn::variant_from_string(s));
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: invalid sweep list: " << e.what() << "\n";
        return kExitInvalidConfig;
    }
    if (spec.node_counts.empty() || spec.seeds.empty() || spec.variants.empty()) {
        std::cerr << "error: sweep lists must be non-empty\n";
        return kExitInvalidConfig;
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << out_dir << "\n";
        return kExitInvalidConfig;
    }

    const crsn::SweepResult result = crsn::run_sweep(cfg, spec);

    std::ofstream summary(out_dir + "/summary.csv");
    summary << crsn::summary_csv_header() << "\n";
    for (const crsn::SummaryRow& row : result.rows) {
        summary << crsn::summary_csv_row(row) << "\n";
    }
    std::ofstream means(out_dir + "/means.csv");
    means << crsn::means_csv_header() << "\n";
    for (const crsn::MeanRow& row : result.means) {
        means << crsn::means_csv_row(row) << "\n";
    }

    int failures = 0;
    for (const crsn::SummaryRow& row : result.rows) {
        if (row.failed) {
            ++failures;
            std::cerr << "run failed: variant=" << row.variant
                      << " nodes=" << row.node_count << " seed=" << row.seed << ": "
                      << row.error << "\n";
        }
    }
    std::cout << "sweep complete: " << result.rows.size() << " runs, " << failures
              << " failed; wrote " << out_dir << "/summary.csv and " << out_dir
              << "/means.csv\n";
    return failures == 0 ? kExitOk : kExitRunFailures;
}

int cmd_verify() {
    const std::vector<crsn::CheckResult> results = crsn::run_verify_checks();
    const bool ok = crsn::print_verify_report(results, std::cout);
    return ok ? kExitOk : kExitInvalidConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Trust- and spectrum-aware reactive routing simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;

    CLI::App* run = app.add_subcommand("run", "execute one scenario run");
    run->add_option("--config", config_path, "scenario JSON file")->required();
    run->add_option("--seed", seed, "override sim.rng_seed")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_option("--out", out_dir, "output directory (trace.txt, summary.csv)");

    std::string nodes_list;
    std::string seeds_list;
    std::string variants_list;
    CLI::App* sweep = app.add_subcommand("sweep", "run a node-count/seed/variant sweep");
    sweep->add_option("--config", config_path, "scenario JSON file")->required();
    sweep->add_option("--nodes", nodes_list, "comma-separated node counts");
    sweep->add_option("--seeds", seeds_list, "comma-separated seeds");
    sweep->add_option("--variants", variants_list, "comma-separated variants");
    sweep->add_option("--out", out_dir, "output directory (summary.csv, means.csv)");

    CLI::App* verify = app.add_subcommand("verify", "evaluate the formula check table");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, seed, seed_set, out_dir);
    if (sweep->parsed()) return cmd_sweep(config_path, nodes_list, seeds_list, variants_list, out_dir);
    if (verify->parsed()) return cmd_verify();
    return kExitOk;
}
