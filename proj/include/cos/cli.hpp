#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cos/metrics.hpp"
#include "cos/oracle.hpp"
#include "cos/scenario.hpp"

namespace cosim {

// What one CLI invocation runs: a scenario, a list of master seeds, and the
// output layout.
struct RunConfig {
    Scenario scenario;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    bool doubling = false;
    std::uint64_t doubling_total = 0;  // defaults to scenario horizon
    bool full_curve = false;           // full-resolution regret curve
    bool write_logs = true;
    int threads = 0;  // 0 = decide from COS_THREADS / hardware
};

// Per-replication digest kept in memory for aggregation.
struct ReplicationSummary {
    std::uint64_t seed = 0;
    std::vector<LearnerErrorMetrics> metrics;           // per learner
    std::vector<double> final_cum_regret;               // per learner, empty in trace mode
    std::vector<double> realized_reward;                // per learner
    std::vector<std::vector<double>> curve;             // [learner][sample index], cum regret
};

struct AggregateResult {
    std::vector<std::uint64_t> sample_slots;
    std::vector<ReplicationSummary> replications;
    int learner_count = 0;
    bool trace_mode = false;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& csv);
std::vector<std::uint64_t> derive_seeds(std::uint64_t base, int count);

// <= max_points slot indices, logarithmically spaced over [1, horizon].
std::vector<std::uint64_t> log_spaced_slots(std::uint64_t horizon, std::size_t max_points);

// Digest of one finished run; shared by the live path and the CSV-reread
// path so both produce identical numbers.
ReplicationSummary summarize_records(const std::vector<StepRecord>& records, int learner_count,
                                     bool trace_mode, std::uint64_t seed,
                                     const std::vector<std::uint64_t>& sample_slots);

// Runs every seed (bounded worker pool), writes rep_<seed>.csv files, and
// returns the aggregate. Aggregation happens after all replications finish.
AggregateResult run_replications(const RunConfig& cfg);

void write_summary_csv(const std::string& path, const AggregateResult& agg);
void write_regret_curve_csv(const std::string& path, const AggregateResult& agg);

std::string replication_log_path(const std::string& out_dir, std::uint64_t seed);

// Worker-pool width: explicit request, else COS_THREADS, else hardware.
int resolve_thread_count(int requested, std::size_t jobs);

// Full command-line entry point; returns the process exit status.
int cli_main(int argc, const char* const* argv);

} // namespace cosim
