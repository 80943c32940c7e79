#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cos/learner.hpp"

namespace cosim {

// Everything observable about one (slot, learner) step. The CSV form keeps a
// fixed column subset; the in-memory form additionally carries the context
// and the oracle benchmark value.
struct StepRecord {
    std::uint64_t t = 0;  // global slot, 1-based
    int doubling_phase = 0;  // 0 outside doubling runs
    int learner = 0;
    std::vector<double> context;
    std::uint64_t cell = 0;
    Phase phase = Phase::explore;
    ArmId arm;
    int peer_function = -1;  // function the serving peer used; -1 for own arms
    int prediction = 0;
    int true_label = 0;
    double reward = 0.0;
    bool has_oracle = false;
    ArmId oracle_arm;
    double oracle_value = 0.0;  // best achievable accuracy-minus-cost at this context
    double chosen_value = 0.0;  // true accuracy-minus-cost of what was played
    double inst_regret = 0.0;
    double cum_regret = 0.0;  // running per-learner sum, in log order
    int probes = 0;
};

struct ArmCellSnapshot {
    int learner = 0;
    ArmId arm;
    std::uint64_t cell = 0;
    ArmStats stats;
};

struct RunInfo {
    std::uint64_t seed = 0;
    std::uint64_t horizon = 0;
    int learner_count = 0;
    int slices = 0;           // m of the partition (last phase for doubling runs)
    double z = 0.0;
    std::uint64_t cell_count = 0;
    bool doubling = false;
    bool trace_mode = false;
};

struct MetricsLog {
    RunInfo info;
    std::vector<StepRecord> records;
    std::vector<ArmCellSnapshot> final_stats;
    std::vector<std::uint64_t> stats_entries_per_learner;
    std::vector<std::uint64_t> max_pending_per_learner;  // delay-buffer high-water marks
};

std::string arm_token(ArmId arm);
ArmId arm_from_token(const std::string& token);

// Shortest round-trip decimal form of a double, so parsing the CSV recovers
// the exact bits that were written.
std::string format_double(double v);

std::string records_csv_header(bool doubling);
void write_records_csv(std::ostream& out, const MetricsLog& log);
void write_records_csv_file(const std::string& path, const MetricsLog& log);

// Reads a per-slot CSV back into records (context and oracle_value are not
// part of the file and stay empty/zero; has_oracle reflects field presence).
std::vector<StepRecord> read_records_csv(std::istream& in);
std::vector<StepRecord> read_records_csv_file(const std::string& path);

std::string records_to_csv_string(const MetricsLog& log);

} // namespace cosim
