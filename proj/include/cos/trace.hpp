#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace cosim {

// One replayed slot: shared context and label plus the precomputed prediction
// of every (learner, function) pair declared in the header.
struct TraceRow {
    std::uint64_t t = 0;
    std::vector<double> context;
    int true_label = 0;
    std::vector<std::vector<int>> predictions;  // [learner][function]
};

// Expected column layout, derived from the scenario.
struct TraceSchema {
    int context_dim = 1;
    std::vector<int> functions_per_learner;

    // "t,ctx_0,...,label,pred_0_0,pred_0_1,pred_1_0,..."
    std::string header_line() const;
};

// Streaming reader over the trace CSV. The header is validated against the
// schema on open; rows must carry t = 0,1,2,... strictly increasing.
class TraceReader {
public:
    TraceReader(const std::string& path, TraceSchema schema);

    // Next row, or nullopt at end of stream.
    std::optional<TraceRow> next();

    const TraceSchema& schema() const { return schema_; }

private:
    TraceSchema schema_;
    std::ifstream in_;
    std::string path_;
    std::uint64_t line_no_ = 0;
    bool first_row_ = true;
    std::uint64_t last_t_ = 0;
};

// Parses one data row against the schema; `line_no` is used in error
// messages only.
TraceRow parse_trace_row(const std::string& line, const TraceSchema& schema, std::uint64_t line_no);

// Writes header plus rows; used by tests and trace tooling.
void write_trace(const std::string& path, const TraceSchema& schema, const std::vector<TraceRow>& rows);

} // namespace cosim
