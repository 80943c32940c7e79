#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cos/accuracy.hpp"
#include "cos/learner.hpp"
#include "cos/partition.hpp"
#include "cos/trace.hpp"

namespace cosim {

struct ArrivalSpec {
    enum class Kind { iid_uniform, concentrated_ball, from_trace, time_ramp };
    Kind kind = Kind::iid_uniform;
    std::vector<double> center;  // concentrated_ball
    double radius = 0.1;         // concentrated_ball
};

struct DelaySpec {
    enum class Law { fixed, uniform };
    Law law = Law::fixed;
    std::uint64_t l_max = 0;
    std::uint64_t value = 0;  // fixed law only
};

struct OwnFunctionSpec {
    std::optional<AccuracyFunction> accuracy;  // absent in trace mode
    double cost = 0.0;
};

struct LearnerSpec {
    std::vector<OwnFunctionSpec> functions;
    ArrivalSpec arrival;
};

// Full description of one simulation: population, ground truth, arrival and
// feedback model, and control parameters.
struct Scenario {
    int schema_version = 1;
    std::string name;
    int context_dim = 1;  // base dimensions, excluding the optional time axis
    double alpha = 1.0;
    double lipschitz = 1.0;
    std::uint64_t horizon = 1;
    int f_max = 1;
    std::uint64_t seed = 1;
    bool time_as_context = false;
    std::optional<DelaySpec> delay;
    std::optional<double> z_override;
    std::optional<int> m_t_override;
    std::vector<std::vector<double>> peer_costs;  // [caller][peer], diagonal unused
    std::vector<LearnerSpec> learners;
    std::string trace_path;  // nonempty selects trace mode

    int learner_count() const { return static_cast<int>(learners.size()); }
    bool trace_mode() const { return !trace_path.empty(); }
    int effective_dim() const { return context_dim + (time_as_context ? 1 : 0); }

    // Control parameters for a given horizon (doubling reuses this per phase).
    ControlConfig control_for(std::uint64_t horizon_slots) const;
    int slices_for(std::uint64_t horizon_slots) const;

    TraceSchema trace_schema() const;
};

// Structural and range validation; throws ConfigError with every problem
// found, one per line.
void validate_scenario(const Scenario& sc);

Scenario scenario_from_json_text(const std::string& text, const std::string& origin = "<inline>");
Scenario load_scenario(const std::string& path);

} // namespace cosim
