#pragma once

#include <span>
#include <vector>

#include "cos/accuracy.hpp"
#include "cos/learner.hpp"
#include "cos/metrics.hpp"
#include "cos/scenario.hpp"

namespace cosim {

// Ground-truth view of one learner's arm set: its own functions with their
// costs, and each peer represented at its best own function. Only available
// in synthetic mode.
class OracleView {
public:
    struct PeerArm {
        int peer = 0;
        double cost = 0.0;
        std::vector<const AccuracyFunction*> functions;  // the peer's own functions
    };

    OracleView(std::vector<CostedArm> own, std::vector<const AccuracyFunction*> own_fns,
               std::vector<PeerArm> peers);

    static std::vector<OracleView> from_scenario(const Scenario& sc);

    std::size_t arm_count() const { return own_.size() + peers_.size(); }
    ArmId arm_at(int slot) const;

    // True accuracy-minus-cost of an arm at x; a peer plays its best own
    // function.
    double arm_value(ArmId arm, std::span<const double> x) const;

    // True value of what was actually played; for peer arms this uses the
    // function the peer really invoked rather than its best one.
    double realized_value(ArmId arm, int peer_function, std::span<const double> x) const;

private:
    std::vector<CostedArm> own_;
    std::vector<const AccuracyFunction*> own_fns_;
    std::vector<PeerArm> peers_;
};

struct OptimalChoice {
    ArmId arm;
    double value = 0.0;
};

// Context-wise argmax of accuracy minus cost. Ties resolve to the smallest
// arm slot (own functions first, then peers in id order).
OptimalChoice optimal_arm(const OracleView& v, std::span<const double> x);

struct RegretSeries {
    std::vector<double> instantaneous;  // one entry per slot, in log order
    std::vector<double> cumulative;     // prefix sums of the above
    double train_explore_total = 0.0;
    double exploit_total = 0.0;
    double realized_reward_total = 0.0;

    double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

// Recomputes the per-slot pseudo-regret of one learner from the logged
// contexts and choices. Requires synthetic mode.
RegretSeries pseudo_regret(const MetricsLog& log, const OracleView& v, int learner);

struct LearnerErrorMetrics {
    int learner = 0;
    std::uint64_t slots = 0;
    double error_pct = 0.0;
    double train_pct = 0.0;
    double explore_pct = 0.0;
    double exploit_pct = 0.0;
    std::uint64_t probe_count = 0;
};

// Table of error and phase percentages, one row per learner. Works in both
// synthetic and trace mode.
std::vector<LearnerErrorMetrics> error_rate_metrics(const MetricsLog& log);

} // namespace cosim
