#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "cos/metrics.hpp"
#include "cos/scenario.hpp"

namespace cosim {

// A label that is still in flight: the decision it resolves, the originator's
// reward, and (for forwarded data) what the serving peer needs to update its
// own-function statistics once the label reaches it.
struct PendingRevelation {
    std::uint64_t due = 0;
    int learner = 0;
    Decision decision;
    double reward_for_originator = 0.0;
    int server = -1;  // serving peer, -1 when the learner used an own function
    int server_function = -1;
    Phase server_phase = Phase::explore;
    std::uint64_t server_cell = 0;
    double reward_for_server = 0.0;
};

// Removes and returns exactly the revelations scheduled for slot t, keeping
// enqueue order.
std::vector<PendingRevelation> apply_delayed_feedback(std::deque<PendingRevelation>& buffer, std::uint64_t t);

// Runs one full simulation: one context per learner per slot, decisions per
// the train/explore/exploit rule, synchronous peer calls, label revelation
// after the configured delay. Fully deterministic in the scenario seed.
MetricsLog run(const Scenario& sc);

// Horizon-free wrapper: restarts fresh instances over phases of length 2^tau
// (control parameters recomputed per phase) until total_horizon slots ran.
MetricsLog run_doubling(const Scenario& sc, std::uint64_t total_horizon);

} // namespace cosim
