#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cos/partition.hpp"
#include "cos/rng.hpp"

namespace cosim {

enum class ArmKind : std::uint8_t { own, peer };

// One alternative of a learner: one of its own classification functions
// (index within its function list) or another learner (that learner's id).
struct ArmId {
    ArmKind kind = ArmKind::own;
    int index = 0;
    bool operator==(const ArmId&) const = default;
};

struct CostedArm {
    ArmId id;
    double cost = 0.0;  // normalized, in [0,1]
};

enum class Phase : std::uint8_t { train, explore, exploit };

const char* phase_name(Phase p);

// Per-(arm, cell) bookkeeping. For own arms n_explore_exploit is the plain
// selection count; for peer arms it counts only exploration/exploitation
// selections, while n_peer_arrivals estimates how much data the peer has
// seen in the cell (refreshed by counter probes, bumped by training sends).
struct ArmStats {
    std::uint64_t n_explore_exploit = 0;
    std::uint64_t n_peer_arrivals = 0;
    std::uint64_t reward_count = 0;
    double mean = 0.0;

    bool has_mean() const { return reward_count > 0; }
};

// Exploration-control configuration. Theorem defaults tie z and gamma to the
// smoothness exponent: z = 2a/(3a+d), gamma = 1/(3a+d).
struct ControlConfig {
    double z = 0.5;
    double gamma = 0.25;
    int f_max = 1;
    std::uint64_t horizon = 1;
};

struct Thresholds {
    double d1 = 0.0;  // own-function exploration
    double d2 = 0.0;  // peer training (f_max * d1)
    double d3 = 0.0;  // peer exploration
};

// D1 = t^z * ln t, D2 = f_max * D1, D3 = D1. All zero at t = 1.
inline Thresholds control_thresholds(std::uint64_t t, const ControlConfig& cfg) {
    const double td = static_cast<double>(t);
    const double d1 = std::pow(td, cfg.z) * std::log(td);
    return Thresholds{d1, static_cast<double>(cfg.f_max) * d1, d1};
}

struct Decision {
    Phase phase = Phase::explore;
    ArmId arm;
    std::uint64_t cell = 0;
    std::optional<std::uint64_t> synced_peer_count;  // peer arrival count obtained while training
    int probes = 0;                                  // counter probes performed this decision
};

// The under-explored arms of one cell, split by what they still need.
// A peer that needs training is listed there only; peer exploration candidacy
// is reported for peers whose training requirement already looks satisfied.
struct UnderexploredSet {
    std::vector<ArmId> own_explore;   // own k with N <= D1
    std::vector<ArmId> peer_train;    // peer k with N1 <= D2 (local estimate)
    std::vector<ArmId> peer_explore;  // peer k with N1 > D2 and N2 <= D3

    bool empty() const { return own_explore.empty() && peer_train.empty() && peer_explore.empty(); }
};

// Returns the peer's total arrival count in the probed cell.
using PeerCounterProbe = std::function<std::uint64_t(int peer, std::uint64_t cell)>;

// Complete bandit state of one learner. Stats blocks are created lazily per
// visited cell, so memory scales with (|own| + peers) * visited cells.
class LearnerState {
public:
    LearnerState(int id, std::vector<CostedArm> own_arms, std::vector<CostedArm> peer_arms,
                 Partition partition, ControlConfig control);

    int id() const { return id_; }
    const Partition& partition() const { return partition_; }
    const ControlConfig& control() const { return control_; }
    const std::vector<CostedArm>& own_arms() const { return own_arms_; }
    const std::vector<CostedArm>& peer_arms() const { return peer_arms_; }
    std::size_t arm_count() const { return own_arms_.size() + peer_arms_.size(); }

    // Arms laid out own-functions first, then peers; used for argmax order
    // and log encoding.
    int arm_slot(ArmId arm) const;
    ArmId arm_at(int slot) const;
    double arm_cost(ArmId arm) const;

    // Arrival accounting (data seen in a cell, own stream plus incoming
    // peer requests).
    void note_arrival(std::uint64_t cell);
    std::uint64_t arrivals_in(std::uint64_t cell) const;

    ArmStats& stats(std::uint64_t cell, ArmId arm);
    const ArmStats* find_stats(std::uint64_t cell, ArmId arm) const;

    // Number of ArmStats entries currently instantiated.
    std::uint64_t stats_entry_count() const;
    std::uint64_t visited_cell_count() const { return cells_.size(); }

    // Sorted (cell, arm, stats) dump of everything instantiated so far.
    std::vector<std::tuple<std::uint64_t, ArmId, ArmStats>> snapshot_stats() const;

    friend UnderexploredSet underexplored_set(const LearnerState& s, std::uint64_t cell, std::uint64_t t,
                                              const Thresholds& th);

private:
    struct CellBlock {
        std::uint64_t arrivals = 0;
        std::vector<ArmStats> arms;
    };

    CellBlock& cell_block(std::uint64_t cell);

    int id_;
    std::vector<CostedArm> own_arms_;
    std::vector<CostedArm> peer_arms_;
    Partition partition_;
    ControlConfig control_;
    std::unordered_map<std::uint64_t, CellBlock> cells_;
};

UnderexploredSet underexplored_set(const LearnerState& s, std::uint64_t cell, std::uint64_t t,
                                   const Thresholds& th);

// One pass of the per-slot decision rule for a context already located to
// `cell`: explore an under-sampled own function if any, otherwise resolve
// training needs (probing the peer's counter before committing to a training
// slot), otherwise explore an under-sampled peer, otherwise exploit the
// best sample mean. Candidate picks and ties are uniform draws from `rng`.
Decision decide(LearnerState& s, std::uint64_t cell, std::uint64_t t, const PeerCounterProbe& probe, Rng& rng);

// Training slots bump the peer-arrival estimate only; the observed reward is
// logged by the caller but never folded into the sample mean.
void apply_train(LearnerState& s, const Decision& d);

// Exploration and exploitation slots fold the reward into the running mean.
void apply_reward_update(LearnerState& s, const Decision& d, double reward_value);

// Arm choice a learner makes when another learner sends it data: it serves
// from its own functions only, exploring any that are under the D1 threshold
// and otherwise using its own-function argmax. Also counts the arrival.
struct ServeChoice {
    int function_index = 0;
    Phase phase = Phase::explore;  // explore or exploit, for the peer's own books
    std::uint64_t cell = 0;
};

ServeChoice serve_peer_request(LearnerState& s, std::span<const double> x, std::uint64_t t, Rng& rng);

} // namespace cosim
