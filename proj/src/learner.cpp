#include "cos/learner.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <tuple>

namespace cosim {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::train: return "train";
        case Phase::explore: return "explore";
        case Phase::exploit: return "exploit";
    }
    return "?";
}

LearnerState::LearnerState(int id, std::vector<CostedArm> own_arms, std::vector<CostedArm> peer_arms,
                           Partition partition, ControlConfig control)
    : id_(id),
      own_arms_(std::move(own_arms)),
      peer_arms_(std::move(peer_arms)),
      partition_(partition),
      control_(control) {}

int LearnerState::arm_slot(ArmId arm) const {
    if (arm.kind == ArmKind::own) {
        assert(arm.index >= 0 && arm.index < static_cast<int>(own_arms_.size()));
        return arm.index;
    }
    for (std::size_t i = 0; i < peer_arms_.size(); ++i) {
        if (peer_arms_[i].id.index == arm.index) return static_cast<int>(own_arms_.size() + i);
    }
    throw std::logic_error("unknown peer arm " + std::to_string(arm.index) + " for learner " +
                           std::to_string(id_));
}

ArmId LearnerState::arm_at(int slot) const {
    if (slot < static_cast<int>(own_arms_.size())) return own_arms_[static_cast<std::size_t>(slot)].id;
    return peer_arms_[static_cast<std::size_t>(slot) - own_arms_.size()].id;
}

double LearnerState::arm_cost(ArmId arm) const {
    if (arm.kind == ArmKind::own) return own_arms_[static_cast<std::size_t>(arm.index)].cost;
    return peer_arms_[static_cast<std::size_t>(arm_slot(arm)) - own_arms_.size()].cost;
}

LearnerState::CellBlock& LearnerState::cell_block(std::uint64_t cell) {
    auto [it, inserted] = cells_.try_emplace(cell);
    if (inserted) it->second.arms.resize(arm_count());
    return it->second;
}

void LearnerState::note_arrival(std::uint64_t cell) { ++cell_block(cell).arrivals; }

std::uint64_t LearnerState::arrivals_in(std::uint64_t cell) const {
    auto it = cells_.find(cell);
    return it == cells_.end() ? 0 : it->second.arrivals;
}

ArmStats& LearnerState::stats(std::uint64_t cell, ArmId arm) {
    return cell_block(cell).arms[static_cast<std::size_t>(arm_slot(arm))];
}

const ArmStats* LearnerState::find_stats(std::uint64_t cell, ArmId arm) const {
    auto it = cells_.find(cell);
    if (it == cells_.end()) return nullptr;
    return &it->second.arms[static_cast<std::size_t>(arm_slot(arm))];
}

std::uint64_t LearnerState::stats_entry_count() const {
    std::uint64_t n = 0;
    for (const auto& [cell, block] : cells_) n += block.arms.size();
    return n;
}

std::vector<std::tuple<std::uint64_t, ArmId, ArmStats>> LearnerState::snapshot_stats() const {
    std::vector<std::tuple<std::uint64_t, ArmId, ArmStats>> out;
    out.reserve(stats_entry_count());
    std::vector<std::uint64_t> cells;
    cells.reserve(cells_.size());
    for (const auto& [cell, block] : cells_) cells.push_back(cell);
    std::sort(cells.begin(), cells.end());
    for (std::uint64_t cell : cells) {
        const auto& block = cells_.at(cell);
        for (int slot = 0; slot < static_cast<int>(block.arms.size()); ++slot) {
            out.emplace_back(cell, arm_at(slot), block.arms[static_cast<std::size_t>(slot)]);
        }
    }
    return out;
}

UnderexploredSet underexplored_set(const LearnerState& s, std::uint64_t cell, std::uint64_t t,
                                   const Thresholds& th) {
    (void)t;
    UnderexploredSet set;
    auto it = s.cells_.find(cell);
    const LearnerState::CellBlock* block = it == s.cells_.end() ? nullptr : &it->second;
    const auto count = [&](std::size_t slot) -> const ArmStats* {
        return block ? &block->arms[slot] : nullptr;
    };
    for (std::size_t i = 0; i < s.own_arms_.size(); ++i) {
        const ArmStats* st = count(i);
        const double n = st ? static_cast<double>(st->n_explore_exploit) : 0.0;
        if (n <= th.d1) set.own_explore.push_back(s.own_arms_[i].id);
    }
    for (std::size_t i = 0; i < s.peer_arms_.size(); ++i) {
        const ArmStats* st = count(s.own_arms_.size() + i);
        const double n1 = st ? static_cast<double>(st->n_peer_arrivals) : 0.0;
        const double n2 = st ? static_cast<double>(st->n_explore_exploit) : 0.0;
        if (n1 <= th.d2) {
            set.peer_train.push_back(s.peer_arms_[i].id);
        } else if (n2 <= th.d3) {
            set.peer_explore.push_back(s.peer_arms_[i].id);
        }
    }
    return set;
}

namespace {

ArmId pick_uniform(const std::vector<ArmId>& candidates, Rng& rng) {
    return candidates[uniform_index(rng, candidates.size())];
}

ArmId exploit_argmax(const LearnerState& s, std::uint64_t cell, Rng& rng) {
    double best = 0.0;
    std::vector<ArmId> winners;
    for (int slot = 0; slot < static_cast<int>(s.arm_count()); ++slot) {
        const ArmId arm = s.arm_at(slot);
        const ArmStats* st = s.find_stats(cell, arm);
        if (!st || !st->has_mean()) continue;  // unexplored arms never win
        if (winners.empty() || st->mean > best) {
            best = st->mean;
            winners.assign(1, arm);
        } else if (st->mean == best) {
            winners.push_back(arm);
        }
    }
    if (winners.empty()) {
        throw std::logic_error("exploitation reached with no sampled arm; threshold gating broken");
    }
    if (winners.size() == 1) return winners.front();
    return winners[uniform_index(rng, winners.size())];
}

} // namespace

Decision decide(LearnerState& s, std::uint64_t cell, std::uint64_t t, const PeerCounterProbe& probe, Rng& rng) {
    const Thresholds th = control_thresholds(t, s.control());
    UnderexploredSet set = underexplored_set(s, cell, t, th);

    if (!set.own_explore.empty()) {
        return Decision{Phase::explore, pick_uniform(set.own_explore, rng), cell, std::nullopt, 0};
    }

    int probes = 0;
    // Training candidates hold a stale local view of the peer's data count;
    // refresh each (in random order) before committing to a training slot.
    std::vector<ArmId> train = set.peer_train;
    while (!train.empty()) {
        const std::size_t pick = uniform_index(rng, train.size());
        const ArmId peer = train[pick];
        train.erase(train.begin() + static_cast<std::ptrdiff_t>(pick));
        const std::uint64_t peer_total = probe(peer.index, cell);
        ++probes;
        ArmStats& st = s.stats(cell, peer);
        assert(peer_total >= st.n_explore_exploit);
        st.n_peer_arrivals = peer_total - st.n_explore_exploit;
        if (static_cast<double>(st.n_peer_arrivals) <= th.d2) {
            return Decision{Phase::train, peer, cell, peer_total, probes};
        }
    }

    // Peer exploration considers every peer by its exploration counter, not
    // just the ones that skipped the training list.
    std::vector<ArmId> explore;
    for (const auto& peer : s.peer_arms()) {
        const ArmStats* st = s.find_stats(cell, peer.id);
        const double n2 = st ? static_cast<double>(st->n_explore_exploit) : 0.0;
        if (n2 <= th.d3) explore.push_back(peer.id);
    }
    if (!explore.empty()) {
        return Decision{Phase::explore, pick_uniform(explore, rng), cell, std::nullopt, probes};
    }

    return Decision{Phase::exploit, exploit_argmax(s, cell, rng), cell, std::nullopt, probes};
}

void apply_train(LearnerState& s, const Decision& d) {
    if (d.phase != Phase::train) throw std::logic_error("apply_train called with non-training decision");
    ++s.stats(d.cell, d.arm).n_peer_arrivals;
}

void apply_reward_update(LearnerState& s, const Decision& d, double reward_value) {
    if (d.phase == Phase::train) throw std::logic_error("apply_reward_update called with training decision");
    ArmStats& st = s.stats(d.cell, d.arm);
    st.mean = (static_cast<double>(st.reward_count) * st.mean + reward_value) /
              (static_cast<double>(st.reward_count) + 1.0);
    ++st.reward_count;
    ++st.n_explore_exploit;
}

ServeChoice serve_peer_request(LearnerState& s, std::span<const double> x, std::uint64_t t, Rng& rng) {
    const std::uint64_t cell = locate_linear(s.partition(), x);
    s.note_arrival(cell);
    const Thresholds th = control_thresholds(t, s.control());

    std::vector<ArmId> under;
    for (const auto& own : s.own_arms()) {
        const ArmStats* st = s.find_stats(cell, own.id);
        const double n = st ? static_cast<double>(st->n_explore_exploit) : 0.0;
        if (n <= th.d1) under.push_back(own.id);
    }
    if (!under.empty()) {
        return ServeChoice{pick_uniform(under, rng).index, Phase::explore, cell};
    }

    double best = 0.0;
    std::vector<ArmId> winners;
    for (const auto& own : s.own_arms()) {
        const ArmStats* st = s.find_stats(cell, own.id);
        if (!st || !st->has_mean()) continue;
        if (winners.empty() || st->mean > best) {
            best = st->mean;
            winners.assign(1, own.id);
        } else if (st->mean == best) {
            winners.push_back(own.id);
        }
    }
    if (winners.empty()) throw std::logic_error("peer serve fell through with no sampled own function");
    const ArmId arm = winners.size() == 1 ? winners.front() : winners[uniform_index(rng, winners.size())];
    return ServeChoice{arm.index, Phase::exploit, cell};
}

} // namespace cosim
