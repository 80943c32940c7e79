#include "cos/oracle.hpp"

#include <stdexcept>

#include "cos/errors.hpp"

namespace cosim {

OracleView::OracleView(std::vector<CostedArm> own, std::vector<const AccuracyFunction*> own_fns,
                       std::vector<PeerArm> peers)
    : own_(std::move(own)), own_fns_(std::move(own_fns)), peers_(std::move(peers)) {}

std::vector<OracleView> OracleView::from_scenario(const Scenario& sc) {
    if (sc.trace_mode()) {
        throw ConfigError("oracle views are unavailable in trace mode; use error-rate metrics instead");
    }
    std::vector<OracleView> views;
    const int m = sc.learner_count();
    for (int i = 0; i < m; ++i) {
        const auto& me = sc.learners[static_cast<std::size_t>(i)];
        std::vector<CostedArm> own;
        std::vector<const AccuracyFunction*> own_fns;
        for (std::size_t f = 0; f < me.functions.size(); ++f) {
            own.push_back(CostedArm{ArmId{ArmKind::own, static_cast<int>(f)}, me.functions[f].cost});
            own_fns.push_back(&*me.functions[f].accuracy);
        }
        std::vector<PeerArm> peers;
        for (int k = 0; k < m; ++k) {
            if (k == i) continue;
            PeerArm pa;
            pa.peer = k;
            pa.cost = sc.peer_costs[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
            for (const auto& fn : sc.learners[static_cast<std::size_t>(k)].functions) {
                pa.functions.push_back(&*fn.accuracy);
            }
            peers.push_back(std::move(pa));
        }
        views.emplace_back(std::move(own), std::move(own_fns), std::move(peers));
    }
    return views;
}

ArmId OracleView::arm_at(int slot) const {
    if (slot < static_cast<int>(own_.size())) return own_[static_cast<std::size_t>(slot)].id;
    return ArmId{ArmKind::peer, peers_[static_cast<std::size_t>(slot) - own_.size()].peer};
}

double OracleView::arm_value(ArmId arm, std::span<const double> x) const {
    if (arm.kind == ArmKind::own) {
        const auto i = static_cast<std::size_t>(arm.index);
        return synth_accuracy(*own_fns_[i], x) - own_[i].cost;
    }
    for (const auto& pa : peers_) {
        if (pa.peer != arm.index) continue;
        double best = 0.0;
        bool first = true;
        for (const auto* fn : pa.functions) {
            const double acc = synth_accuracy(*fn, x);
            if (first || acc > best) best = acc;
            first = false;
        }
        return best - pa.cost;
    }
    throw std::logic_error("oracle view has no peer arm " + std::to_string(arm.index));
}

double OracleView::realized_value(ArmId arm, int peer_function, std::span<const double> x) const {
    if (arm.kind == ArmKind::own) return arm_value(arm, x);
    for (const auto& pa : peers_) {
        if (pa.peer != arm.index) continue;
        return synth_accuracy(*pa.functions[static_cast<std::size_t>(peer_function)], x) - pa.cost;
    }
    throw std::logic_error("oracle view has no peer arm " + std::to_string(arm.index));
}

OptimalChoice optimal_arm(const OracleView& v, std::span<const double> x) {
    OptimalChoice best{v.arm_at(0), v.arm_value(v.arm_at(0), x)};
    for (int slot = 1; slot < static_cast<int>(v.arm_count()); ++slot) {
        const ArmId arm = v.arm_at(slot);
        const double val = v.arm_value(arm, x);
        if (val > best.value) best = OptimalChoice{arm, val};
    }
    return best;
}

RegretSeries pseudo_regret(const MetricsLog& log, const OracleView& v, int learner) {
    if (log.info.trace_mode) {
        throw ConfigError("pseudo-regret is unavailable in trace mode; use error-rate metrics instead");
    }
    RegretSeries series;
    double cum = 0.0;
    for (const auto& r : log.records) {
        if (r.learner != learner) continue;
        const OptimalChoice opt = optimal_arm(v, r.context);
        const double chosen = v.realized_value(r.arm, r.peer_function, r.context);
        const double inst = opt.value - chosen;
        cum += inst;
        series.instantaneous.push_back(inst);
        series.cumulative.push_back(cum);
        if (r.phase == Phase::exploit) {
            series.exploit_total += inst;
        } else {
            series.train_explore_total += inst;
        }
        series.realized_reward_total += r.reward;
    }
    return series;
}

std::vector<LearnerErrorMetrics> error_rate_metrics(const MetricsLog& log) {
    std::vector<LearnerErrorMetrics> rows(static_cast<std::size_t>(log.info.learner_count));
    std::vector<std::uint64_t> errors(rows.size(), 0), trains(rows.size(), 0), explores(rows.size(), 0),
        exploits(rows.size(), 0);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].learner = static_cast<int>(i);
    for (const auto& r : log.records) {
        auto& row = rows[static_cast<std::size_t>(r.learner)];
        ++row.slots;
        row.probe_count += static_cast<std::uint64_t>(r.probes);
        if (r.prediction != r.true_label) ++errors[static_cast<std::size_t>(r.learner)];
        switch (r.phase) {
            case Phase::train: ++trains[static_cast<std::size_t>(r.learner)]; break;
            case Phase::explore: ++explores[static_cast<std::size_t>(r.learner)]; break;
            case Phase::exploit: ++exploits[static_cast<std::size_t>(r.learner)]; break;
        }
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double n = rows[i].slots ? static_cast<double>(rows[i].slots) : 1.0;
        rows[i].error_pct = 100.0 * static_cast<double>(errors[i]) / n;
        rows[i].train_pct = 100.0 * static_cast<double>(trains[i]) / n;
        rows[i].explore_pct = 100.0 * static_cast<double>(explores[i]) / n;
        rows[i].exploit_pct = 100.0 * static_cast<double>(exploits[i]) / n;
    }
    return rows;
}

} // namespace cosim
