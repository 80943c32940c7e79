#include "cos/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "cos/errors.hpp"
#include "cos/oracle.hpp"
#include "cos/trace.hpp"

namespace cosim {

std::vector<PendingRevelation> apply_delayed_feedback(std::deque<PendingRevelation>& buffer, std::uint64_t t) {
    std::vector<PendingRevelation> due;
    for (auto it = buffer.begin(); it != buffer.end();) {
        if (it->due == t) {
            due.push_back(*it);
            it = buffer.erase(it);
        } else {
            ++it;
        }
    }
    return due;
}

namespace {

// One CoS instance over one horizon: all learner states, their random
// streams, and the in-flight feedback. Doubling runs create a fresh engine
// per phase.
class SimEngine {
public:
    SimEngine(const Scenario& sc, std::uint64_t phase_horizon, std::uint32_t phase_tag,
              const std::vector<OracleView>* views, TraceReader* trace, std::vector<double>& cum_regret)
        : sc_(sc), phase_horizon_(phase_horizon), views_(views), trace_(trace), cum_regret_(cum_regret) {
        const int m = sc.learner_count();
        partition_ = build_partition(sc.effective_dim(), sc.slices_for(phase_horizon));
        control_ = sc.control_for(phase_horizon);
        for (int i = 0; i < m; ++i) {
            std::vector<CostedArm> own;
            const auto& fns = sc.learners[static_cast<std::size_t>(i)].functions;
            for (std::size_t f = 0; f < fns.size(); ++f) {
                own.push_back(CostedArm{ArmId{ArmKind::own, static_cast<int>(f)}, fns[f].cost});
            }
            std::vector<CostedArm> peers;
            for (int k = 0; k < m; ++k) {
                if (k == i) continue;
                peers.push_back(CostedArm{ArmId{ArmKind::peer, k},
                                          sc.peer_costs[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]});
            }
            learners_.emplace_back(i, std::move(own), std::move(peers), partition_, control_);
            arrival_rng_.push_back(make_stream(sc.seed, i, Stream::arrival, phase_tag));
            decision_rng_.push_back(make_stream(sc.seed, i, Stream::decision, phase_tag));
            prediction_rng_.push_back(make_stream(sc.seed, i, Stream::prediction, phase_tag));
            delay_rng_.push_back(make_stream(sc.seed, i, Stream::delay, phase_tag));
        }
        pending_.resize(static_cast<std::size_t>(m));
        max_pending_.assign(static_cast<std::size_t>(m), 0);
    }

    const Partition& partition() const { return partition_; }
    const ControlConfig& control() const { return control_; }

    void step(std::uint64_t local_t, std::uint64_t global_t, int doubling_phase, MetricsLog& log) {
        const int m = sc_.learner_count();
        std::optional<TraceRow> row;
        if (trace_) {
            row = trace_->next();
            if (!row) {
                throw ConfigError("trace ended before the horizon: needed slot " + std::to_string(global_t));
            }
        }

        for (int i = 0; i < m; ++i) {
            Context x = row ? row->context : draw_context(i, local_t);
            const int label = row ? row->true_label : (uniform_double(arrival_rng_[static_cast<std::size_t>(i)]) < 0.5 ? 1 : 0);
            LearnerState& me = learners_[static_cast<std::size_t>(i)];
            const std::uint64_t cell = locate_linear(partition_, x);
            me.note_arrival(cell);

            const PeerCounterProbe probe = [&](int peer, std::uint64_t c) {
                return learners_[static_cast<std::size_t>(peer)].arrivals_in(c);
            };
            const Decision decision = decide(me, cell, local_t, probe, decision_rng_[static_cast<std::size_t>(i)]);

            StepRecord rec;
            rec.t = global_t;
            rec.doubling_phase = doubling_phase;
            rec.learner = i;
            rec.context = x;
            rec.cell = cell;
            rec.phase = decision.phase;
            rec.arm = decision.arm;
            rec.probes = decision.probes;
            rec.true_label = label;

            PendingRevelation rev;
            rev.learner = i;
            rev.decision = decision;

            if (decision.arm.kind == ArmKind::own) {
                const auto& fn = sc_.learners[static_cast<std::size_t>(i)]
                                     .functions[static_cast<std::size_t>(decision.arm.index)];
                rec.prediction = row ? row->predictions[static_cast<std::size_t>(i)]
                                                       [static_cast<std::size_t>(decision.arm.index)]
                                     : sample_prediction(prediction_rng_[static_cast<std::size_t>(i)],
                                                         *fn.accuracy, x, label);
            } else {
                const int k = decision.arm.index;
                LearnerState& server = learners_[static_cast<std::size_t>(k)];
                const ServeChoice choice =
                    serve_peer_request(server, x, local_t, decision_rng_[static_cast<std::size_t>(k)]);
                const auto& fn = sc_.learners[static_cast<std::size_t>(k)]
                                     .functions[static_cast<std::size_t>(choice.function_index)];
                rec.prediction = row ? row->predictions[static_cast<std::size_t>(k)]
                                                       [static_cast<std::size_t>(choice.function_index)]
                                     : sample_prediction(prediction_rng_[static_cast<std::size_t>(k)],
                                                         *fn.accuracy, x, label);
                rec.peer_function = choice.function_index;
                rev.server = k;
                rev.server_function = choice.function_index;
                rev.server_phase = choice.phase;
                rev.server_cell = choice.cell;
                rev.reward_for_server = reward(rec.prediction, label, fn.cost);
            }

            rec.reward = reward(rec.prediction, label, me.arm_cost(decision.arm));
            rev.reward_for_originator = rec.reward;

            if (views_) {
                const OracleView& view = (*views_)[static_cast<std::size_t>(i)];
                const OptimalChoice opt = optimal_arm(view, x);
                rec.has_oracle = true;
                rec.oracle_arm = opt.arm;
                rec.oracle_value = opt.value;
                rec.chosen_value = view.realized_value(rec.arm, rec.peer_function, x);
                rec.inst_regret = opt.value - rec.chosen_value;
                cum_regret_[static_cast<std::size_t>(i)] += rec.inst_regret;
                rec.cum_regret = cum_regret_[static_cast<std::size_t>(i)];
            }

            rev.due = local_t + draw_delay(i);
            auto& buf = pending_[static_cast<std::size_t>(i)];
            buf.push_back(rev);
            max_pending_[static_cast<std::size_t>(i)] =
                std::max(max_pending_[static_cast<std::size_t>(i)], static_cast<std::uint64_t>(buf.size()));

            log.records.push_back(std::move(rec));
        }

        // The truth comes last in the slot: apply every revelation due now,
        // in enqueue order.
        for (int i = 0; i < m; ++i) {
            for (const auto& rev : apply_delayed_feedback(pending_[static_cast<std::size_t>(i)], local_t)) {
                LearnerState& me = learners_[static_cast<std::size_t>(rev.learner)];
                if (rev.decision.phase == Phase::train) {
                    apply_train(me, rev.decision);
                } else {
                    apply_reward_update(me, rev.decision, rev.reward_for_originator);
                }
                if (rev.server >= 0) {
                    Decision server_update;
                    server_update.phase = rev.server_phase;
                    server_update.arm = ArmId{ArmKind::own, rev.server_function};
                    server_update.cell = rev.server_cell;
                    apply_reward_update(learners_[static_cast<std::size_t>(rev.server)], server_update,
                                        rev.reward_for_server);
                }
            }
        }
    }

    void finish(MetricsLog& log) const {
        log.final_stats.clear();
        log.stats_entries_per_learner.clear();
        log.max_pending_per_learner = max_pending_;
        for (const auto& me : learners_) {
            log.stats_entries_per_learner.push_back(me.stats_entry_count());
            for (const auto& [cell, arm, stats] : me.snapshot_stats()) {
                log.final_stats.push_back(ArmCellSnapshot{me.id(), arm, cell, stats});
            }
        }
    }

private:
    Context draw_context(int learner, std::uint64_t local_t) {
        const auto& arrival = sc_.learners[static_cast<std::size_t>(learner)].arrival;
        Rng& rng = arrival_rng_[static_cast<std::size_t>(learner)];
        Context x(static_cast<std::size_t>(sc_.effective_dim()));
        switch (arrival.kind) {
            case ArrivalSpec::Kind::iid_uniform:
                for (auto& v : x) v = uniform_double(rng);
                break;
            case ArrivalSpec::Kind::concentrated_ball: {
                const auto& c = arrival.center;
                const double r = arrival.radius;
                while (true) {
                    double sq = 0.0;
                    for (std::size_t j = 0; j < c.size(); ++j) {
                        const double lo = std::max(0.0, c[j] - r);
                        const double hi = std::min(1.0, c[j] + r);
                        x[j] = lo + (hi - lo) * uniform_double(rng);
                        sq += (x[j] - c[j]) * (x[j] - c[j]);
                    }
                    if (sq <= r * r) break;
                }
                break;
            }
            case ArrivalSpec::Kind::time_ramp:
                for (std::size_t j = 0; j + 1 < x.size(); ++j) x[j] = uniform_double(rng);
                x.back() = static_cast<double>(local_t) / static_cast<double>(phase_horizon_);
                break;
            case ArrivalSpec::Kind::from_trace:
                throw std::logic_error("from_trace arrivals must come from the trace reader");
        }
        return x;
    }

    std::uint64_t draw_delay(int learner) {
        if (!sc_.delay) return 0;
        if (sc_.delay->law == DelaySpec::Law::fixed) return sc_.delay->value;
        return uniform_index(delay_rng_[static_cast<std::size_t>(learner)],
                             static_cast<std::size_t>(sc_.delay->l_max) + 1);
    }

    const Scenario& sc_;
    std::uint64_t phase_horizon_;
    const std::vector<OracleView>* views_;
    TraceReader* trace_;
    std::vector<double>& cum_regret_;
    Partition partition_;
    ControlConfig control_;
    std::vector<LearnerState> learners_;
    std::vector<Rng> arrival_rng_, decision_rng_, prediction_rng_, delay_rng_;
    std::vector<std::deque<PendingRevelation>> pending_;
    std::vector<std::uint64_t> max_pending_;
};

MetricsLog run_impl(const Scenario& sc, std::uint64_t total_horizon, bool doubling) {
    validate_scenario(sc);

    MetricsLog log;
    log.info.seed = sc.seed;
    log.info.horizon = total_horizon;
    log.info.learner_count = sc.learner_count();
    log.info.doubling = doubling;
    log.info.trace_mode = sc.trace_mode();
    log.records.reserve(static_cast<std::size_t>(total_horizon) * static_cast<std::size_t>(sc.learner_count()));

    std::optional<std::vector<OracleView>> views;
    if (!sc.trace_mode()) views = OracleView::from_scenario(sc);
    std::optional<TraceReader> trace;
    if (sc.trace_mode()) trace.emplace(sc.trace_path, sc.trace_schema());

    std::vector<double> cum_regret(static_cast<std::size_t>(sc.learner_count()), 0.0);

    if (!doubling) {
        SimEngine engine(sc, total_horizon, 0, views ? &*views : nullptr, trace ? &*trace : nullptr, cum_regret);
        log.info.slices = engine.partition().slices;
        log.info.cell_count = engine.partition().cell_count;
        log.info.z = engine.control().z;
        for (std::uint64_t t = 1; t <= total_horizon; ++t) engine.step(t, t, 0, log);
        engine.finish(log);
        return log;
    }

    std::uint64_t global_t = 0;
    std::uint32_t tau = 1;
    while (global_t < total_horizon) {
        const std::uint64_t phase_len = std::uint64_t{1} << tau;
        SimEngine engine(sc, phase_len, tau, views ? &*views : nullptr, trace ? &*trace : nullptr, cum_regret);
        log.info.slices = engine.partition().slices;
        log.info.cell_count = engine.partition().cell_count;
        log.info.z = engine.control().z;
        const std::uint64_t slots = std::min(phase_len, total_horizon - global_t);
        for (std::uint64_t local = 1; local <= slots; ++local) {
            ++global_t;
            engine.step(local, global_t, static_cast<int>(tau), log);
        }
        engine.finish(log);  // last phase's snapshot survives
        ++tau;
    }
    return log;
}

} // namespace

MetricsLog run(const Scenario& sc) { return run_impl(sc, sc.horizon, false); }

MetricsLog run_doubling(const Scenario& sc, std::uint64_t total_horizon) {
    if (total_horizon < 2) throw ConfigError("doubling runs need total horizon >= 2");
    return run_impl(sc, total_horizon, true);
}

} // namespace cosim
