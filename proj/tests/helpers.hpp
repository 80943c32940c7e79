#pragma once

#include <vector>

#include "cos/scenario.hpp"

namespace cosim::testing {

// M learners with constant-accuracy functions and zero costs everywhere.
inline Scenario constant_scenario(const std::vector<std::vector<double>>& accuracies, std::uint64_t horizon,
                                  std::uint64_t seed = 1) {
    Scenario sc;
    sc.name = "constant";
    sc.context_dim = 1;
    sc.alpha = 1.0;
    sc.lipschitz = 1.0;
    sc.horizon = horizon;
    sc.seed = seed;
    int max_fns = 1;
    for (const auto& per_learner : accuracies) {
        LearnerSpec l;
        for (double acc : per_learner) {
            OwnFunctionSpec fn;
            fn.accuracy = ConstantAccuracy{acc};
            fn.cost = 0.0;
            l.functions.push_back(fn);
        }
        max_fns = std::max(max_fns, static_cast<int>(per_learner.size()));
        sc.learners.push_back(std::move(l));
    }
    sc.f_max = max_fns;
    const auto m = accuracies.size();
    sc.peer_costs.assign(m, std::vector<double>(m, 0.0));
    return sc;
}

// Mirrors the shipped table1_s1.json: four learners, two constant-accuracy
// functions each ({0.53,0.97}, {0.47,0.96}, {0.53,0.53}, {0.53,0.53}),
// every cost zero.
inline Scenario table1_s1(std::uint64_t horizon = 20000, std::uint64_t seed = 1) {
    Scenario sc = constant_scenario({{0.53, 0.97}, {0.47, 0.96}, {0.53, 0.53}, {0.53, 0.53}}, horizon, seed);
    sc.name = "table1_s1";
    return sc;
}

// Four learners with Hoelder-bump accuracies and arrivals concentrated in
// small balls (learner 1's sits inside one cell of the horizon-1e5
// partition). Learner 1's best arm is its own first function, with learner
// 2 close behind after the call cost, so the run exercises training,
// exploration and exploitation of both arm kinds.
inline Scenario bump_ball(std::uint64_t horizon = 100000, std::uint64_t seed = 1) {
    Scenario sc;
    sc.name = "bump_ball";
    sc.context_dim = 1;
    sc.alpha = 1.0;
    sc.lipschitz = 1.0;
    sc.horizon = horizon;
    sc.seed = seed;
    sc.f_max = 2;

    auto bump = [](double base, double amplitude, double center) {
        OwnFunctionSpec fn;
        fn.accuracy = HolderBump{base, amplitude, {center}, 1.0, 1.0};
        fn.cost = 0.0;
        return fn;
    };
    // values near x = 0.47: listed in the trailing comments
    LearnerSpec l0, l1, l2, l3;
    l0.functions = {bump(0.45, 0.25, 0.47),   // ~0.70 (the oracle arm for learner 0)
                    bump(0.30, 0.20, 0.90)};  // ~0.30
    l1.functions = {bump(0.42, 0.30, 0.45),   // ~0.70, runner-up at 0.60 after the 0.1 call cost
                    bump(0.40, 0.10, 0.20)};  // ~0.40
    l2.functions = {bump(0.40, 0.10, 0.50),   // ~0.47
                    bump(0.35, 0.10, 0.40)};  // ~0.38
    l3.functions = {bump(0.42, 0.08, 0.55),   // ~0.42
                    bump(0.30, 0.10, 0.45)};  // ~0.38
    for (auto* l : {&l0, &l1, &l2, &l3}) {
        l->arrival.kind = ArrivalSpec::Kind::concentrated_ball;
        l->arrival.center = {0.47};
        l->arrival.radius = 0.02;
    }
    // learners 2..4 draw contexts around the neighbouring cell boundary, so
    // their data only half-covers learner 1's cell and training requests are
    // actually needed early on
    for (auto* l : {&l1, &l2, &l3}) l->arrival.center = {0.445};
    sc.learners = {l0, l1, l2, l3};
    sc.peer_costs.assign(4, std::vector<double>(4, 0.1));
    for (int i = 0; i < 4; ++i) sc.peer_costs[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 0.0;
    return sc;
}

// Same population as bump_ball but every learner draws from the single-cell
// ball at 0.47. No cross-cell request traffic, so per-learner effects are
// isolated; training is unnecessary here because every peer sees the cell's
// full data stream.
inline Scenario bump_ball_shared(std::uint64_t horizon = 100000, std::uint64_t seed = 1) {
    Scenario sc = bump_ball(horizon, seed);
    sc.name = "bump_ball_shared";
    for (auto& l : sc.learners) l.arrival.center = {0.47};
    return sc;
}

} // namespace cosim::testing
