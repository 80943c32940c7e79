#include "cos/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cos/errors.hpp"

namespace cosim {

using nlohmann::json;

ControlConfig Scenario::control_for(std::uint64_t horizon_slots) const {
    ControlConfig cfg;
    const double denom = 3.0 * alpha + static_cast<double>(effective_dim());
    cfg.z = z_override.value_or(2.0 * alpha / denom);
    cfg.gamma = 1.0 / denom;
    cfg.f_max = f_max;
    cfg.horizon = horizon_slots;
    return cfg;
}

int Scenario::slices_for(std::uint64_t horizon_slots) const {
    if (m_t_override) return *m_t_override;
    return slicing_parameter(horizon_slots, alpha, context_dim, time_as_context);
}

TraceSchema Scenario::trace_schema() const {
    TraceSchema schema;
    schema.context_dim = context_dim;
    for (const auto& l : learners) schema.functions_per_learner.push_back(static_cast<int>(l.functions.size()));
    return schema;
}

namespace {

struct ErrorList {
    std::vector<std::string> errors;
    void add(const std::string& msg) { errors.push_back(msg); }
    void raise_if_any(const std::string& origin) const {
        if (errors.empty()) return;
        std::ostringstream out;
        out << origin << ": " << errors.size() << " validation error(s)";
        for (const auto& e : errors) out << "\n  - " << e;
        throw ConfigError(out.str());
    }
};

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

void check_accuracy(const AccuracyFunction& f, int dim, double scenario_scale, const std::string& where,
                    ErrorList& errs) {
    if (const auto* c = std::get_if<ConstantAccuracy>(&f)) {
        if (!in_unit(c->value)) errs.add(where + ": constant accuracy " + std::to_string(c->value) + " out of [0,1]");
    } else if (const auto* b = std::get_if<HolderBump>(&f)) {
        if (static_cast<int>(b->center.size()) != dim) {
            errs.add(where + ": holder_bump center has " + std::to_string(b->center.size()) +
                     " dims, context has " + std::to_string(dim));
        }
        if (!(b->exponent > 0.0)) errs.add(where + ": holder_bump exponent must be > 0");
        if (b->scale < 0.0) errs.add(where + ": holder_bump scale must be >= 0");
        const double cap = b->scale * std::pow(std::sqrt(static_cast<double>(dim)), b->exponent);
        if (std::abs(b->amplitude) > cap + 1e-12) {
            errs.add(where + ": holder_bump amplitude " + std::to_string(b->amplitude) +
                     " exceeds scale*sqrt(d)^exponent = " + std::to_string(cap));
        }
        (void)scenario_scale;
    } else if (const auto* g = std::get_if<PiecewiseGrid>(&f)) {
        if (g->dim != dim) {
            errs.add(where + ": piecewise_grid is " + std::to_string(g->dim) + "-dimensional, context has " +
                     std::to_string(dim));
        }
        if (g->points_per_dim < 1) errs.add(where + ": piecewise_grid needs points_per_dim >= 1");
        std::size_t expected = 1;
        for (int j = 0; j < g->dim; ++j) expected *= static_cast<std::size_t>(g->points_per_dim);
        if (g->values.size() != expected) {
            errs.add(where + ": piecewise_grid expects " + std::to_string(expected) + " values, got " +
                     std::to_string(g->values.size()));
        }
        for (double v : g->values) {
            if (!in_unit(v)) {
                errs.add(where + ": piecewise_grid value " + std::to_string(v) + " out of [0,1]");
                break;
            }
        }
    }
}

AccuracyFunction accuracy_from_json(const json& j, const std::string& where) {
    const std::string kind = j.value("kind", "");
    if (kind == "constant") {
        return ConstantAccuracy{j.at("value").get<double>()};
    }
    if (kind == "holder_bump") {
        HolderBump b;
        b.base = j.at("base").get<double>();
        b.amplitude = j.at("amplitude").get<double>();
        b.center = j.at("center").get<std::vector<double>>();
        b.exponent = j.value("exponent", 1.0);
        b.scale = j.value("scale", 1.0);
        return b;
    }
    if (kind == "piecewise_grid") {
        PiecewiseGrid g;
        g.dim = j.at("dim").get<int>();
        g.points_per_dim = j.at("points_per_dim").get<int>();
        g.values = j.at("values").get<std::vector<double>>();
        return g;
    }
    throw ConfigError(where + ": unknown accuracy kind '" + kind + "'");
}

ArrivalSpec arrival_from_json(const json& j, const std::string& where) {
    ArrivalSpec a;
    const std::string kind = j.value("kind", "iid_uniform");
    if (kind == "iid_uniform") {
        a.kind = ArrivalSpec::Kind::iid_uniform;
    } else if (kind == "concentrated_ball") {
        a.kind = ArrivalSpec::Kind::concentrated_ball;
        a.center = j.at("center").get<std::vector<double>>();
        a.radius = j.at("radius").get<double>();
    } else if (kind == "from_trace") {
        a.kind = ArrivalSpec::Kind::from_trace;
    } else if (kind == "time_ramp") {
        a.kind = ArrivalSpec::Kind::time_ramp;
    } else {
        throw ConfigError(where + ": unknown arrival kind '" + kind + "'");
    }
    return a;
}

} // namespace

void validate_scenario(const Scenario& sc) {
    ErrorList errs;
    const int m = sc.learner_count();
    if (m < 1) errs.add("at least one learner is required");
    if (sc.context_dim < 1) errs.add("context_dim must be >= 1");
    if (!(sc.alpha > 0.0)) errs.add("alpha must be > 0");
    if (!(sc.lipschitz > 0.0)) errs.add("lipschitz must be > 0");
    if (sc.horizon < 1) errs.add("horizon must be >= 1");
    if (sc.z_override && !(*sc.z_override > 0.0 && *sc.z_override < 1.0)) {
        errs.add("control.z must be in (0,1)");
    }
    if (sc.m_t_override && *sc.m_t_override < 1) errs.add("control.m_t must be >= 1");

    const int dim = sc.effective_dim();
    int max_fns = 0;
    for (int i = 0; i < m; ++i) {
        const auto& l = sc.learners[static_cast<std::size_t>(i)];
        const std::string lw = "learners[" + std::to_string(i) + "]";
        if (l.functions.empty()) errs.add(lw + ": every learner needs at least one classification function");
        max_fns = std::max(max_fns, static_cast<int>(l.functions.size()));
        for (std::size_t f = 0; f < l.functions.size(); ++f) {
            const auto& fn = l.functions[f];
            const std::string fw = lw + ".functions[" + std::to_string(f) + "]";
            if (!in_unit(fn.cost)) errs.add(fw + ": cost " + std::to_string(fn.cost) + " out of [0,1]");
            if (sc.trace_mode()) continue;
            if (!fn.accuracy) {
                errs.add(fw + ": accuracy spec required in synthetic mode");
            } else {
                check_accuracy(*fn.accuracy, dim, sc.lipschitz, fw, errs);
            }
        }
        switch (l.arrival.kind) {
            case ArrivalSpec::Kind::concentrated_ball:
                if (static_cast<int>(l.arrival.center.size()) != sc.context_dim) {
                    errs.add(lw + ".arrival: ball center has " + std::to_string(l.arrival.center.size()) +
                             " dims, context_dim is " + std::to_string(sc.context_dim));
                }
                for (double c : l.arrival.center) {
                    if (!in_unit(c)) {
                        errs.add(lw + ".arrival: ball center coordinate out of [0,1]");
                        break;
                    }
                }
                if (!(l.arrival.radius > 0.0)) errs.add(lw + ".arrival: ball radius must be > 0");
                break;
            case ArrivalSpec::Kind::from_trace:
                if (!sc.trace_mode()) errs.add(lw + ".arrival: from_trace requires a trace file");
                break;
            case ArrivalSpec::Kind::time_ramp:
                if (!sc.time_as_context) {
                    errs.add(lw + ".arrival: time_ramp requires time_as_context");
                }
                break;
            case ArrivalSpec::Kind::iid_uniform:
                break;
        }
        if (sc.time_as_context && l.arrival.kind == ArrivalSpec::Kind::from_trace) {
            errs.add(lw + ".arrival: trace replay cannot be combined with time_as_context");
        }
    }
    if (max_fns > sc.f_max) {
        errs.add("f_max = " + std::to_string(sc.f_max) + " is below the largest own-function count " +
                 std::to_string(max_fns));
    }
    if (sc.trace_mode() && sc.time_as_context) {
        errs.add("time_as_context is not available in trace mode");
    }

    if (static_cast<int>(sc.peer_costs.size()) != m) {
        errs.add("peer_costs must be an MxM matrix (M = " + std::to_string(m) + ")");
    } else {
        for (int i = 0; i < m; ++i) {
            if (static_cast<int>(sc.peer_costs[static_cast<std::size_t>(i)].size()) != m) {
                errs.add("peer_costs[" + std::to_string(i) + "] must have " + std::to_string(m) + " entries");
                continue;
            }
            for (int k = 0; k < m; ++k) {
                if (i == k) continue;
                const double c = sc.peer_costs[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
                if (!in_unit(c)) {
                    errs.add("peer_costs[" + std::to_string(i) + "][" + std::to_string(k) + "] = " +
                             std::to_string(c) + " out of [0,1]");
                }
            }
        }
    }

    if (sc.delay) {
        if (sc.delay->law == DelaySpec::Law::fixed && sc.delay->value > sc.delay->l_max) {
            errs.add("delay.value " + std::to_string(sc.delay->value) + " exceeds delay.l_max " +
                     std::to_string(sc.delay->l_max));
        }
    }

    // Make sure the partition itself is constructible.
    if (errs.errors.empty()) {
        try {
            build_partition(dim, sc.slices_for(sc.horizon));
        } catch (const ConfigError& e) {
            errs.add(e.what());
        }
    }

    errs.raise_if_any(sc.name.empty() ? "scenario" : sc.name);
}

Scenario scenario_from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    try {
        Scenario sc;
        sc.schema_version = j.value("schema_version", 1);
        sc.name = j.value("name", "");
        sc.context_dim = j.at("context_dim").get<int>();
        sc.alpha = j.at("alpha").get<double>();
        sc.lipschitz = j.value("lipschitz", 1.0);
        sc.horizon = j.at("horizon").get<std::uint64_t>();
        sc.f_max = j.at("f_max").get<int>();
        sc.seed = j.value("seed", std::uint64_t{1});
        sc.time_as_context = j.value("time_as_context", false);
        if (j.contains("delay")) {
            DelaySpec d;
            const auto& jd = j.at("delay");
            const std::string law = jd.value("law", "fixed");
            if (law == "fixed") {
                d.law = DelaySpec::Law::fixed;
                d.value = jd.value("value", std::uint64_t{0});
                d.l_max = jd.value("l_max", d.value);
            } else if (law == "uniform") {
                d.law = DelaySpec::Law::uniform;
                d.l_max = jd.at("l_max").get<std::uint64_t>();
            } else {
                throw ConfigError(origin + ": unknown delay law '" + law + "'");
            }
            sc.delay = d;
        }
        if (j.contains("control")) {
            const auto& jc = j.at("control");
            if (jc.contains("z") && !jc.at("z").is_null()) sc.z_override = jc.at("z").get<double>();
            if (jc.contains("m_t") && !jc.at("m_t").is_null()) sc.m_t_override = jc.at("m_t").get<int>();
        }
        sc.peer_costs = j.at("peer_costs").get<std::vector<std::vector<double>>>();
        int li = 0;
        for (const auto& jl : j.at("learners")) {
            LearnerSpec spec;
            const std::string lw = origin + ": learners[" + std::to_string(li) + "]";
            if (jl.contains("arrival")) spec.arrival = arrival_from_json(jl.at("arrival"), lw);
            int fi = 0;
            for (const auto& jf : jl.at("functions")) {
                OwnFunctionSpec fn;
                fn.cost = jf.value("cost", 0.0);
                if (jf.contains("accuracy")) {
                    fn.accuracy =
                        accuracy_from_json(jf.at("accuracy"), lw + ".functions[" + std::to_string(fi) + "]");
                }
                spec.functions.push_back(std::move(fn));
                ++fi;
            }
            sc.learners.push_back(std::move(spec));
            ++li;
        }
        if (sc.time_as_context) {
            for (auto& l : sc.learners) {
                if (l.arrival.kind == ArrivalSpec::Kind::iid_uniform) l.arrival.kind = ArrivalSpec::Kind::time_ramp;
            }
        }
        return sc;
    } catch (const json::exception& e) {
        throw ConfigError(origin + ": " + e.what());
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    Scenario sc = scenario_from_json_text(buf.str(), path);
    validate_scenario(sc);
    return sc;
}

} // namespace cosim
