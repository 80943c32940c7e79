#include "cos/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "CLI11.hpp"

#include "cos/errors.hpp"
#include "cos/simulation.hpp"

namespace cosim {

namespace fs = std::filesystem;

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const std::size_t comma = csv.find(',', pos);
        const std::string tok = csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (tok.empty()) throw ConfigError("empty entry in seed list '" + csv + "'");
        try {
            seeds.push_back(std::stoull(tok));
        } catch (const std::exception&) {
            throw ConfigError("bad seed '" + tok + "' in seed list");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (seeds.empty()) throw ConfigError("seed list is empty");
    return seeds;
}

std::vector<std::uint64_t> derive_seeds(std::uint64_t base, int count) {
    if (count < 1) throw ConfigError("at least one seed is required");
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
    return seeds;
}

std::vector<std::uint64_t> log_spaced_slots(std::uint64_t horizon, std::size_t max_points) {
    std::vector<std::uint64_t> slots;
    if (horizon == 0) return slots;
    if (max_points >= horizon) {
        slots.resize(horizon);
        for (std::uint64_t t = 1; t <= horizon; ++t) slots[t - 1] = t;
        return slots;
    }
    const double logT = std::log(static_cast<double>(horizon));
    std::uint64_t last = 0;
    for (std::size_t j = 0; j < max_points; ++j) {
        const double f = max_points == 1 ? 1.0 : static_cast<double>(j) / static_cast<double>(max_points - 1);
        auto t = static_cast<std::uint64_t>(std::llround(std::exp(f * logT)));
        t = std::clamp<std::uint64_t>(t, 1, horizon);
        if (t > last) {
            slots.push_back(t);
            last = t;
        }
    }
    if (slots.back() != horizon) slots.push_back(horizon);
    return slots;
}

ReplicationSummary summarize_records(const std::vector<StepRecord>& records, int learner_count,
                                     bool trace_mode, std::uint64_t seed,
                                     const std::vector<std::uint64_t>& sample_slots) {
    ReplicationSummary sum;
    sum.seed = seed;

    MetricsLog view;
    view.info.learner_count = learner_count;
    view.info.trace_mode = trace_mode;
    view.records = records;  // error_rate_metrics wants a log
    sum.metrics = error_rate_metrics(view);

    sum.realized_reward.assign(static_cast<std::size_t>(learner_count), 0.0);
    for (const auto& r : records) sum.realized_reward[static_cast<std::size_t>(r.learner)] += r.reward;

    if (!trace_mode) {
        sum.final_cum_regret.assign(static_cast<std::size_t>(learner_count), 0.0);
        sum.curve.assign(static_cast<std::size_t>(learner_count),
                         std::vector<double>(sample_slots.size(), 0.0));
        std::unordered_map<std::uint64_t, std::size_t> slot_index;
        slot_index.reserve(sample_slots.size());
        for (std::size_t j = 0; j < sample_slots.size(); ++j) slot_index.emplace(sample_slots[j], j);
        for (const auto& r : records) {
            sum.final_cum_regret[static_cast<std::size_t>(r.learner)] = r.cum_regret;
            auto it = slot_index.find(r.t);
            if (it != slot_index.end()) sum.curve[static_cast<std::size_t>(r.learner)][it->second] = r.cum_regret;
        }
    }
    return sum;
}

std::string replication_log_path(const std::string& out_dir, std::uint64_t seed) {
    return (fs::path(out_dir) / ("rep_" + std::to_string(seed) + ".csv")).string();
}

int resolve_thread_count(int requested, std::size_t jobs) {
    int n = requested;
    if (n <= 0) {
        if (const char* env = std::getenv("COS_THREADS")) {
            try {
                n = std::stoi(env);
            } catch (const std::exception&) {
                throw ConfigError(std::string("COS_THREADS is not an integer: '") + env + "'");
            }
            if (n < 1) throw ConfigError("COS_THREADS must be >= 1");
        } else {
            n = static_cast<int>(std::thread::hardware_concurrency());
            if (n < 1) n = 1;
        }
    }
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(n), std::max<std::size_t>(jobs, 1)));
}

AggregateResult run_replications(const RunConfig& cfg) {
    if (cfg.seeds.empty()) throw ConfigError("at least one seed is required");
    validate_scenario(cfg.scenario);
    if (cfg.write_logs) fs::create_directories(cfg.out_dir);

    const std::uint64_t horizon = cfg.doubling && cfg.doubling_total ? cfg.doubling_total : cfg.scenario.horizon;
    AggregateResult agg;
    agg.learner_count = cfg.scenario.learner_count();
    agg.trace_mode = cfg.scenario.trace_mode();
    agg.sample_slots = log_spaced_slots(horizon, cfg.full_curve ? static_cast<std::size_t>(horizon) : 2000);
    agg.replications.resize(cfg.seeds.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.seeds.size()) return;
            try {
                Scenario sc = cfg.scenario;
                sc.seed = cfg.seeds[i];
                MetricsLog log = cfg.doubling ? run_doubling(sc, horizon) : run(sc);
                if (cfg.write_logs) {
                    write_records_csv_file(replication_log_path(cfg.out_dir, sc.seed), log);
                }
                agg.replications[i] = summarize_records(log.records, agg.learner_count, agg.trace_mode,
                                                        sc.seed, agg.sample_slots);
            } catch (...) {
                std::scoped_lock lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const int threads = resolve_thread_count(cfg.threads, cfg.seeds.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return agg;
}

namespace {

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd ms;
    if (xs.empty()) return ms;
    for (double x : xs) ms.mean += x;
    ms.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - ms.mean) * (x - ms.mean);
        ms.std = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return ms;
}

} // namespace

void write_summary_csv(const std::string& path, const AggregateResult& agg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open summary file for writing: " + path);
    out << "schema_version,seeds,learner,slots,error_pct,train_pct,explore_pct,exploit_pct,"
           "probes_mean,final_cum_regret_mean,final_cum_regret_std,realized_reward_mean\n";
    const auto n = agg.replications.size();
    for (int l = 0; l < agg.learner_count; ++l) {
        std::vector<double> err, tr, ex, xp, probes, regret, reward;
        for (const auto& rep : agg.replications) {
            const auto& m = rep.metrics[static_cast<std::size_t>(l)];
            err.push_back(m.error_pct);
            tr.push_back(m.train_pct);
            ex.push_back(m.explore_pct);
            xp.push_back(m.exploit_pct);
            probes.push_back(static_cast<double>(m.probe_count));
            reward.push_back(rep.realized_reward[static_cast<std::size_t>(l)]);
            if (!agg.trace_mode) regret.push_back(rep.final_cum_regret[static_cast<std::size_t>(l)]);
        }
        const std::uint64_t slots = agg.replications.empty()
                                        ? 0
                                        : agg.replications.front().metrics[static_cast<std::size_t>(l)].slots;
        out << 1 << ',' << n << ',' << l << ',' << slots << ',' << format_double(mean_std(err).mean) << ','
            << format_double(mean_std(tr).mean) << ',' << format_double(mean_std(ex).mean) << ','
            << format_double(mean_std(xp).mean) << ',' << format_double(mean_std(probes).mean) << ',';
        if (!agg.trace_mode) {
            const MeanStd ms = mean_std(regret);
            out << format_double(ms.mean) << ',' << format_double(ms.std);
        } else {
            out << ',';
        }
        out << ',' << format_double(mean_std(reward).mean) << "\n";
    }
}

void write_regret_curve_csv(const std::string& path, const AggregateResult& agg) {
    if (agg.trace_mode) throw ConfigError("no regret curve in trace mode");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open regret curve file for writing: " + path);
    out << "schema_version,t,learner,mean_cum_regret,std_cum_regret\n";
    for (std::size_t j = 0; j < agg.sample_slots.size(); ++j) {
        for (int l = 0; l < agg.learner_count; ++l) {
            std::vector<double> vals;
            vals.reserve(agg.replications.size());
            for (const auto& rep : agg.replications) {
                vals.push_back(rep.curve[static_cast<std::size_t>(l)][j]);
            }
            const MeanStd ms = mean_std(vals);
            out << 1 << ',' << agg.sample_slots[j] << ',' << l << ',' << format_double(ms.mean) << ','
                << format_double(ms.std) << "\n";
        }
    }
}

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Distributed cooperative online classification simulator"};
    std::string scenario_path, seed_list, out_dir = "out", mode = "synthetic", trace_path;
    int seed_count = 0;
    std::uint64_t horizon = 0;
    int delay_max = -1;
    bool doubling = false, time_as_context = false, full_logs = false;

    app.add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    app.add_option("--seeds", seed_count, "Number of replications (seeds base..base+n-1)");
    app.add_option("--seed-list", seed_list, "Explicit comma-separated master seeds");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--horizon", horizon, "Override the scenario horizon T");
    app.add_option("--mode", mode, "synthetic | trace")->check(CLI::IsMember({"synthetic", "trace"}));
    app.add_option("--trace", trace_path, "Trace CSV to replay (trace mode)");
    app.add_flag("--doubling", doubling, "Restart in doubling phases instead of one fixed-horizon run");
    app.add_option("--delay-max", delay_max, "Reveal labels with uniform delay in [0, L]");
    app.add_flag("--time-as-context", time_as_context, "Append normalized time as an extra context dimension");
    app.add_flag("--full-logs", full_logs, "Emit the regret curve at full slot resolution");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        RunConfig cfg;
        cfg.scenario = load_scenario(scenario_path);
        if (horizon > 0) cfg.scenario.horizon = horizon;
        if (!trace_path.empty()) mode = "trace";
        if (mode == "trace") {
            if (trace_path.empty()) throw ConfigError("trace mode requires --trace <path>");
            cfg.scenario.trace_path = trace_path;
            for (auto& l : cfg.scenario.learners) l.arrival.kind = ArrivalSpec::Kind::from_trace;
        }
        if (delay_max >= 0) {
            DelaySpec d;
            d.law = DelaySpec::Law::uniform;
            d.l_max = static_cast<std::uint64_t>(delay_max);
            cfg.scenario.delay = d;
        }
        if (time_as_context) {
            cfg.scenario.time_as_context = true;
            for (auto& l : cfg.scenario.learners) {
                if (l.arrival.kind == ArrivalSpec::Kind::iid_uniform) {
                    l.arrival.kind = ArrivalSpec::Kind::time_ramp;
                }
            }
        }
        validate_scenario(cfg.scenario);

        if (!seed_list.empty() && seed_count > 0) {
            throw ConfigError("use either --seeds or --seed-list, not both");
        }
        if (!seed_list.empty()) {
            cfg.seeds = parse_seed_list(seed_list);
        } else {
            cfg.seeds = derive_seeds(cfg.scenario.seed, seed_count > 0 ? seed_count : 1);
        }
        cfg.out_dir = out_dir;
        cfg.doubling = doubling;
        cfg.doubling_total = cfg.scenario.horizon;
        cfg.full_curve = full_logs;

        const AggregateResult agg = run_replications(cfg);
        fs::create_directories(out_dir);
        write_summary_csv((fs::path(out_dir) / "summary.csv").string(), agg);
        if (!agg.trace_mode) {
            write_regret_curve_csv((fs::path(out_dir) / "regret_curve.csv").string(), agg);
        }

        std::cout << "ran " << agg.replications.size() << " replication(s), logs in " << out_dir << "\n";
        for (int l = 0; l < agg.learner_count; ++l) {
            double err = 0, tr = 0, ex = 0, xp = 0, rg = 0;
            for (const auto& rep : agg.replications) {
                const auto& m = rep.metrics[static_cast<std::size_t>(l)];
                err += m.error_pct;
                tr += m.train_pct;
                ex += m.explore_pct;
                xp += m.exploit_pct;
                if (!agg.trace_mode) rg += rep.final_cum_regret[static_cast<std::size_t>(l)];
            }
            const double n = static_cast<double>(agg.replications.size());
            std::cout << "learner " << (l + 1) << ": error " << err / n << "% train " << tr / n << "% explore "
                      << ex / n << "% exploit " << xp / n << "%";
            if (!agg.trace_mode) std::cout << " | mean cum regret " << rg / n;
            std::cout << "\n";
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace cosim
