#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cos/cli.hpp"
#include "cos/errors.hpp"
#include "cos/simulation.hpp"
#include "helpers.hpp"

using namespace cosim;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / name;
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("seed helpers") {
    CHECK(parse_seed_list("1,2,30") == std::vector<std::uint64_t>{1, 2, 30});
    CHECK_THROWS_AS(parse_seed_list("1,,3"), ConfigError);
    CHECK_THROWS_AS(parse_seed_list("x"), ConfigError);
    CHECK(derive_seeds(10, 3) == std::vector<std::uint64_t>{10, 11, 12});
    CHECK_THROWS_AS(derive_seeds(1, 0), ConfigError);
}

TEST_CASE("log-spaced slot grid") {
    const auto slots = log_spaced_slots(100000, 2000);
    CHECK(slots.size() <= 2000);
    CHECK(slots.front() == 1);
    CHECK(slots.back() == 100000);
    for (std::size_t i = 1; i < slots.size(); ++i) CHECK(slots[i] > slots[i - 1]);
    const auto full = log_spaced_slots(50, 2000);
    CHECK(full.size() == 50);
}

TEST_CASE("scenario JSON loads and validates") {
    const std::string path = std::string(COS_SCENARIO_DIR) + "/table1_s1.json";
    const Scenario sc = load_scenario(path);
    CHECK(sc.learner_count() == 4);
    CHECK(sc.horizon == 20000);
    CHECK(sc.f_max == 2);
    REQUIRE(sc.learners[0].functions.size() == 2);
    const auto& acc = std::get<ConstantAccuracy>(*sc.learners[0].functions[1].accuracy);
    CHECK(acc.value == doctest::Approx(0.97));
}

TEST_CASE("scenario validation reports field-level problems") {
    SUBCASE("cost out of range") {
        Scenario sc = testing::constant_scenario({{0.9}}, 10);
        sc.learners[0].functions[0].cost = 1.5;
        try {
            validate_scenario(sc);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("cost") != std::string::npos);
            CHECK(msg.find("out of [0,1]") != std::string::npos);
        }
    }
    SUBCASE("f_max below a learner's function count") {
        Scenario sc = testing::constant_scenario({{0.9, 0.8}}, 10);
        sc.f_max = 1;
        CHECK_THROWS_AS(validate_scenario(sc), ConfigError);
    }
    SUBCASE("multiple problems are aggregated") {
        Scenario sc = testing::constant_scenario({{0.9}}, 10);
        sc.learners[0].functions[0].cost = -0.2;
        sc.alpha = 0.0;
        try {
            validate_scenario(sc);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("2 validation error") != std::string::npos);
        }
    }
}

TEST_CASE("replications write per-seed logs plus aggregates") {
    TempDir dir("cos_cli_replications");
    RunConfig cfg;
    cfg.scenario = testing::bump_ball(400, 100);
    cfg.seeds = {100, 101, 102};
    cfg.out_dir = dir.path.string();
    cfg.threads = 2;
    const AggregateResult agg = run_replications(cfg);
    CHECK(agg.replications.size() == 3);
    for (std::uint64_t seed : cfg.seeds) {
        CHECK(fs::exists(replication_log_path(cfg.out_dir, seed)));
    }
    write_summary_csv((dir.path / "summary.csv").string(), agg);
    write_regret_curve_csv((dir.path / "regret_curve.csv").string(), agg);
    CHECK(fs::exists(dir.path / "summary.csv"));
    CHECK(fs::exists(dir.path / "regret_curve.csv"));
    const std::string summary = slurp(dir.path / "summary.csv");
    CHECK(summary.find("schema_version") != std::string::npos);
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 5);  // header + 4 learners
}

TEST_CASE("summary recomputed from the written CSVs matches exactly") {
    TempDir dir("cos_cli_roundtrip");
    RunConfig cfg;
    cfg.scenario = testing::bump_ball(300, 40);
    cfg.seeds = {40, 41};
    cfg.out_dir = dir.path.string();
    cfg.threads = 1;
    const AggregateResult agg = run_replications(cfg);

    AggregateResult reread = agg;
    reread.replications.clear();
    for (std::uint64_t seed : cfg.seeds) {
        const auto records = read_records_csv_file(replication_log_path(cfg.out_dir, seed));
        reread.replications.push_back(
            summarize_records(records, agg.learner_count, agg.trace_mode, seed, agg.sample_slots));
    }
    std::ostringstream a, b;
    {
        const fs::path pa = dir.path / "a.csv", pb = dir.path / "b.csv";
        write_summary_csv(pa.string(), agg);
        write_summary_csv(pb.string(), reread);
        CHECK(slurp(pa) == slurp(pb));
        const fs::path ca = dir.path / "ca.csv", cb = dir.path / "cb.csv";
        write_regret_curve_csv(ca.string(), agg);
        write_regret_curve_csv(cb.string(), reread);
        CHECK(slurp(ca) == slurp(cb));
    }
}

TEST_CASE("seed isolation: dropping a seed leaves the others' logs unchanged") {
    TempDir dir_all("cos_cli_seeds_all");
    TempDir dir_some("cos_cli_seeds_some");
    RunConfig cfg;
    cfg.scenario = testing::bump_ball(300, 7);
    cfg.threads = 2;

    cfg.seeds = {7, 8, 9};
    cfg.out_dir = dir_all.path.string();
    run_replications(cfg);

    cfg.seeds = {7, 9};
    cfg.out_dir = dir_some.path.string();
    run_replications(cfg);

    for (std::uint64_t seed : {7ull, 9ull}) {
        CHECK(slurp(replication_log_path(dir_all.path.string(), seed)) ==
              slurp(replication_log_path(dir_some.path.string(), seed)));
    }
}

TEST_CASE("cli end-to-end over the shipped scenario") {
    TempDir dir("cos_cli_main");
    const std::string scenario = std::string(COS_SCENARIO_DIR) + "/table1_s1.json";
    const std::string out = dir.path.string();
    const char* argv[] = {"cos_sim",    "--scenario", scenario.c_str(), "--seeds", "2",
                          "--horizon",  "500",        "--out",          out.c_str()};
    CHECK(cli_main(9, argv) == 0);
    CHECK(fs::exists(dir.path / "rep_1.csv"));
    CHECK(fs::exists(dir.path / "rep_2.csv"));
    CHECK(fs::exists(dir.path / "summary.csv"));
    CHECK(fs::exists(dir.path / "regret_curve.csv"));
}

TEST_CASE("cli exit codes") {
    SUBCASE("missing scenario file is a config error") {
        const char* argv[] = {"cos_sim", "--scenario", "/nonexistent/sc.json"};
        CHECK(cli_main(3, argv) == 1);
    }
    SUBCASE("trace mode without a trace file is a config error") {
        const std::string scenario = std::string(COS_SCENARIO_DIR) + "/table1_s1.json";
        const char* argv[] = {"cos_sim", "--scenario", scenario.c_str(), "--mode", "trace"};
        CHECK(cli_main(5, argv) == 1);
    }
}

TEST_CASE("doubling runs mark the phase column") {
    TempDir dir("cos_cli_doubling");
    RunConfig cfg;
    cfg.scenario = testing::bump_ball(200, 3);
    cfg.seeds = {3};
    cfg.out_dir = dir.path.string();
    cfg.doubling = true;
    cfg.doubling_total = 200;
    cfg.threads = 1;
    run_replications(cfg);
    const std::string log = slurp(replication_log_path(cfg.out_dir, 3));
    CHECK(log.find("doubling_phase") != std::string::npos);
}

TEST_CASE("shipped bump_ball.json reproduces the in-code scenario") {
    Scenario from_file = load_scenario(std::string(COS_SCENARIO_DIR) + "/bump_ball.json");
    from_file.horizon = 500;
    Scenario from_code = testing::bump_ball(500, 1);
    validate_scenario(from_code);
    CHECK(records_to_csv_string(run(from_file)) == records_to_csv_string(run(from_code)));
}

TEST_CASE("COS_THREADS bounds the worker pool") {
    setenv("COS_THREADS", "3", 1);
    CHECK(resolve_thread_count(0, 10) == 3);
    CHECK(resolve_thread_count(0, 2) == 2);   // never more workers than jobs
    CHECK(resolve_thread_count(5, 10) == 5);  // explicit request wins
    setenv("COS_THREADS", "zebra", 1);
    CHECK_THROWS_AS(resolve_thread_count(0, 10), ConfigError);
    unsetenv("COS_THREADS");
}

namespace {

std::string write_small_trace(const fs::path& dir) {
    TraceSchema schema;
    schema.context_dim = 1;
    schema.functions_per_learner = {2, 2, 2, 2};
    std::vector<TraceRow> rows(50);
    Rng rng = make_stream(5150, 0, Stream::arrival);
    for (std::size_t t = 0; t < rows.size(); ++t) {
        rows[t].t = t;
        rows[t].context = {uniform_double(rng)};
        rows[t].true_label = uniform_double(rng) < 0.5 ? 1 : 0;
        rows[t].predictions.assign(4, std::vector<int>(2));
        for (auto& per_learner : rows[t].predictions) {
            for (int& p : per_learner) p = uniform_double(rng) < 0.5 ? 1 : 0;
        }
    }
    const std::string path = (dir / "trace.csv").string();
    write_trace(path, schema, rows);
    return path;
}

} // namespace

TEST_CASE("trace replay drives a full run without an oracle") {
    TempDir dir("cos_cli_trace_run");
    const std::string trace_path = write_small_trace(dir.path);
    Scenario sc = testing::table1_s1(50, 4);
    sc.trace_path = trace_path;
    for (auto& l : sc.learners) {
        l.arrival.kind = ArrivalSpec::Kind::from_trace;
        for (auto& fn : l.functions) fn.accuracy.reset();
    }
    validate_scenario(sc);
    const MetricsLog log = run(sc);
    CHECK(log.info.trace_mode);
    REQUIRE(log.records.size() == 200);
    for (const auto& r : log.records) {
        CHECK_FALSE(r.has_oracle);
        CHECK((r.prediction == 0 || r.prediction == 1));
    }
    // oracle columns serialize as empty fields
    const std::string csv = records_to_csv_string(log);
    CHECK(csv.find(",,,") != std::string::npos);
}

TEST_CASE("cli trace mode writes the error summary but no regret file") {
    TempDir dir("cos_cli_trace_e2e");
    const std::string trace_path = write_small_trace(dir.path);
    const std::string scenario = std::string(COS_SCENARIO_DIR) + "/table1_s1.json";
    const std::string out = (dir.path / "out").string();
    const char* argv[] = {"cos_sim", "--scenario", scenario.c_str(), "--mode", "trace",
                          "--trace", trace_path.c_str(), "--horizon", "50", "--out", out.c_str()};
    CHECK(cli_main(11, argv) == 0);
    CHECK(fs::exists(fs::path(out) / "summary.csv"));
    CHECK(fs::exists(fs::path(out) / "rep_1.csv"));
    CHECK_FALSE(fs::exists(fs::path(out) / "regret_curve.csv"));
}

TEST_CASE("time-as-context flag works end-to-end with constant accuracies") {
    TempDir dir("cos_cli_tac");
    const std::string scenario = std::string(COS_SCENARIO_DIR) + "/table1_s1.json";
    const std::string out = dir.path.string();
    const char* argv[] = {"cos_sim", "--scenario", scenario.c_str(), "--horizon", "200",
                          "--time-as-context", "--out", out.c_str()};
    CHECK(cli_main(8, argv) == 0);
    CHECK(fs::exists(dir.path / "rep_1.csv"));
}

TEST_CASE("a trace shorter than the horizon fails cleanly") {
    TempDir dir("cos_cli_trace_short");
    const std::string trace_path = write_small_trace(dir.path);  // 50 rows
    Scenario sc = testing::table1_s1(100, 4);
    sc.trace_path = trace_path;
    for (auto& l : sc.learners) {
        l.arrival.kind = ArrivalSpec::Kind::from_trace;
        for (auto& fn : l.functions) fn.accuracy.reset();
    }
    validate_scenario(sc);
    try {
        run(sc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("trace ended") != std::string::npos);
    }
}
