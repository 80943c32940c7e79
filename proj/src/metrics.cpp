#include "cos/metrics.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cos/errors.hpp"

namespace cosim {

std::string arm_token(ArmId arm) {
    return (arm.kind == ArmKind::own ? "own" : "peer") + std::to_string(arm.index);
}

ArmId arm_from_token(const std::string& token) {
    if (token.rfind("own", 0) == 0) return ArmId{ArmKind::own, std::stoi(token.substr(3))};
    if (token.rfind("peer", 0) == 0) return ArmId{ArmKind::peer, std::stoi(token.substr(4))};
    throw ParseError("bad arm token '" + token + "'");
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string records_csv_header(bool doubling) {
    std::string h =
        "t,learner,phase,arm_kind,arm_index,cell,peer_fn,prediction,label,reward,"
        "oracle_arm,inst_regret,cum_regret,probes";
    if (doubling) h += ",doubling_phase";
    return h;
}

void write_records_csv(std::ostream& out, const MetricsLog& log) {
    out << records_csv_header(log.info.doubling) << "\n";
    for (const auto& r : log.records) {
        out << r.t << ',' << r.learner << ',' << phase_name(r.phase) << ','
            << (r.arm.kind == ArmKind::own ? "own" : "peer") << ',' << r.arm.index << ',' << r.cell << ',';
        if (r.peer_function >= 0) out << r.peer_function;
        out << ',' << r.prediction << ',' << r.true_label << ',' << format_double(r.reward) << ',';
        if (r.has_oracle) {
            out << arm_token(r.oracle_arm) << ',' << format_double(r.inst_regret) << ','
                << format_double(r.cum_regret);
        } else {
            out << ",,";
        }
        out << ',' << r.probes;
        if (log.info.doubling) out << ',' << r.doubling_phase;
        out << "\n";
    }
}

void write_records_csv_file(const std::string& path, const MetricsLog& log) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open log file for writing: " + path);
    write_records_csv(out, log);
}

std::string records_to_csv_string(const MetricsLog& log) {
    std::ostringstream out;
    write_records_csv(out, log);
    return out.str();
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double to_double(const std::string& s, std::uint64_t line_no) {
    double v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ParseError("log line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
}

Phase phase_from(const std::string& s, std::uint64_t line_no) {
    if (s == "train") return Phase::train;
    if (s == "explore") return Phase::explore;
    if (s == "exploit") return Phase::exploit;
    throw ParseError("log line " + std::to_string(line_no) + ": bad phase '" + s + "'");
}

} // namespace

std::vector<StepRecord> read_records_csv(std::istream& in) {
    std::vector<StepRecord> records;
    std::string line;
    std::uint64_t line_no = 0;
    if (!std::getline(in, line)) return records;
    ++line_no;
    const bool doubling = line.find(",doubling_phase") != std::string::npos;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv(line);
        const std::size_t expected = doubling ? 15 : 14;
        if (f.size() != expected) {
            throw ParseError("log line " + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                             " fields, got " + std::to_string(f.size()));
        }
        StepRecord r;
        r.t = static_cast<std::uint64_t>(std::stoull(f[0]));
        r.learner = std::stoi(f[1]);
        r.phase = phase_from(f[2], line_no);
        r.arm.kind = f[3] == "own" ? ArmKind::own : ArmKind::peer;
        r.arm.index = std::stoi(f[4]);
        r.cell = static_cast<std::uint64_t>(std::stoull(f[5]));
        r.peer_function = f[6].empty() ? -1 : std::stoi(f[6]);
        r.prediction = std::stoi(f[7]);
        r.true_label = std::stoi(f[8]);
        r.reward = to_double(f[9], line_no);
        if (!f[10].empty()) {
            r.has_oracle = true;
            r.oracle_arm = arm_from_token(f[10]);
            r.inst_regret = to_double(f[11], line_no);
            r.cum_regret = to_double(f[12], line_no);
        }
        r.probes = std::stoi(f[13]);
        if (doubling) r.doubling_phase = std::stoi(f[14]);
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<StepRecord> read_records_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open log file: " + path);
    return read_records_csv(in);
}

} // namespace cosim
