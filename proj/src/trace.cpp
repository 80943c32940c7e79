#include "cos/trace.hpp"

#include <charconv>
#include <sstream>

#include "cos/errors.hpp"

namespace cosim {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::uint64_t line_no, const std::string& what) {
    double v{};
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse " + what + " from '" + s + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& s, std::uint64_t line_no, const std::string& what) {
    std::uint64_t v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse " + what + " from '" + s + "'");
    }
    return v;
}

int parse_label(const std::string& s, std::uint64_t line_no, const std::string& what) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    throw ParseError("line " + std::to_string(line_no) + ": " + what + " must be 0 or 1, got '" + s + "'");
}

} // namespace

std::string TraceSchema::header_line() const {
    std::string h = "t";
    for (int j = 0; j < context_dim; ++j) h += ",ctx_" + std::to_string(j);
    h += ",label";
    for (std::size_t i = 0; i < functions_per_learner.size(); ++i) {
        for (int f = 0; f < functions_per_learner[i]; ++f) {
            h += ",pred_" + std::to_string(i) + "_" + std::to_string(f);
        }
    }
    return h;
}

TraceRow parse_trace_row(const std::string& line, const TraceSchema& schema, std::uint64_t line_no) {
    const auto fields = split_csv(line);
    std::size_t expected = 2 + static_cast<std::size_t>(schema.context_dim);
    for (int n : schema.functions_per_learner) expected += static_cast<std::size_t>(n);
    if (fields.size() != expected) {
        throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                         " fields, got " + std::to_string(fields.size()));
    }
    TraceRow row;
    std::size_t col = 0;
    row.t = parse_u64(fields[col++], line_no, "slot index");
    row.context.resize(static_cast<std::size_t>(schema.context_dim));
    for (int j = 0; j < schema.context_dim; ++j) {
        const double v = parse_double(fields[col++], line_no, "ctx_" + std::to_string(j));
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ParseError("line " + std::to_string(line_no) + ": context ctx_" + std::to_string(j) + " = " +
                             fields[col - 1] + " out of range [0,1]");
        }
        row.context[static_cast<std::size_t>(j)] = v;
    }
    row.true_label = parse_label(fields[col++], line_no, "label");
    row.predictions.resize(schema.functions_per_learner.size());
    for (std::size_t i = 0; i < schema.functions_per_learner.size(); ++i) {
        row.predictions[i].resize(static_cast<std::size_t>(schema.functions_per_learner[i]));
        for (int f = 0; f < schema.functions_per_learner[i]; ++f) {
            row.predictions[i][static_cast<std::size_t>(f)] =
                parse_label(fields[col++], line_no, "pred_" + std::to_string(i) + "_" + std::to_string(f));
        }
    }
    return row;
}

TraceReader::TraceReader(const std::string& path, TraceSchema schema)
    : schema_(std::move(schema)), in_(path), path_(path) {
    if (!in_) throw ConfigError("cannot open trace file: " + path);
    std::string header;
    if (!std::getline(in_, header)) throw ParseError(path + ": missing header row");
    ++line_no_;
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const std::string expected = schema_.header_line();
    if (header != expected) {
        throw ConfigError(path + ": header does not match scenario; expected '" + expected + "', got '" +
                          header + "'");
    }
}

std::optional<TraceRow> TraceReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        TraceRow row = parse_trace_row(line, schema_, line_no_);
        if (first_row_) {
            if (row.t != 0) {
                throw ParseError("line " + std::to_string(line_no_) + ": first trace row must have t = 0, got " +
                                 std::to_string(row.t));
            }
            first_row_ = false;
        } else if (row.t <= last_t_) {
            throw ParseError("line " + std::to_string(line_no_) + ": slot index " + std::to_string(row.t) +
                             " not strictly increasing (previous " + std::to_string(last_t_) + ")");
        }
        last_t_ = row.t;
        return row;
    }
    return std::nullopt;
}

void write_trace(const std::string& path, const TraceSchema& schema, const std::vector<TraceRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open trace file for writing: " + path);
    out << schema.header_line() << "\n";
    for (const auto& row : rows) {
        out << row.t;
        for (double c : row.context) out << ',' << c;
        out << ',' << row.true_label;
        for (const auto& per_learner : row.predictions) {
            for (int p : per_learner) out << ',' << p;
        }
        out << "\n";
    }
}

} // namespace cosim
