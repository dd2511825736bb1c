#include "psmaqb/trace_io.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace psmaqb {

namespace {

constexpr const char* kHeader = "t,epoch,step,lambda,cumulative_regret,online_infidelity";

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double parse_double(const std::string& field, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0') {
        throw std::runtime_error(std::string("parse_trace: bad ") + what + " field '" +
                                 field + "'");
    }
    return v;
}

}  // namespace

std::string format_trace(const std::vector<Checkpoint>& trace) {
    std::string out(kHeader);
    out.push_back('\n');
    for (const Checkpoint& c : trace) {
        out += std::to_string(c.t);
        out.push_back(',');
        out += std::to_string(c.epoch);
        out.push_back(',');
        out += std::to_string(c.step);
        out.push_back(',');
        out += format_double(c.lambda);
        out.push_back(',');
        out += format_double(c.cumulative_regret);
        out.push_back(',');
        if (c.online_infidelity.has_value()) {
            out += format_double(*c.online_infidelity);
        }
        out.push_back('\n');
    }
    return out;
}

void emit_trace(const std::vector<Checkpoint>& trace, const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("emit_trace: cannot open '" + path.string() +
                                 "' for writing");
    }
    file << format_trace(trace);
    if (!file) {
        throw std::runtime_error("emit_trace: write failed for '" + path.string() + "'");
    }
}

void emit_trace(const RunRecord& record, const std::filesystem::path& path) {
    emit_trace(record.trace, path);
}

std::vector<Checkpoint> parse_trace_string(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw std::runtime_error("parse_trace: missing or unexpected header");
    }
    std::vector<Checkpoint> trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::array<std::string, 6> fields;
        std::size_t start = 0;
        for (int f = 0; f < 6; ++f) {
            const std::size_t comma = line.find(',', start);
            if (f < 5) {
                if (comma == std::string::npos) {
                    throw std::runtime_error("parse_trace: malformed row '" + line + "'");
                }
                fields[static_cast<std::size_t>(f)] = line.substr(start, comma - start);
                start = comma + 1;
            } else {
                fields[5] = line.substr(start);
            }
        }
        Checkpoint c;
        c.t = std::stoull(fields[0]);
        c.epoch = std::stoi(fields[1]);
        c.step = std::stol(fields[2]);
        c.lambda = parse_double(fields[3], "lambda");
        c.cumulative_regret = parse_double(fields[4], "cumulative_regret");
        if (!fields[5].empty()) {
            c.online_infidelity = parse_double(fields[5], "online_infidelity");
        }
        trace.push_back(c);
    }
    return trace;
}

std::vector<Checkpoint> parse_trace(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("parse_trace: cannot open '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << file.rdbuf();
    return parse_trace_string(buffer.str());
}

TraceSummary summarize_trace(const std::vector<Checkpoint>& trace) {
    TraceSummary s;
    for (const Checkpoint& c : trace) {
        s.total_copies = std::max(s.total_copies, c.t);
        if (c.epoch == 0) s.warmup_copies = std::max(s.warmup_copies, c.t);
        if (c.epoch > s.epochs_executed) s.epochs_executed = c.epoch;
    }
    if (!trace.empty()) {
        s.final_regret = trace.back().cumulative_regret;
        if (trace.back().online_infidelity.has_value()) {
            s.final_infidelity = *trace.back().online_infidelity;
        }
    }
    for (const Checkpoint& c : trace) {
        if (c.epoch > 0 && c.lambda > 0.0) s.lambda_final = c.lambda;
    }
    return s;
}

}  // namespace psmaqb
