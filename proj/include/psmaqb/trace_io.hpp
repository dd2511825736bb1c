#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "psmaqb/engine.hpp"

namespace psmaqb {

// CSV trace: header `t,epoch,step,lambda,cumulative_regret,online_infidelity`,
// one row per checkpoint, floats printed with 17 significant digits (exact
// double round-trip). The infidelity cell is empty for t ≤ T_0.
void emit_trace(const RunRecord& record, const std::filesystem::path& path);
void emit_trace(const std::vector<Checkpoint>& trace, const std::filesystem::path& path);

std::string format_trace(const std::vector<Checkpoint>& trace);

// Inverse of emit_trace; used by the summary recomputation path and tests.
std::vector<Checkpoint> parse_trace(const std::filesystem::path& path);
std::vector<Checkpoint> parse_trace_string(const std::string& csv);

/*
 * Per-run summary figures. Every number here is recomputed from the
 * checkpoint list alone (the same data the CSV holds), so a JSON summary can
 * always be rebuilt from the emitted traces.
 */
struct TraceSummary {
    std::uint64_t total_copies = 0;     // last checkpoint t
    std::uint64_t warmup_copies = 0;    // largest t with epoch = 0
    double final_regret = 0.0;          // last cumulative_regret
    double final_infidelity = 0.0;      // last online_infidelity
    long epochs_executed = 0;           // max epoch index
    double lambda_final = 0.0;          // design precision at the last recorded row
};

TraceSummary summarize_trace(const std::vector<Checkpoint>& trace);

}  // namespace psmaqb
