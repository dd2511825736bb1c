#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psmaqb/engine.hpp"
#include "psmaqb/trace_io.hpp"

namespace psmaqb {

/*
 * Batch experiment configuration: every (dimension, seed) pair becomes one
 * run cell. Round-trips losslessly through its JSON file form; command-line
 * flags override file values.
 */
struct ExperimentConfig {
    std::vector<int> dimensions;
    std::uint64_t horizon = 0;
    std::vector<std::uint64_t> seeds;
    Preset preset = Preset::kPractical;
    Overrides overrides;
    std::string state_file;         // optional explicit hidden state
    std::string out_dir = ".";
    std::uint64_t checkpoint_every = 0;  // 0 → engine default ⌈T/1000⌉
    int workers = 1;
    bool emit_traces = true;
    bool emit_summary = true;
};

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

// Raised by parse_config when --help is requested; carries the help text.
struct HelpRequested {
    std::string text;
};

/*
 * CLI parsing. Arguments are the post-program argv entries. A --config FILE
 * is loaded first; explicitly passed flags then override its values.
 * Validation failures throw ConfigError naming the offending key.
 */
ExperimentConfig parse_config(const std::vector<std::string>& args);

// `re im` amplitude pairs, one per line. Normalizes on load and warns on
// stderr if the norm deviates by more than 1e-6.
PureState load_state_file(const std::string& path, Eigen::Index d);

// Aggregates over one (dimension, horizon) group of completed runs.
struct ScalingCell {
    int dimension = 0;
    std::uint64_t horizon = 0;
    std::vector<std::uint64_t> seeds;
    double mean_final_regret = 0.0;
    double stddev_final_regret = 0.0;
    double mean_final_infidelity = 0.0;
    double stddev_final_infidelity = 0.0;
    // OLS slope of cumulative regret against ln²t over post-warm-up
    // checkpoints (a polylog regret curve has a bounded slope here).
    double regret_vs_log2t_slope = 0.0;
    // OLS slope of ln(infidelity) against ln(t); ~1/t decay gives ≈ −1.
    double infidelity_exponent = 0.0;
};

struct ScalingReport {
    std::vector<ScalingCell> cells;
};

struct CellResult {
    int dimension = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::string trace_path;
    std::optional<RunRecord> record;
};

struct BatchResult {
    std::vector<CellResult> cells;
    ScalingReport report;
    bool all_ok = false;
};

/*
 * Executes every (dimension, seed) cell, up to cfg.workers in parallel.
 * Emits one CSV trace per run plus one summary.json per batch under
 * cfg.out_dir. Cell outputs depend only on that cell's inputs, so reruns and
 * different worker counts produce byte-identical files. I/O failures are
 * reported per cell without aborting the batch.
 */
BatchResult run_batch(const ExperimentConfig& cfg);

// Batch summary JSON (config echo, per-run figures, scaling aggregates).
// Built exclusively from checkpoint data so it can be recomputed from the
// emitted CSV traces.
std::string batch_summary_json(const ExperimentConfig& cfg, const BatchResult& batch);

}  // namespace psmaqb
