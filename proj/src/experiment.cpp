#include "psmaqb/experiment.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace psmaqb {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
    const std::size_t pos = text.find("..");
    if (pos == std::string::npos) {
        throw ConfigError("seeds: expected range 'A..B', got '" + text + "'");
    }
    try {
        const std::uint64_t lo = std::stoull(text.substr(0, pos));
        const std::uint64_t hi = std::stoull(text.substr(pos + 2));
        if (hi <= lo) throw ConfigError("seeds: empty range '" + text + "'");
        return {lo, hi};
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("seeds: malformed range '" + text + "'");
    }
}

Overrides parse_override_strings(const std::vector<std::string>& entries) {
    Overrides overrides;
    for (const std::string& entry : entries) {
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
            throw ConfigError("override: expected KEY=VALUE, got '" + entry + "'");
        }
        const std::string key = entry.substr(0, eq);
        const std::string value_str = entry.substr(eq + 1);
        try {
            std::size_t used = 0;
            const double value = std::stod(value_str, &used);
            if (used != value_str.size()) throw std::invalid_argument(value_str);
            overrides[key] = value;
        } catch (const std::exception&) {
            throw ConfigError("override " + key + ": bad numeric value '" + value_str + "'");
        }
    }
    return overrides;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.dimensions.empty()) throw ConfigError("dimension: at least one value required");
    for (int d : cfg.dimensions) {
        if (d < 2) throw ConfigError("dimension: must be >= 2");
    }
    if (cfg.horizon < 1) throw ConfigError("horizon: must be >= 1");
    if (cfg.seeds.empty()) throw ConfigError("seed: at least one value required");
    if (cfg.workers < 1) throw ConfigError("workers: must be >= 1");
    if (!cfg.state_file.empty() && cfg.dimensions.size() > 1) {
        throw ConfigError("state-file: fixes the hidden state, use a single dimension");
    }
    preset_from_string(to_string(cfg.preset));  // round-trip sanity
}

json config_to_json_obj(const ExperimentConfig& cfg) {
    json overrides = json::object();
    for (const auto& [k, v] : cfg.overrides) overrides[k] = v;
    return json{{"dimensions", cfg.dimensions},
                {"horizon", cfg.horizon},
                {"seeds", cfg.seeds},
                {"preset", to_string(cfg.preset)},
                {"overrides", overrides},
                {"state_file", cfg.state_file},
                {"out_dir", cfg.out_dir},
                {"checkpoint_every", cfg.checkpoint_every},
                {"workers", cfg.workers},
                {"emit_traces", cfg.emit_traces},
                {"emit_summary", cfg.emit_summary}};
}

// Result-determining fields only. Worker count and output location are
// execution details; leaving them out keeps summary.json byte-identical
// across reruns and worker counts.
json summary_config_echo(const ExperimentConfig& cfg) {
    json overrides = json::object();
    for (const auto& [k, v] : cfg.overrides) overrides[k] = v;
    return json{{"dimensions", cfg.dimensions},
                {"horizon", cfg.horizon},
                {"seeds", cfg.seeds},
                {"preset", to_string(cfg.preset)},
                {"overrides", overrides},
                {"state_file", cfg.state_file},
                {"checkpoint_every", cfg.checkpoint_every}};
}

ExperimentConfig config_from_json_obj(const json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("dimensions")) cfg.dimensions = j["dimensions"].get<std::vector<int>>();
        if (j.contains("horizon")) cfg.horizon = j["horizon"].get<std::uint64_t>();
        if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
        if (j.contains("preset")) cfg.preset = preset_from_string(j["preset"].get<std::string>());
        if (j.contains("overrides")) {
            for (const auto& [k, v] : j["overrides"].items()) {
                cfg.overrides[k] = v.get<double>();
            }
        }
        if (j.contains("state_file")) cfg.state_file = j["state_file"].get<std::string>();
        if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("checkpoint_every")) {
            cfg.checkpoint_every = j["checkpoint_every"].get<std::uint64_t>();
        }
        if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
        if (j.contains("emit_traces")) cfg.emit_traces = j["emit_traces"].get<bool>();
        if (j.contains("emit_summary")) cfg.emit_summary = j["emit_summary"].get<bool>();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
    return cfg;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& cfg) {
    return config_to_json_obj(cfg).dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
    return config_from_json_obj(j);
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
    // A config file, when present, supplies the defaults; explicitly passed
    // flags override it afterwards.
    ExperimentConfig base;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("config: missing file path");
            std::ifstream file(args[i + 1]);
            if (!file) throw ConfigError("config: cannot open '" + args[i + 1] + "'");
            std::stringstream buf;
            buf << file.rdbuf();
            base = config_from_json(buf.str());
        } else if (args[i].rfind("--config=", 0) == 0) {
            const std::string path = args[i].substr(9);
            std::ifstream file(path);
            if (!file) throw ConfigError("config: cannot open '" + path + "'");
            std::stringstream buf;
            buf << file.rdbuf();
            base = config_from_json(buf.str());
        }
    }

    CLI::App app{"Adaptive pure-state bandit tomography experiments"};
    std::string config_path;
    std::vector<int> dimensions;
    std::uint64_t horizon = 0;
    std::uint64_t seed = 0;
    std::string seed_range;
    std::string preset_name;
    std::vector<std::string> override_strings;
    std::string state_file;
    std::string out_dir;
    std::uint64_t checkpoint_every = 0;
    int workers = 0;
    bool no_traces = false;
    bool no_summary = false;

    app.add_option("--config", config_path, "JSON config file (flags override its values)");
    app.add_option("--dimension", dimensions, "Hilbert-space dimension(s), repeatable");
    app.add_option("--horizon", horizon, "total measurement budget T per run");
    auto* seed_opt = app.add_option("--seed", seed, "single run seed");
    auto* seeds_opt =
        app.add_option("--seeds", seed_range, "seed range A..B (half-open, B excluded)");
    app.add_option("--preset", preset_name, "constant preset: paper | practical");
    app.add_option("--override", override_strings,
                   "constant override KEY=VALUE, repeatable");
    app.add_option("--state-file", state_file,
                   "explicit hidden state ('re im' amplitude pairs, one per line)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--checkpoint-every", checkpoint_every,
                   "checkpoint cadence in copies (0 = horizon/1000)");
    app.add_option("--workers", workers, "parallel run cells");
    app.add_flag("--no-traces", no_traces, "skip CSV trace emission");
    app.add_flag("--no-summary", no_summary, "skip summary.json emission");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    if (seed_opt->count() > 0 && seeds_opt->count() > 0) {
        throw ConfigError("seed: --seed conflicts with --seeds");
    }

    ExperimentConfig cfg = base;
    if (app.count("--dimension") > 0) cfg.dimensions = dimensions;
    if (app.count("--horizon") > 0) cfg.horizon = horizon;
    if (seed_opt->count() > 0) cfg.seeds = {seed};
    if (seeds_opt->count() > 0) {
        const auto [lo, hi] = parse_seed_range(seed_range);
        cfg.seeds.clear();
        for (std::uint64_t s = lo; s < hi; ++s) cfg.seeds.push_back(s);
    }
    if (app.count("--preset") > 0) cfg.preset = preset_from_string(preset_name);
    if (app.count("--override") > 0) {
        for (const auto& [k, v] : parse_override_strings(override_strings)) {
            cfg.overrides[k] = v;
        }
    }
    if (app.count("--state-file") > 0) cfg.state_file = state_file;
    if (app.count("--out") > 0) cfg.out_dir = out_dir;
    if (app.count("--checkpoint-every") > 0) cfg.checkpoint_every = checkpoint_every;
    if (app.count("--workers") > 0) cfg.workers = workers;
    if (no_traces) cfg.emit_traces = false;
    if (no_summary) cfg.emit_summary = false;

    validate_config(cfg);
    return cfg;
}

PureState load_state_file(const std::string& path, Eigen::Index d) {
    std::ifstream file(path);
    if (!file) throw ConfigError("state-file: cannot open '" + path + "'");
    std::vector<Complex> amps;
    double re = 0.0, im = 0.0;
    while (file >> re >> im) {
        amps.emplace_back(re, im);
    }
    if (static_cast<Eigen::Index>(amps.size()) != d) {
        throw ConfigError("state-file: expected " + std::to_string(d) +
                          " amplitude lines, found " + std::to_string(amps.size()));
    }
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = amps[static_cast<std::size_t>(i)];
    const double norm = v.norm();
    if (std::abs(norm - 1.0) > 1e-6) {
        std::cerr << "warning: state file norm deviates from 1 by " << std::abs(norm - 1.0)
                  << "; renormalizing\n";
    }
    return PureState::normalized(std::move(v));
}

namespace {

struct FitAccumulator {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long n = 0;
    void add(double x, double y) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    double slope() const {
        const double denom = n * sxx - sx * sx;
        if (n < 2 || std::abs(denom) < 1e-30) return 0.0;
        return (n * sxy - sx * sy) / denom;
    }
};

ScalingReport build_scaling_report(const ExperimentConfig& cfg,
                                   const std::vector<CellResult>& cells) {
    ScalingReport report;
    for (int d : cfg.dimensions) {
        ScalingCell cell;
        cell.dimension = d;
        cell.horizon = cfg.horizon;
        std::vector<double> regrets;
        std::vector<double> infids;
        FitAccumulator regret_fit;
        FitAccumulator infid_fit;
        for (const CellResult& c : cells) {
            if (c.dimension != d || !c.ok || !c.record.has_value()) continue;
            cell.seeds.push_back(c.seed);
            const TraceSummary s = summarize_trace(c.record->trace);
            regrets.push_back(s.final_regret);
            infids.push_back(s.final_infidelity);
            for (const Checkpoint& ck : c.record->trace) {
                if (ck.epoch == 0 || ck.t == 0) continue;
                const double lt = std::log(static_cast<double>(ck.t));
                regret_fit.add(lt * lt, ck.cumulative_regret);
                if (ck.online_infidelity.has_value() && *ck.online_infidelity > 0.0) {
                    infid_fit.add(lt, std::log(*ck.online_infidelity));
                }
            }
        }
        const auto mean_std = [](const std::vector<double>& xs) {
            if (xs.empty()) return std::pair<double, double>{0.0, 0.0};
            double mean = 0.0;
            for (double x : xs) mean += x;
            mean /= static_cast<double>(xs.size());
            double var = 0.0;
            for (double x : xs) var += (x - mean) * (x - mean);
            var = xs.size() > 1 ? var / static_cast<double>(xs.size() - 1) : 0.0;
            return std::pair<double, double>{mean, std::sqrt(var)};
        };
        std::tie(cell.mean_final_regret, cell.stddev_final_regret) = mean_std(regrets);
        std::tie(cell.mean_final_infidelity, cell.stddev_final_infidelity) =
            mean_std(infids);
        cell.regret_vs_log2t_slope = regret_fit.slope();
        cell.infidelity_exponent = infid_fit.slope();
        report.cells.push_back(std::move(cell));
    }
    return report;
}

}  // namespace

BatchResult run_batch(const ExperimentConfig& cfg) {
    validate_config(cfg);
    // Preflight every dimension's derived constants and warm-up cost so that
    // configuration mistakes surface as ConfigError (CLI exit 2) instead of
    // as per-cell run failures.
    for (int d : cfg.dimensions) {
        const AlgorithmConstants consts =
            derive_constants(d, cfg.horizon, cfg.preset, cfg.overrides);
        const WarmupConfig wcfg = make_warmup_config(d, consts.delta_w, consts.c_w);
        if (static_cast<std::uint64_t>(wcfg.total_samples) >= cfg.horizon) {
            throw ConfigError("horizon: must exceed the warm-up cost of " +
                              std::to_string(wcfg.total_samples) + " copies at d=" +
                              std::to_string(d));
        }
    }
    fs::create_directories(cfg.out_dir);

    std::optional<PureState> fixed_state;
    if (!cfg.state_file.empty()) {
        fixed_state = load_state_file(cfg.state_file, cfg.dimensions.front());
    }

    struct CellKey {
        int dimension;
        std::uint64_t seed;
    };
    std::vector<CellKey> cells_to_run;
    for (int d : cfg.dimensions) {
        for (std::uint64_t s : cfg.seeds) cells_to_run.push_back({d, s});
    }

    BatchResult batch;
    batch.cells.resize(cells_to_run.size());

    std::atomic<std::size_t> next{0};
    const int n_workers = std::min<int>(cfg.workers, static_cast<int>(cells_to_run.size()));
    auto worker = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= cells_to_run.size()) return;
            const CellKey key = cells_to_run[idx];
            CellResult& out = batch.cells[idx];
            out.dimension = key.dimension;
            out.seed = key.seed;
            try {
                Environment env =
                    fixed_state ? Environment::with_state(*fixed_state, key.seed)
                                : Environment::with_random_state(key.dimension, key.seed);
                RunOptions opts;
                opts.preset = cfg.preset;
                opts.overrides = cfg.overrides;
                opts.checkpoint_every = cfg.checkpoint_every;
                RunRecord rec = run(env, key.dimension, cfg.horizon, opts);
                if (cfg.emit_traces) {
                    const fs::path path = fs::path(cfg.out_dir) /
                                          ("trace_d" + std::to_string(key.dimension) +
                                           "_s" + std::to_string(key.seed) + ".csv");
                    emit_trace(rec, path);
                    out.trace_path = path.string();
                }
                out.record = std::move(rec);
                out.ok = true;
            } catch (const std::exception& e) {
                out.ok = false;
                out.error = e.what();
            }
        }
    };

    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    batch.report = build_scaling_report(cfg, batch.cells);
    batch.all_ok = std::all_of(batch.cells.begin(), batch.cells.end(),
                               [](const CellResult& c) { return c.ok; });

    if (cfg.emit_summary) {
        const fs::path path = fs::path(cfg.out_dir) / "summary.json";
        std::ofstream file(path, std::ios::binary);
        if (!file) {
            batch.all_ok = false;
        } else {
            file << batch_summary_json(cfg, batch) << '\n';
            if (!file) batch.all_ok = false;
        }
    }
    return batch;
}

std::string batch_summary_json(const ExperimentConfig& cfg, const BatchResult& batch) {
    json runs = json::array();
    for (const CellResult& c : batch.cells) {
        json entry{{"dimension", c.dimension}, {"seed", c.seed}, {"ok", c.ok}};
        if (c.ok && c.record.has_value()) {
            const TraceSummary s = summarize_trace(c.record->trace);
            entry["trace"] = fs::path(c.trace_path).filename().string();
            entry["total_copies"] = s.total_copies;
            entry["warmup_copies"] = s.warmup_copies;
            entry["final_regret"] = s.final_regret;
            entry["final_infidelity"] = s.final_infidelity;
            entry["epochs_executed"] = s.epochs_executed;
            entry["lambda_final"] = s.lambda_final;
        } else {
            entry["error"] = c.error;
        }
        runs.push_back(std::move(entry));
    }

    json scaling = json::array();
    for (const ScalingCell& cell : batch.report.cells) {
        scaling.push_back(json{{"dimension", cell.dimension},
                               {"horizon", cell.horizon},
                               {"seed_count", cell.seeds.size()},
                               {"seeds", cell.seeds},
                               {"mean_final_regret", cell.mean_final_regret},
                               {"stddev_final_regret", cell.stddev_final_regret},
                               {"mean_final_infidelity", cell.mean_final_infidelity},
                               {"stddev_final_infidelity", cell.stddev_final_infidelity},
                               {"regret_vs_log2t_slope", cell.regret_vs_log2t_slope},
                               {"infidelity_exponent", cell.infidelity_exponent}});
    }

    json summary{{"config", summary_config_echo(cfg)},
                 {"runs", runs},
                 {"scaling", scaling}};
    return summary.dump(2);
}

}  // namespace psmaqb
