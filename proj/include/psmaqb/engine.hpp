#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "psmaqb/constants.hpp"
#include "psmaqb/environment.hpp"
#include "psmaqb/estimation.hpp"
#include "psmaqb/warmup.hpp"

namespace psmaqb {

/*
 * Per-epoch working state. Everything here is anchored at the epoch's base
 * state and discarded wholesale when the epoch ends; only the scalar
 * precision μ_m survives into the next epoch (hot start).
 */
struct EpochState {
    int m = 1;                 // epoch index (1-based)
    PureState base;            // C_m
    double mu_prev = 0.0;      // μ_{m-1}
    double omega = 0.0;        // ω_m = μ_{m-1}/β_var
    long planned_steps = 0;    // T_m = ⌈α·μ_{m-1}⌉
    DesignState design;        // hot-started at μ_{m-1}
    TangentBasis basis;        // fixed orthonormal tangent basis at C_m
    std::vector<BlockAccumulator> blocks;  // N parallel estimator blocks
};

EpochState make_epoch_state(int m, const PureState& base, double mu_prev,
                            const AlgorithmConstants& consts);

struct EpochSummary {
    int m = 0;
    double mu_prev = 0.0;
    double mu_next = 0.0;      // λ when the epoch ended; μ_m if it completed
    double omega = 0.0;
    long planned_steps = 0;
    long steps_completed = 0;  // full steps actually played
    std::uint64_t copies_used = 0;
    bool truncated = false;
    double mom_norm = 0.0;     // ‖Δ̂_MoM‖_F
    int selected_block = -1;   // j*
    bool clamped = false;      // ‖Δ̂_MoM‖ exceeded the retraction domain √(3/8)
};

// Observation hooks for regret accounting and evaluator-side audits. Hook
// output never feeds back into the learner path, so enabling or disabling
// them cannot change any measurement outcome.
struct EpochHooks {
    // After every consumed copy: the action played, λ_{s-1}, and the step s.
    std::function<void(const PureState& action, double lambda_before, long step)> on_copy;
    // Once per (step, direction), before the 2N measurements of the pair.
    std::function<void(const PureState& a_plus, const PureState& a_minus,
                       double lambda_before)>
        on_pair;
};

struct EpochOutcome {
    EpochSummary summary;
    std::optional<EpochState> next;  // absent when the budget truncated the epoch
};

/*
 * One epoch of the adaptive loop. For s = 1..T_m with the step size
 * τ = 1/√λ_{s-1}: retract the symmetric pair A± = Retract(C_m, ±τ·v_i) for
 * every basis direction, measure each pair once per block, accumulate
 * ω·Y·O into the blocks, and advance the design scalar once per step.
 * Measurement order is fixed: direction ascending, block ascending, + then −.
 *
 * At the epoch end all N blocks are solved with the final λ, the
 * distance-median selector picks Δ̂_MoM, μ_m ← λ, and the next epoch state is
 * hot-started at the updated base. If the copy budget runs out mid-epoch the
 * epoch is truncated: no estimate is produced and no next state is returned.
 */
EpochOutcome run_epoch(Environment& env, EpochState es, const AlgorithmConstants& consts,
                       std::uint64_t budget_remaining, const EpochHooks& hooks = {});

struct Checkpoint {
    std::uint64_t t = 0;       // copies consumed so far
    int epoch = 0;             // 0 during warm-up
    long step = 0;
    double lambda = 0.0;       // 0 during warm-up
    double cumulative_regret = 0.0;
    std::optional<double> online_infidelity;  // absent for t ≤ T_0
};

struct RunOptions {
    Preset preset = Preset::kPractical;
    Overrides overrides;
    std::uint64_t checkpoint_every = 0;  // 0 → ⌈T_total/1000⌉
    bool audit = true;                   // evaluator-side envelope/variance audits
};

struct RunRecord {
    // config echo
    int dimension = 0;
    std::uint64_t horizon = 0;
    std::uint64_t seed = 0;
    Preset preset = Preset::kPractical;
    Overrides overrides;
    std::uint64_t checkpoint_every = 0;

    AlgorithmConstants constants;
    WarmupConfig warmup;

    std::vector<Checkpoint> trace;
    std::vector<EpochSummary> epochs;
    PureState final_estimate;       // current base state when the budget ends
    std::uint64_t total_copies = 0;
    std::uint64_t warmup_copies = 0;
    double final_regret = 0.0;
    double final_infidelity = 0.0;  // 1 − F(ρ, final_estimate)
    bool warmup_within_quarter = false;  // ‖ρ−C_1‖² ≤ 1/4, logged only
    std::uint64_t clamp_events = 0;

    // Evaluator-side audit counters (only populated with RunOptions::audit).
    // Envelope: per consumed copy on epochs where the base-closeness
    // precondition ‖ρ−C_m‖² ≤ L_r²·β_max/μ_{m-1} holds,
    //   regret ≤ ‖ρ−C_m‖² + ‖C_m−A±‖²  and  ‖C_m−A±‖² = 2sin²(τ/√2) ≤ 1/λ.
    // Variance bound: per symmetric pair, from the exact p±,
    //   Var(Y) = (p⁺(1−p⁺)+p⁻(1−p⁻))/4 ≤ ½‖ρ−C_m‖² + ½‖C_m−A±‖².
    // Weight normalization: ω_m·Var(Y) ≤ 1 under the same precondition; this
    // is guaranteed when β_var = L_r²·β_max + 1 (the `paper` preset relation)
    // and is reported, not enforced, under reduced presets.
    std::uint64_t envelope_checked = 0;
    std::uint64_t envelope_violations = 0;
    std::uint64_t variance_bound_checked = 0;
    std::uint64_t variance_bound_violations = 0;
    std::uint64_t omega_var_checked = 0;
    std::uint64_t omega_var_violations = 0;
};

/*
 * Full run: warm-up tomography followed by hot-started epochs until the copy
 * budget T_total is exhausted (the final epoch is truncated at the budget).
 * Every consumed copy, warm-up included, adds its regret increment to the
 * cumulative total, accumulated with compensated summation. Checkpoints are
 * recorded every checkpoint_every copies, at warm-up end, at every epoch
 * boundary, and at the final copy; online infidelity is reported only for
 * t > T_0. Identical inputs produce an identical record.
 */
RunRecord run(Environment& env, int d, std::uint64_t T_total, const RunOptions& opts);

}  // namespace psmaqb
