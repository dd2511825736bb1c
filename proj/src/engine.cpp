#include "psmaqb/engine.hpp"

#include <cmath>
#include <utility>

namespace psmaqb {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
const double kRetractionDomain = std::sqrt(3.0 / 8.0);

// Compensated (Neumaier) summation; keeps 10^8-term regret sums exact to
// double precision.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

EpochState make_epoch_state(int m, const PureState& base, double mu_prev,
                            const AlgorithmConstants& consts) {
    EpochState es{m,
                  base,
                  mu_prev,
                  mu_prev / consts.beta_var,
                  static_cast<long>(std::ceil(static_cast<double>(consts.alpha) * mu_prev)),
                  design_init(mu_prev),
                  complete_tangent_basis(base),
                  {}};
    es.design.omega = es.omega;
    es.blocks.reserve(static_cast<std::size_t>(consts.num_blocks));
    for (int j = 0; j < consts.num_blocks; ++j) {
        es.blocks.push_back(BlockAccumulator::zero(base, j));
    }
    return es;
}

EpochOutcome run_epoch(Environment& env, EpochState es, const AlgorithmConstants& consts,
                       std::uint64_t budget_remaining, const EpochHooks& hooks) {
    const std::uint64_t m = static_cast<std::uint64_t>(es.m);
    const std::uint64_t seed = env.master_seed();
    std::uint64_t remaining = budget_remaining;
    std::uint64_t copies = 0;

    EpochSummary summary;
    summary.m = es.m;
    summary.mu_prev = es.mu_prev;
    summary.omega = es.omega;
    summary.planned_steps = es.planned_steps;

    bool truncated = false;
    for (long step = 1; step <= es.planned_steps && !truncated; ++step) {
        const double lambda_before = es.design.lambda;
        const double tau = 1.0 / std::sqrt(lambda_before);
        const double step_scale = std::sin(kSqrt2 * tau) / kSqrt2;
        bool step_complete = true;

        for (int i = 0; i < consts.d_tan && !truncated; ++i) {
            const TangentVector& dir = es.basis.vectors[static_cast<std::size_t>(i)];
            const PureState a_plus = retract(es.base, dir, tau);
            const PureState a_minus = retract(es.base, dir, -tau);
            if (hooks.on_pair) hooks.on_pair(a_plus, a_minus, lambda_before);

            for (int j = 0; j < consts.num_blocks; ++j) {
                if (remaining == 0) {
                    truncated = true;
                    step_complete = false;
                    break;
                }
                rng::Stream plus_stream(rng::derive_key(
                    seed, {rng::kEpochMeasure, m, static_cast<std::uint64_t>(step),
                           static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), 0}));
                const int x_plus = env.measure(a_plus, plus_stream);
                --remaining;
                ++copies;
                if (hooks.on_copy) hooks.on_copy(a_plus, lambda_before, step);

                if (remaining == 0) {
                    // Mid-pair truncation: the lone outcome cannot form a
                    // difference observation and is dropped.
                    truncated = true;
                    step_complete = false;
                    break;
                }
                rng::Stream minus_stream(rng::derive_key(
                    seed, {rng::kEpochMeasure, m, static_cast<std::uint64_t>(step),
                           static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j), 1}));
                const int x_minus = env.measure(a_minus, minus_stream);
                --remaining;
                ++copies;
                if (hooks.on_copy) hooks.on_copy(a_minus, lambda_before, step);

                const DifferenceObservation obs{0.5 * (x_plus - x_minus), step_scale};
                accumulate(es.blocks[static_cast<std::size_t>(j)], obs, dir, es.omega);
            }
        }

        if (step_complete) {
            es.design = design_step(es.design);
            ++summary.steps_completed;
        }
    }

    summary.copies_used = copies;
    summary.truncated = truncated;
    summary.mu_next = es.design.lambda;
    if (truncated) {
        return EpochOutcome{std::move(summary), std::nullopt};
    }

    const double final_lambda = es.design.lambda;
    std::vector<TangentVector> estimates;
    estimates.reserve(es.blocks.size());
    for (const BlockAccumulator& block : es.blocks) {
        estimates.push_back(solve_block(block, final_lambda));
    }
    MoMResult mom = mom_select(estimates, final_lambda);
    summary.mom_norm = mom.estimate.norm();
    summary.selected_block = mom.selected_index;
    summary.clamped = summary.mom_norm > kRetractionDomain;

    PureState next_base = update_base(es.base, mom.estimate);
    EpochOutcome outcome{std::move(summary),
                         make_epoch_state(es.m + 1, next_base, final_lambda, consts)};
    return outcome;
}

RunRecord run(Environment& env, int d, std::uint64_t T_total, const RunOptions& opts) {
    const AlgorithmConstants consts =
        derive_constants(d, T_total, opts.preset, opts.overrides);
    const WarmupConfig wcfg = make_warmup_config(d, consts.delta_w, consts.c_w);
    if (static_cast<std::uint64_t>(wcfg.total_samples) >= T_total) {
        throw ConfigError("horizon: must exceed the warm-up cost of " +
                          std::to_string(wcfg.total_samples) + " copies");
    }
    const std::uint64_t ckpt_every =
        opts.checkpoint_every > 0 ? opts.checkpoint_every
                                  : (T_total + 999) / 1000;

    const EnvironmentEvaluator ev = env.evaluator();
    CompensatedSum regret;
    std::uint64_t t = 0;
    std::vector<Checkpoint> trace;
    std::vector<EpochSummary> epoch_summaries;

    // --- warm-up phase: regret accrues per copy, infidelity not yet defined
    WarmupResult warm = run_warmup(env, d, wcfg, [&](const PureState& action) {
        regret.add(ev.regret_increment(action));
        ++t;
        if (t % ckpt_every == 0) {
            trace.push_back(Checkpoint{t, 0, static_cast<long>(t), 0.0, regret.value(),
                                       std::nullopt});
        }
    });
    const std::uint64_t warmup_copies = warm.samples_used;
    PureState current_base = warm.estimate;
    const bool warmup_ok = frobenius_dist2(ev.hidden_state(), current_base) <= 0.25;
    if (trace.empty() || trace.back().t != t) {
        trace.push_back(
            Checkpoint{t, 0, static_cast<long>(t), 0.0, regret.value(), std::nullopt});
    }

    // --- epoch phase
    std::uint64_t envelope_checked = 0, envelope_violations = 0;
    std::uint64_t variance_bound_checked = 0, variance_bound_violations = 0;
    std::uint64_t omega_var_checked = 0, omega_var_violations = 0;
    std::uint64_t clamp_events = 0;

    // Per-epoch audit context, refreshed before each run_epoch call.
    double epoch_infid = 0.0;
    double dist2_base = 0.0;
    bool precondition = false;  // ‖ρ−C_m‖² ≤ L_r²·β_max/μ_{m-1}
    double omega_epoch = 0.0;
    int epoch_index = 0;
    double cached_lambda = -1.0;
    double cached_dist2_action = 0.0;

    EpochHooks hooks;
    hooks.on_copy = [&](const PureState& action, double lambda_before, long step) {
        const double rinc = ev.regret_increment(action);
        regret.add(rinc);
        ++t;
        if (opts.audit && precondition) {
            if (lambda_before != cached_lambda) {
                cached_lambda = lambda_before;
                const double s = std::sin(1.0 / std::sqrt(2.0 * lambda_before));
                cached_dist2_action = 2.0 * s * s;  // ‖C_m − A±‖² = 2sin²(τ/√2)
            }
            ++envelope_checked;
            const bool decomposition_ok =
                rinc <= dist2_base + cached_dist2_action + 1e-12;
            const bool step_bound_ok = cached_dist2_action <= 1.0 / lambda_before + 1e-15;
            if (!decomposition_ok || !step_bound_ok) ++envelope_violations;
        }
        if (t % ckpt_every == 0) {
            trace.push_back(Checkpoint{t, epoch_index, step, lambda_before, regret.value(),
                                       epoch_infid});
        }
    };
    hooks.on_pair = [&](const PureState& a_plus, const PureState& a_minus,
                        double lambda_before) {
        if (!opts.audit) return;
        const double p_plus = ev.true_expectation(a_plus);
        const double p_minus = ev.true_expectation(a_minus);
        const double var = 0.25 * (p_plus * (1.0 - p_plus) + p_minus * (1.0 - p_minus));
        const double s = std::sin(1.0 / std::sqrt(2.0 * lambda_before));
        const double dist2_action = 2.0 * s * s;
        ++variance_bound_checked;
        if (var > 0.5 * dist2_base + 0.5 * dist2_action + 1e-12) {
            ++variance_bound_violations;
        }
        if (precondition) {
            ++omega_var_checked;
            if (omega_epoch * var > 1.0 + 1e-12) ++omega_var_violations;
        }
    };

    EpochState es = make_epoch_state(1, current_base, consts.mu_0, consts);
    while (t < T_total) {
        epoch_index = es.m;
        epoch_infid = ev.regret_increment(es.base);
        dist2_base = 2.0 * epoch_infid;
        omega_epoch = es.omega;
        precondition = dist2_base <= consts.lipschitz * consts.lipschitz *
                                         consts.beta_max / es.mu_prev;
        cached_lambda = -1.0;

        EpochOutcome outcome = run_epoch(env, std::move(es), consts, T_total - t, hooks);
        if (outcome.summary.clamped) ++clamp_events;
        const bool completed = outcome.next.has_value();
        if (completed) {
            current_base = outcome.next->base;
        }
        const double boundary_infid = ev.regret_increment(current_base);
        trace.push_back(Checkpoint{t, outcome.summary.m, outcome.summary.steps_completed,
                                   outcome.summary.mu_next, regret.value(), boundary_infid});
        epoch_summaries.push_back(outcome.summary);
        if (!completed) break;
        es = std::move(*outcome.next);
    }

    return RunRecord{d,
                     T_total,
                     env.master_seed(),
                     opts.preset,
                     opts.overrides,
                     ckpt_every,
                     consts,
                     wcfg,
                     std::move(trace),
                     std::move(epoch_summaries),
                     current_base,
                     t,
                     warmup_copies,
                     regret.value(),
                     ev.regret_increment(current_base),
                     warmup_ok,
                     clamp_events,
                     envelope_checked,
                     envelope_violations,
                     variance_bound_checked,
                     variance_bound_violations,
                     omega_var_checked,
                     omega_var_violations};
}

}  // namespace psmaqb
