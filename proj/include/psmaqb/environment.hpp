#pragma once

#include <cstdint>
#include <optional>

#include "psmaqb/pure_state.hpp"
#include "psmaqb/rng.hpp"

namespace psmaqb {

// Outcome of a symmetric measurement pair: y = (x⁺ − x⁻)/2 ∈ {−1/2, 0, +1/2}.
// step_scale records the coefficient sin(√(2/λ))/√2 of the tangent
// observation vector O so the estimator can rebuild ω·y·O without the
// environment knowing anything about the design.
struct DifferenceObservation {
    double y = 0.0;
    double step_scale = 0.0;
};

class EnvironmentEvaluator;

/*
 * Simulated pure-state environment. A hidden state ρ = |ψ⟩⟨ψ| is fixed at
 * construction; each measure() call performs the two-outcome measurement
 * {A, I−A} on a fresh copy and consumes exactly one copy:
 *
 *   Pr(X = 1 | A) = Tr(ρA) = |⟨ψ|ψ_A⟩|².
 *
 * The learner-facing surface exposes only binary outcomes. Ground truth is
 * reachable solely through the evaluator handle, which never touches the
 * measurement random streams.
 *
 * Callers supply the random stream for each draw; streams are derived from
 * the master seed by labeled hashing, so outcomes are deterministic for a
 * fixed seed regardless of evaluation order.
 */
class Environment {
public:
    // Hidden state sampled Haar-uniformly from the state-sampling substream.
    static Environment with_random_state(Eigen::Index d, std::uint64_t seed);

    // Hidden state supplied explicitly.
    static Environment with_state(PureState state, std::uint64_t seed);

    Eigen::Index dim() const { return hidden_state_.dim(); }
    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t copies_consumed() const { return copies_consumed_; }

    // One Bernoulli outcome; consumes one copy.
    int measure(const PureState& action, rng::Stream& stream);

    // Two independent measurements of a symmetric action pair (two copies).
    DifferenceObservation measure_pair(const PureState& a_plus, const PureState& a_minus,
                                       double step_scale, rng::Stream& plus_stream,
                                       rng::Stream& minus_stream);

    // Ground-truth access for regret accounting; see EnvironmentEvaluator.
    EnvironmentEvaluator evaluator() const;

private:
    Environment(PureState state, std::uint64_t seed)
        : hidden_state_(std::move(state)), seed_(seed) {}

    friend class EnvironmentEvaluator;

    PureState hidden_state_;
    std::uint64_t seed_;
    std::uint64_t copies_consumed_ = 0;
};

// Evaluator-only view of the environment. Kept as a separate handle so that
// learner code cannot reach ground truth by accident. None of these methods
// consume copies or advance any random stream.
class EnvironmentEvaluator {
public:
    // Tr(ρA) = |⟨ψ_ρ|ψ_A⟩|².
    double true_expectation(const PureState& action) const;

    // 1 − Tr(ρA) = (1/2)‖ρ − A‖_F².
    double regret_increment(const PureState& action) const;

    const PureState& hidden_state() const { return env_->hidden_state_; }

private:
    friend class Environment;
    explicit EnvironmentEvaluator(const Environment* env) : env_(env) {}

    const Environment* env_;
};

}  // namespace psmaqb
