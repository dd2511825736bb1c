#include "psmaqb/environment.hpp"

namespace psmaqb {

Environment Environment::with_random_state(Eigen::Index d, std::uint64_t seed) {
    rng::Stream state_stream(rng::derive_key(seed, {rng::kStateSample}));
    return Environment(PureState::haar_random(d, state_stream), seed);
}

Environment Environment::with_state(PureState state, std::uint64_t seed) {
    return Environment(std::move(state), seed);
}

int Environment::measure(const PureState& action, rng::Stream& stream) {
    const double p = hidden_state_.overlap2(action);
    ++copies_consumed_;
    return stream.next_uniform() < p ? 1 : 0;
}

DifferenceObservation Environment::measure_pair(const PureState& a_plus,
                                                const PureState& a_minus, double step_scale,
                                                rng::Stream& plus_stream,
                                                rng::Stream& minus_stream) {
    const int x_plus = measure(a_plus, plus_stream);
    const int x_minus = measure(a_minus, minus_stream);
    return DifferenceObservation{0.5 * (x_plus - x_minus), step_scale};
}

EnvironmentEvaluator Environment::evaluator() const {
    return EnvironmentEvaluator(this);
}

double EnvironmentEvaluator::true_expectation(const PureState& action) const {
    return env_->hidden_state_.overlap2(action);
}

double EnvironmentEvaluator::regret_increment(const PureState& action) const {
    return 1.0 - env_->hidden_state_.overlap2(action);
}

}  // namespace psmaqb
