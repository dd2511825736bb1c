#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "psmaqb/environment.hpp"
#include "psmaqb/errors.hpp"

namespace psmaqb {

/*
 * Constant-accuracy initial tomography. The adaptive phase needs a starting
 * base state C_1 with ‖ρ − C_1‖_F² ≤ 1/4 with probability ≥ 1 − δ_w, using
 * only rank-one two-outcome measurements. Sample cost scales as
 * c_w·d²·ln(1/δ_w), split over 3d² Haar-random projector directions.
 */
struct WarmupConfig {
    double c_w = 40.0;
    double delta_w = 0.0;
    int n_directions = 0;          // 3d² (oversampled frame)
    long reps_per_direction = 0;
    long total_samples = 0;        // n_directions × reps_per_direction
};

// total_samples = ⌈c_w·d²·ln(1/δ_w)⌉ rounded up to a multiple of 3d².
WarmupConfig make_warmup_config(Eigen::Index d, double delta_w, double c_w = 40.0);

/*
 * Linear-inversion core: least-squares fit of a trace-one Hermitian matrix X
 * to the frequency estimates, minimizing Σ_k (Tr(X P_k) − p̂_k)² over the
 * d²−1 traceless Hermitian coordinates, then projection to the top
 * eigenvector. Exposed separately so exact probabilities can be injected.
 */
PureState warmup_invert(const std::vector<PureState>& directions,
                        const Eigen::VectorXd& frequencies, Eigen::Index d);

struct WarmupResult {
    PureState estimate;
    std::uint64_t samples_used = 0;
};

// Measures cfg.total_samples copies against Haar-random directions drawn
// from the warm-up substream and inverts. on_copy (optional) is invoked with
// the played projector after every consumed copy, for regret accounting.
WarmupResult run_warmup(Environment& env, Eigen::Index d, const WarmupConfig& cfg,
                        const std::function<void(const PureState&)>& on_copy = nullptr);

// Orthonormal traceless Hermitian basis of dimension d²−1 (generalized
// Gell-Mann matrices). Shared with dense test oracles.
std::vector<Matrix> traceless_hermitian_basis(Eigen::Index d);

}  // namespace psmaqb
