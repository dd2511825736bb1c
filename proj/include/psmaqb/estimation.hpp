#pragma once

#include <vector>

#include "psmaqb/environment.hpp"
#include "psmaqb/tangent.hpp"

namespace psmaqb {

/*
 * Scalar form of the tangent design superoperator. Exploring all d_tan
 * directions of an orthonormal tangent basis with a common weight keeps the
 * design isotropic, so a single eigenvalue λ carries the whole operator:
 *
 *   V_s = λ_s · I,   λ_s = λ_{s-1} + (ω/2)·sin²(√(2/λ_{s-1})),   λ_0 = μ_prev.
 *
 * For μ_prev ≥ 2 and ω = μ_prev/β_var with β_var ≥ 1, the eigenvalue obeys
 *
 *   μ_prev² + 2·sin²(1)·ω·s  ≤  λ_s²  ≤  μ_prev² + 3·ω·s.
 */
struct DesignState {
    double mu_prev = 0.0;   // inherited precision μ_{m-1} (hot start)
    double omega = 0.0;     // epoch weight ω_m
    double lambda = 0.0;    // common eigenvalue λ_s
    long steps_applied = 0;
};

// λ = μ_prev, zero steps. ω is set separately by the engine.
DesignState design_init(double mu_prev);

// One full step over all d_tan directions.
DesignState design_step(DesignState ds);

/*
 * Running weighted sum Σ ω·Y·O of one repetition block, anchored at the
 * epoch's base state. Discarded wholesale at epoch end; tangent data never
 * crosses epochs.
 */
struct BlockAccumulator {
    TangentVector weighted_sum;
    int block_index = 0;

    static BlockAccumulator zero(const PureState& base, int block_index) {
        return BlockAccumulator{TangentVector::zero(base), block_index};
    }
};

// weighted_sum += ω · y · step_scale · direction. The direction must be unit
// norm and anchored at the accumulator's base.
void accumulate(BlockAccumulator& acc, const DifferenceObservation& obs,
                const TangentVector& direction, double omega);

// Δ̂ = V⁻¹(Σ ω Y O) = weighted_sum / λ in the isotropic design.
TangentVector solve_block(const BlockAccumulator& acc, double final_lambda);

// ‖v‖_V = √⟨v, V(v)⟩ = √λ · ‖v‖_F for the isotropic design.
double weighted_norm(const TangentVector& v, double lambda);

// Distance-median Median-of-Means selection.
struct MoMResult {
    int selected_index = 0;              // j*
    TangentVector estimate;              // Δ̂^(j*)
    std::vector<double> median_distances;  // y_j for every block
};

/*
 * For each block j, y_j = median over l ≠ j of ‖Δ̂^(j) − Δ̂^(l)‖_V, where the
 * median of an odd count is the middle order statistic and of an even count
 * the lower-middle one; j* minimizes y_j with ties broken by lowest index.
 */
MoMResult mom_select(const std::vector<TangentVector>& estimates, double lambda);

// Regularization bias B = μ_prev · V⁻¹(Δ_*) = (μ_prev/λ)·Δ_* introduced by
// the hot start; exposed for diagnostics and error decompositions.
TangentVector bias_vector(const TangentVector& delta_star, double mu_prev,
                          double final_lambda);

}  // namespace psmaqb
