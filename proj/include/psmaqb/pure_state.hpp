#pragma once

#include <Eigen/Dense>
#include <complex>

#include "psmaqb/rng.hpp"

namespace psmaqb {

inline constexpr double kStructuralTol = 1e-10;   // state/tangency/basis invariants
inline constexpr double kArithmeticTol = 1e-12;   // pure arithmetic identities

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Unit complex d-vector representing the rank-one projector |ψ⟩⟨ψ|.
// Amplitudes differing by a global phase describe the same projector, so all
// comparisons go through overlap moduli rather than amplitude equality.
class PureState {
public:
    // Validating constructor: requires ‖amps‖ = 1 within 1e-10.
    explicit PureState(Vector amplitudes);

    // Renormalizing factory for externally supplied vectors (state files,
    // sampled Gaussians). Throws only on (near-)zero input.
    static PureState normalized(Vector amplitudes);

    static PureState basis_state(Eigen::Index d, Eigen::Index k);

    // Haar-uniform pure state: normalized complex-normal vector.
    static PureState haar_random(Eigen::Index d, rng::Stream& stream);

    Eigen::Index dim() const { return amps_.size(); }
    const Vector& amplitudes() const { return amps_; }

    // Dense |ψ⟩⟨ψ|. Used by oracles, warm-up inversion, and dense checks.
    Matrix projector() const { return amps_ * amps_.adjoint(); }

    // |⟨ψ|other⟩|², the projector-level overlap.
    double overlap2(const PureState& other) const;

private:
    struct unchecked_t {};
    PureState(Vector amplitudes, unchecked_t) : amps_(std::move(amplitudes)) {}

    Vector amps_;
};

// F(p, q) = |⟨ψ_p|ψ_q⟩|² ∈ [0, 1].
double fidelity(const PureState& p, const PureState& q);

// ‖P − Q‖_F² = 2(1 − |⟨ψ_p|ψ_q⟩|²) ∈ [0, 2].
double frobenius_dist2(const PureState& p, const PureState& q);

// True iff the two states represent the same projector: overlap² ≥ 1 − 1e-10.
bool same_projector(const PureState& p, const PureState& q);

namespace detail {
void check_same_dim(Eigen::Index a, Eigen::Index b, const char* where);
}

}  // namespace psmaqb
