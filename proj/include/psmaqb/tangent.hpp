#pragma once

#include <vector>

#include "psmaqb/pure_state.hpp"

namespace psmaqb {

/*
 * Intrinsic geometry of the pure-state manifold CP^{d-1}.
 *
 * At a base state C = |ψ_c⟩⟨ψ_c| the tangent space is the real vector space
 *
 *   T_C M = { V = (1/√2)(|φ⟩⟨ψ_c| + |ψ_c⟩⟨φ|) : ⟨φ|ψ_c⟩ = 0 },
 *
 * of real dimension d_tan = 2(d-1). A tangent element is stored as the
 * coordinate pair (base, φ) rather than the dense Hermitian matrix: O(d)
 * storage with exact tangency enforcement. With this encoding
 * ‖V‖_F = ‖φ‖_2, and the Frobenius inner product of two tangent elements
 * reduces to Re⟨φ_1|φ_2⟩ once the bases are phase-aligned.
 */
class TangentVector {
public:
    // Validating constructor: requires ⟨φ|ψ_base⟩ = 0 within 1e-10
    // (relative to ‖φ‖ for large coordinate vectors).
    TangentVector(PureState base, Vector phi);

    static TangentVector zero(const PureState& base);

    const PureState& base() const { return base_; }
    const Vector& phi() const { return phi_; }

    // ‖φ‖_2, which equals the Frobenius norm of the encoded matrix.
    double norm() const { return phi_.norm(); }

    // Dense encoded matrix (1/√2)(|φ⟩⟨ψ_base| + |ψ_base⟩⟨φ|).
    Matrix matrix() const;

    // Real-linear operations; both sides must share the base projector.
    TangentVector& operator+=(const TangentVector& other);
    TangentVector& operator-=(const TangentVector& other);
    TangentVector& operator*=(double scalar);
    friend TangentVector operator+(TangentVector lhs, const TangentVector& rhs) {
        lhs += rhs;
        return lhs;
    }
    friend TangentVector operator-(TangentVector lhs, const TangentVector& rhs) {
        lhs -= rhs;
        return lhs;
    }
    friend TangentVector operator*(double scalar, TangentVector v) {
        v *= scalar;
        return v;
    }

private:
    struct unchecked_t {};
    TangentVector(PureState base, Vector phi, unchecked_t)
        : base_(std::move(base)), phi_(std::move(phi)) {}

    friend TangentVector project_to_tangent(const PureState&, const Matrix&);

    PureState base_;
    Vector phi_;
};

// Frobenius inner product Tr(V1 V2) of two tangent elements with a common
// base projector. Bases may differ by a global phase; the phase is aligned
// internally so the result matches the dense-matrix trace.
double tangent_inner(const TangentVector& v1, const TangentVector& v2);

// Ordered Frobenius-orthonormal basis of T_base M, d_tan = 2(d-1) elements.
struct TangentBasis {
    PureState base;
    std::vector<TangentVector> vectors;

    Eigen::Index size() const { return static_cast<Eigen::Index>(vectors.size()); }
};

/*
 * Deterministic orthonormal tangent basis at `base`: complete {ψ_base} to an
 * orthonormal basis {ψ_base, u_1, ..., u_{d-1}} by Gram-Schmidt over the
 * canonical vectors (pivot = largest residual norm, ties to the lowest
 * index), then emit the pairs V(u_k), V(i·u_k). Isotropy of the design makes
 * any such basis an eigenbasis, so this fixed completion serves as the
 * per-epoch measurement basis.
 */
TangentBasis complete_tangent_basis(const PureState& base);

/*
 * Orthogonal projection onto T_base M:
 *
 *   P_C(X) = C X (I−C) + (I−C) X C,   φ = √2 (I−C) X |ψ_base⟩.
 *
 * Idempotent and self-adjoint for the Frobenius inner product; annihilates C
 * and acts as the identity on tangent elements. X must be Hermitian within
 * 1e-10.
 */
TangentVector project_to_tangent(const PureState& base, const Matrix& X);

/*
 * Exact geodesic step: for a unit tangent direction V (‖φ‖ = 1) and signed
 * step τ, returns the pure state cos(τ/√2)|ψ_base⟩ + sin(τ/√2)|φ⟩, whose
 * projector is
 *
 *   cos²(τ/√2) C + sin²(τ/√2)|φ⟩⟨φ| + (1/√2) sin(√2 τ) V.
 */
PureState retract(const PureState& base, const TangentVector& direction, double tau);

// x(1 − x/2): squared norm of the tangent projection of ρ − C when
// x = ‖ρ − C‖_F². Domain x ∈ [0, 2].
double secant_tangent_norm2(double x);

// (1/2)·arcsin(min{1, √2·norm}) ∈ [0, π/4], principal branch; the clamp
// keeps the argument inside the valid branch.
double gamma_hat(double norm);

/*
 * Inverse-retraction base update: move from `base` along the estimated
 * tangent displacement Δ̂,
 *
 *   C_new = Retract_base(√2·γ̂(‖Δ̂‖)·Δ̂/‖Δ̂‖),  C_new = base if Δ̂ = 0.
 *
 * If Δ̂ equals the exact tangent target of a state ρ with ‖ρ−base‖_F² ≤ 1/2,
 * the update recovers ρ. On ‖Δ̂‖ ≤ √(3/8) the map is Lipschitz with constant
 * ≤ 6 and admits the algebraic form W·C + (2/(1+W))·Δ̂² + Δ̂, W = √(1−2‖Δ̂‖²).
 */
PureState update_base(const PureState& base, const TangentVector& delta_hat);

// Analytic Lipschitz bound of the base update at radius x ∈ [0, √(3/8)]:
//   L(x) = 1 + 2x/W + 2√2·x³/(W(1+W)²) + 2√2·x/(1+W), W = √(1−2x²).
double base_update_lipschitz(double x);

}  // namespace psmaqb
