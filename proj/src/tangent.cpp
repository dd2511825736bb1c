#include "psmaqb/tangent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace psmaqb {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

void check_same_base(const PureState& a, const PureState& b, const char* where) {
    detail::check_same_dim(a.dim(), b.dim(), where);
    if (a.overlap2(b) < 1.0 - kStructuralTol) {
        throw std::invalid_argument(std::string(where) +
                                    ": tangent vectors anchored at different base states");
    }
}

// Phase factor ⟨ψ_a|ψ_b⟩ between two same-projector bases (modulus ≈ 1).
Complex base_phase(const PureState& a, const PureState& b) {
    return a.amplitudes().dot(b.amplitudes());
}

}  // namespace

TangentVector::TangentVector(PureState base, Vector phi)
    : base_(std::move(base)), phi_(std::move(phi)) {
    detail::check_same_dim(base_.dim(), phi_.size(), "TangentVector");
    const double overlap = std::abs(base_.amplitudes().dot(phi_));
    if (overlap > kStructuralTol * std::max(1.0, phi_.norm())) {
        throw std::invalid_argument("TangentVector: phi not orthogonal to the base state");
    }
}

TangentVector TangentVector::zero(const PureState& base) {
    Vector phi = Vector::Zero(base.dim());
    return TangentVector(base, std::move(phi), unchecked_t{});
}

Matrix TangentVector::matrix() const {
    const Vector& psi = base_.amplitudes();
    Matrix off = phi_ * psi.adjoint();
    return (off + off.adjoint()) / kSqrt2;
}

TangentVector& TangentVector::operator+=(const TangentVector& other) {
    check_same_base(base_, other.base_, "TangentVector::operator+=");
    phi_ += base_phase(other.base_, base_) * other.phi_;
    return *this;
}

TangentVector& TangentVector::operator-=(const TangentVector& other) {
    check_same_base(base_, other.base_, "TangentVector::operator-=");
    phi_ -= base_phase(other.base_, base_) * other.phi_;
    return *this;
}

TangentVector& TangentVector::operator*=(double scalar) {
    phi_ *= scalar;
    return *this;
}

double tangent_inner(const TangentVector& v1, const TangentVector& v2) {
    check_same_base(v1.base(), v2.base(), "tangent_inner");
    // Tr(V1 V2) = Re(⟨ψ_1|ψ_2⟩ ⟨φ_2|φ_1⟩); the phase factor is 1 when the
    // bases are amplitude-identical.
    const Complex phase = base_phase(v1.base(), v2.base());
    return (phase * v2.phi().dot(v1.phi())).real();
}

TangentBasis complete_tangent_basis(const PureState& base) {
    const Eigen::Index d = base.dim();
    const Vector& psi = base.amplitudes();

    // Residuals of the canonical vectors after removing the ψ component.
    std::vector<Vector> residuals;
    residuals.reserve(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        Vector r = Vector::Zero(d);
        r(k) = Complex(1.0, 0.0);
        r -= psi * std::conj(psi(k));
        residuals.push_back(std::move(r));
    }

    std::vector<bool> used(d, false);
    std::vector<Vector> completed;
    completed.reserve(d - 1);
    for (Eigen::Index step = 0; step < d - 1; ++step) {
        // Pivot: largest residual norm, ties broken by lowest index.
        Eigen::Index pivot = -1;
        double best = -1.0;
        for (Eigen::Index k = 0; k < d; ++k) {
            if (used[k]) continue;
            const double n = residuals[k].norm();
            if (n > best) {
                best = n;
                pivot = k;
            }
        }
        used[pivot] = true;
        Vector u = residuals[pivot] / best;
        for (Eigen::Index k = 0; k < d; ++k) {
            if (!used[k]) residuals[k] -= u * u.dot(residuals[k]);
        }
        completed.push_back(std::move(u));
    }

    TangentBasis basis{base, {}};
    basis.vectors.reserve(2 * (d - 1));
    for (const Vector& u : completed) {
        basis.vectors.emplace_back(base, u);
        basis.vectors.emplace_back(base, Vector(Complex(0.0, 1.0) * u));
    }
    return basis;
}

TangentVector project_to_tangent(const PureState& base, const Matrix& X) {
    detail::check_same_dim(base.dim(), X.rows(), "project_to_tangent");
    detail::check_same_dim(base.dim(), X.cols(), "project_to_tangent");
    const double asym = (X - X.adjoint()).cwiseAbs().maxCoeff();
    if (asym > kStructuralTol) {
        throw std::invalid_argument("project_to_tangent: matrix not Hermitian (asymmetry = " +
                                    std::to_string(asym) + ")");
    }
    const Vector& psi = base.amplitudes();
    Vector xpsi = X * psi;
    // φ = √2 (I − C) X |ψ⟩
    Vector phi = kSqrt2 * (xpsi - psi * psi.dot(xpsi));
    return TangentVector(base, std::move(phi), TangentVector::unchecked_t{});
}

PureState retract(const PureState& base, const TangentVector& direction, double tau) {
    check_same_base(base, direction.base(), "retract");
    if (std::abs(direction.norm() - 1.0) > kStructuralTol) {
        throw std::invalid_argument("retract: tangent direction must be unit norm");
    }
    const double c = std::cos(tau / kSqrt2);
    const double s = std::sin(tau / kSqrt2);
    Vector amps = c * base.amplitudes() + s * direction.phi();
    return PureState::normalized(std::move(amps));
}

double secant_tangent_norm2(double x) {
    if (!(x >= 0.0 && x <= 2.0)) {
        throw std::domain_error("secant_tangent_norm2: x must lie in [0, 2]");
    }
    return x * (1.0 - x / 2.0);
}

double gamma_hat(double norm) {
    if (!(norm >= 0.0)) {
        throw std::domain_error("gamma_hat: norm must be nonnegative");
    }
    return 0.5 * std::asin(std::min(1.0, kSqrt2 * norm));
}

PureState update_base(const PureState& base, const TangentVector& delta_hat) {
    check_same_base(base, delta_hat.base(), "update_base");
    const double norm = delta_hat.norm();
    if (norm <= 1e-14) {
        return base;  // convention: C_new = C for a zero displacement
    }
    TangentVector direction = (1.0 / norm) * delta_hat;
    return retract(base, direction, kSqrt2 * gamma_hat(norm));
}

double base_update_lipschitz(double x) {
    const double x_max = std::sqrt(3.0 / 8.0);
    if (!(x >= 0.0 && x <= x_max + 1e-12)) {
        throw std::domain_error("base_update_lipschitz: x must lie in [0, sqrt(3/8)]");
    }
    const double w = std::sqrt(1.0 - 2.0 * x * x);
    return 1.0 + 2.0 * x / w + 2.0 * kSqrt2 * x * x * x / (w * (1.0 + w) * (1.0 + w)) +
           2.0 * kSqrt2 * x / (1.0 + w);
}

}  // namespace psmaqb
