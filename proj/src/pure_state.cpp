#include "psmaqb/pure_state.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace psmaqb {

namespace detail {
void check_same_dim(Eigen::Index a, Eigen::Index b, const char* where) {
    if (a != b) {
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}
}  // namespace detail

PureState::PureState(Vector amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() < 2) {
        throw std::invalid_argument("PureState: dimension must be >= 2");
    }
    const double norm = amps_.norm();
    if (std::abs(norm - 1.0) > kStructuralTol) {
        throw std::invalid_argument("PureState: amplitudes not unit norm (|norm-1| = " +
                                    std::to_string(std::abs(norm - 1.0)) + ")");
    }
}

PureState PureState::normalized(Vector amplitudes) {
    if (amplitudes.size() < 2) {
        throw std::invalid_argument("PureState: dimension must be >= 2");
    }
    const double norm = amplitudes.norm();
    if (norm < 1e-12) {
        throw std::invalid_argument("PureState: cannot normalize a (near-)zero vector");
    }
    amplitudes /= norm;
    return PureState(std::move(amplitudes), unchecked_t{});
}

PureState PureState::basis_state(Eigen::Index d, Eigen::Index k) {
    if (d < 2) {
        throw std::invalid_argument("PureState: dimension must be >= 2");
    }
    if (k < 0 || k >= d) {
        throw std::invalid_argument("PureState: basis index out of range");
    }
    Vector v = Vector::Zero(d);
    v(k) = Complex(1.0, 0.0);
    return PureState(std::move(v), unchecked_t{});
}

PureState PureState::haar_random(Eigen::Index d, rng::Stream& stream) {
    if (d < 2) {
        throw std::invalid_argument("PureState: dimension must be >= 2");
    }
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        v(i) = stream.next_complex_normal();
    }
    return normalized(std::move(v));
}

double PureState::overlap2(const PureState& other) const {
    detail::check_same_dim(dim(), other.dim(), "PureState::overlap2");
    return std::norm(amps_.dot(other.amps_));
}

double fidelity(const PureState& p, const PureState& q) {
    return p.overlap2(q);
}

double frobenius_dist2(const PureState& p, const PureState& q) {
    return 2.0 * (1.0 - p.overlap2(q));
}

bool same_projector(const PureState& p, const PureState& q) {
    if (p.dim() != q.dim()) return false;
    return p.overlap2(q) >= 1.0 - kStructuralTol;
}

}  // namespace psmaqb
