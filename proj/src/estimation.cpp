#include "psmaqb/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace psmaqb {

DesignState design_init(double mu_prev) {
    if (!(mu_prev > 0.0)) {
        throw std::invalid_argument("design_init: mu_prev must be positive");
    }
    return DesignState{mu_prev, 0.0, mu_prev, 0};
}

DesignState design_step(DesignState ds) {
    const double s = std::sin(std::sqrt(2.0 / ds.lambda));
    ds.lambda += 0.5 * ds.omega * s * s;
    ++ds.steps_applied;
    return ds;
}

void accumulate(BlockAccumulator& acc, const DifferenceObservation& obs,
                const TangentVector& direction, double omega) {
    if (std::abs(direction.norm() - 1.0) > kStructuralTol) {
        throw std::invalid_argument("accumulate: direction must be unit norm");
    }
    const double coeff = omega * obs.y * obs.step_scale;
    if (coeff == 0.0) return;
    acc.weighted_sum += coeff * direction;
}

TangentVector solve_block(const BlockAccumulator& acc, double final_lambda) {
    if (!(final_lambda > 0.0)) {
        throw std::invalid_argument("solve_block: final_lambda must be positive");
    }
    return (1.0 / final_lambda) * acc.weighted_sum;
}

double weighted_norm(const TangentVector& v, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("weighted_norm: lambda must be positive");
    }
    return std::sqrt(lambda) * v.norm();
}

namespace {

// Median convention: odd count -> middle order statistic, even count ->
// lower-middle. The selector's proof needs |S_{j*}| >= N/2, which the lower
// median guarantees.
double median_in_place(std::vector<double>& values) {
    const std::size_t n = values.size();
    const std::size_t idx = (n % 2 == 1) ? (n - 1) / 2 : n / 2 - 1;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx),
                     values.end());
    return values[idx];
}

}  // namespace

MoMResult mom_select(const std::vector<TangentVector>& estimates, double lambda) {
    const std::size_t n = estimates.size();
    if (n < 2) {
        throw std::invalid_argument("mom_select: need at least 2 block estimates");
    }

    // Anchor mismatches surface through the pairwise differences below.
    std::vector<double> medians(n, 0.0);
    std::vector<double> dists;
    dists.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        dists.clear();
        for (std::size_t l = 0; l < n; ++l) {
            if (l == j) continue;
            dists.push_back(weighted_norm(estimates[j] - estimates[l], lambda));
        }
        medians[j] = median_in_place(dists);
    }

    std::size_t best = 0;
    for (std::size_t j = 1; j < n; ++j) {
        if (medians[j] < medians[best]) best = j;  // ties keep the lowest index
    }
    return MoMResult{static_cast<int>(best), estimates[best], std::move(medians)};
}

TangentVector bias_vector(const TangentVector& delta_star, double mu_prev,
                          double final_lambda) {
    if (!(final_lambda > 0.0)) {
        throw std::invalid_argument("bias_vector: final_lambda must be positive");
    }
    return (mu_prev / final_lambda) * delta_star;
}

}  // namespace psmaqb
