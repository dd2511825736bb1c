#include "psmaqb/warmup.hpp"

#include <cmath>

namespace psmaqb {

WarmupConfig make_warmup_config(Eigen::Index d, double delta_w, double c_w) {
    if (d < 2) throw ConfigError("warmup: dimension must be >= 2");
    if (!(delta_w > 0.0 && delta_w < 1.0)) {
        throw ConfigError("warmup: delta_w must lie in (0, 1)");
    }
    if (!(c_w > 0.0)) throw ConfigError("warmup: c_w must be positive");

    WarmupConfig cfg;
    cfg.c_w = c_w;
    cfg.delta_w = delta_w;
    cfg.n_directions = static_cast<int>(3 * d * d);
    const double raw = std::ceil(c_w * static_cast<double>(d * d) * std::log(1.0 / delta_w));
    cfg.reps_per_direction =
        static_cast<long>(std::ceil(raw / static_cast<double>(cfg.n_directions)));
    if (cfg.reps_per_direction < 1) cfg.reps_per_direction = 1;
    cfg.total_samples = cfg.reps_per_direction * cfg.n_directions;
    return cfg;
}

std::vector<Matrix> traceless_hermitian_basis(Eigen::Index d) {
    std::vector<Matrix> basis;
    basis.reserve(static_cast<std::size_t>(d * d - 1));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            Matrix sym = Matrix::Zero(d, d);
            sym(i, j) = inv_sqrt2;
            sym(j, i) = inv_sqrt2;
            basis.push_back(sym);
            Matrix antisym = Matrix::Zero(d, d);
            antisym(i, j) = Complex(0.0, -inv_sqrt2);
            antisym(j, i) = Complex(0.0, inv_sqrt2);
            basis.push_back(antisym);
        }
    }
    for (Eigen::Index l = 1; l < d; ++l) {
        Matrix diag = Matrix::Zero(d, d);
        const double scale = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
        for (Eigen::Index k = 0; k < l; ++k) diag(k, k) = scale;
        diag(l, l) = -static_cast<double>(l) * scale;
        basis.push_back(diag);
    }
    return basis;
}

PureState warmup_invert(const std::vector<PureState>& directions,
                        const Eigen::VectorXd& frequencies, Eigen::Index d) {
    const auto n = static_cast<Eigen::Index>(directions.size());
    if (n < d * d) {
        throw ConfigError("warmup: need at least d^2 measurement directions");
    }
    if (frequencies.size() != n) {
        throw std::invalid_argument("warmup_invert: frequency count mismatch");
    }

    const std::vector<Matrix> basis = traceless_hermitian_basis(d);
    const auto n_coords = static_cast<Eigen::Index>(basis.size());

    // Tr(X P_k) = 1/d + Σ_a θ_a Tr(B_a P_k) for X = I/d + Σ_a θ_a B_a.
    Eigen::MatrixXd design(n, n_coords);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Matrix proj = directions[static_cast<std::size_t>(k)].projector();
        for (Eigen::Index a = 0; a < n_coords; ++a) {
            design(k, a) = (basis[static_cast<std::size_t>(a)] * proj).trace().real();
        }
    }
    Eigen::VectorXd rhs = frequencies.array() - 1.0 / static_cast<double>(d);
    Eigen::VectorXd theta = design.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);

    Matrix estimate = Matrix::Identity(d, d) / static_cast<double>(d);
    for (Eigen::Index a = 0; a < n_coords; ++a) {
        estimate += theta(a) * basis[static_cast<std::size_t>(a)];
    }

    Eigen::SelfAdjointEigenSolver<Matrix> solver(estimate);
    const Eigen::VectorXd& evals = solver.eigenvalues();
    Eigen::Index top = 0;
    for (Eigen::Index i = 1; i < d; ++i) {
        if (evals(i) > evals(top)) top = i;  // ties keep the lowest index
    }
    return PureState::normalized(solver.eigenvectors().col(top));
}

WarmupResult run_warmup(Environment& env, Eigen::Index d, const WarmupConfig& cfg,
                        const std::function<void(const PureState&)>& on_copy) {
    detail::check_same_dim(env.dim(), d, "run_warmup");
    if (cfg.n_directions < d * d) {
        throw ConfigError("warmup: need at least d^2 measurement directions");
    }

    rng::Stream stream(rng::derive_key(env.master_seed(), {rng::kWarmup}));
    std::vector<PureState> directions;
    directions.reserve(static_cast<std::size_t>(cfg.n_directions));
    for (int k = 0; k < cfg.n_directions; ++k) {
        directions.push_back(PureState::haar_random(d, stream));
    }

    const std::uint64_t before = env.copies_consumed();
    Eigen::VectorXd freqs(cfg.n_directions);
    for (int k = 0; k < cfg.n_directions; ++k) {
        long hits = 0;
        for (long r = 0; r < cfg.reps_per_direction; ++r) {
            hits += env.measure(directions[static_cast<std::size_t>(k)], stream);
            if (on_copy) on_copy(directions[static_cast<std::size_t>(k)]);
        }
        freqs(k) = static_cast<double>(hits) / static_cast<double>(cfg.reps_per_direction);
    }

    PureState estimate = warmup_invert(directions, freqs, d);
    return WarmupResult{std::move(estimate), env.copies_consumed() - before};
}

}  // namespace psmaqb
