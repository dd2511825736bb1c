#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "psmaqb/warmup.hpp"
#include "test_support.hpp"

using namespace psmaqb;
using namespace psmaqb::testing;

TEST_CASE("warm-up configuration arithmetic") {
    // ceil(40 * 4 * ln(1e4)) = 1474, rounded up to a multiple of 12
    const WarmupConfig cfg = make_warmup_config(2, 1e-4, 40.0);
    CHECK(cfg.n_directions == 12);
    CHECK(cfg.reps_per_direction == 123);
    CHECK(cfg.total_samples == 1476);
    CHECK(cfg.total_samples % cfg.n_directions == 0);
    CHECK(cfg.total_samples >= 40.0 * 4.0 * std::log(1e4));

    CHECK_THROWS_AS(make_warmup_config(2, 0.0), ConfigError);
    CHECK_THROWS_AS(make_warmup_config(2, 1e-4, -1.0), ConfigError);
}

TEST_CASE("traceless Hermitian basis is orthonormal") {
    for (Eigen::Index d : {2, 3, 5}) {
        const std::vector<Matrix> basis = traceless_hermitian_basis(d);
        REQUIRE(static_cast<Eigen::Index>(basis.size()) == d * d - 1);
        for (std::size_t a = 0; a < basis.size(); ++a) {
            CHECK(std::abs(basis[a].trace()) <= 1e-14);
            CHECK((basis[a] - basis[a].adjoint()).cwiseAbs().maxCoeff() <= 1e-14);
            for (std::size_t b = a; b < basis.size(); ++b) {
                const double expected = a == b ? 1.0 : 0.0;
                CHECK(std::abs((basis[a] * basis[b]).trace().real() - expected) <= 1e-12);
            }
        }
    }
}

TEST_CASE("noiseless injection recovers the state exactly") {
    auto stream = test_stream(41);
    for (Eigen::Index d : {2, 3, 4}) {
        const PureState rho = random_state(d, stream);
        std::vector<PureState> directions;
        Eigen::VectorXd freqs(3 * d * d);
        for (Eigen::Index k = 0; k < 3 * d * d; ++k) {
            directions.push_back(random_state(d, stream));
            freqs(k) = rho.overlap2(directions.back());
        }
        const PureState recovered = warmup_invert(directions, freqs, d);
        CHECK(1.0 - fidelity(recovered, rho) <= 1e-8);
    }
}

TEST_CASE("degenerate direction set is rejected") {
    auto stream = test_stream(42);
    std::vector<PureState> directions;
    Eigen::VectorXd freqs(3);
    for (int k = 0; k < 3; ++k) {
        directions.push_back(random_state(3, stream));
        freqs(k) = 0.3;
    }
    CHECK_THROWS_AS(warmup_invert(directions, freqs, 3), ConfigError);

    Environment env = Environment::with_random_state(3, 4);
    WarmupConfig bad = make_warmup_config(3, 1e-4);
    bad.n_directions = 4;  // below d^2
    CHECK_THROWS_AS(run_warmup(env, 3, bad), ConfigError);
}

TEST_CASE("run_warmup accounting and determinism") {
    const WarmupConfig cfg = make_warmup_config(3, 1e-4);

    Environment env1 = Environment::with_random_state(3, 91);
    const WarmupResult r1 = run_warmup(env1, 3, cfg);
    CHECK(r1.samples_used == static_cast<std::uint64_t>(cfg.total_samples));
    CHECK(env1.copies_consumed() == r1.samples_used);

    Environment env2 = Environment::with_random_state(3, 91);
    long hook_calls = 0;
    const WarmupResult r2 =
        run_warmup(env2, 3, cfg, [&](const PureState&) { ++hook_calls; });
    CHECK(hook_calls == cfg.total_samples);
    CHECK(r1.estimate.amplitudes() == r2.estimate.amplitudes());

    // different seed, different estimate
    Environment env3 = Environment::with_random_state(3, 92);
    const WarmupResult r3 = run_warmup(env3, 3, cfg);
    CHECK(r1.estimate.overlap2(r3.estimate) < 1.0);
}

TEST_CASE("warm-up reaches the quarter-ball on sampled runs") {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(seed % 3);
        Environment env = Environment::with_random_state(d, 500 + seed);
        const WarmupConfig cfg = make_warmup_config(d, 1e-4);
        const WarmupResult result = run_warmup(env, d, cfg);
        const double dist2 =
            frobenius_dist2(env.evaluator().hidden_state(), result.estimate);
        CHECK(dist2 <= 0.25);
    }
}
