// Acceptance suite: one criterion per section, one PASS/FAIL line each,
// nonzero exit code if anything fails. Heavy sections parallelize across
// hardware threads; every random stream is fixed-seeded, so the verdicts
// reproduce run to run.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "psmaqb/engine.hpp"
#include "psmaqb/experiment.hpp"
#include "test_support.hpp"

using namespace psmaqb;
using namespace psmaqb::testing;
namespace fs = std::filesystem;

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

template <typename F>
void parallel_for(int n, F&& body) {
    const int hw = std::max(2u, std::thread::hardware_concurrency());
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    };
    const int n_threads = std::min(hw, n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
}

struct CriterionResult {
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------------------
// 1. Geometry identities at tolerance 1e-10, 1000 randomized cases each,
//    d in {2..8}.
CriterionResult criterion_geometry() {
    auto stream = test_stream(0xC1);
    double worst_idem = 0, worst_adj = 0, worst_purity = 0, worst_annih = 0,
           worst_secant = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const Eigen::Index d = 2 + rep % 7;
        const PureState c = random_state(d, stream);

        const Matrix x = random_hermitian(d, stream);
        const Matrix y = random_hermitian(d, stream);
        const Matrix px = dense_tangent_projection(c, x);
        worst_idem = std::max(
            worst_idem, (dense_tangent_projection(c, px) - px).cwiseAbs().maxCoeff());
        worst_adj = std::max(
            worst_adj, std::abs((y * px).trace().real() -
                                (dense_tangent_projection(c, y) * x).trace().real()));

        const TangentVector v = random_tangent(c, 1.0, stream);
        const double tau = 2.0 * stream.next_uniform() - 1.0;
        const PureState a = retract(c, v, tau);
        const Matrix p = a.projector();
        worst_purity = std::max(worst_purity, (p * p - p).cwiseAbs().maxCoeff());
        const TangentVector proj = project_to_tangent(c, p);
        const TangentVector expected = (std::sin(kSqrt2 * tau) / kSqrt2) * v;
        worst_annih = std::max(worst_annih, (proj - expected).norm());

        const PureState rho = random_state(d, stream);
        const double xdist = frobenius_dist2(rho, c);
        const TangentVector delta =
            project_to_tangent(c, Matrix(rho.projector() - c.projector()));
        worst_secant = std::max(
            worst_secant,
            std::abs(delta.norm() * delta.norm() - secant_tangent_norm2(xdist)));
    }
    CriterionResult r;
    r.pass = worst_idem <= 1e-10 && worst_adj <= 1e-10 && worst_purity <= 1e-10 &&
             worst_annih <= 1e-10 && worst_secant <= 1e-12;
    std::ostringstream os;
    os << "idempotence " << worst_idem << ", self-adjointness " << worst_adj
       << ", purity " << worst_purity << ", annihilation " << worst_annih
       << ", secant-tangent " << worst_secant;
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------
// 2. Inverse-retraction exactness and Lipschitz stability.
CriterionResult criterion_inverse_retraction() {
    auto stream = test_stream(0xC2);
    const double domain = std::sqrt(3.0 / 8.0);
    const double kPi = std::acos(-1.0);

    double worst_infid = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const Eigen::Index d = 2 + rep % 4;
        const PureState c = random_state(d, stream);
        const TangentVector dir = random_tangent(c, 1.0, stream);
        const double gamma = stream.next_uniform() * kPi / 6.0;  // ||rho-C||^2 <= 1/2
        const PureState rho = retract(c, dir, kSqrt2 * gamma);
        const TangentVector delta =
            project_to_tangent(c, Matrix(rho.projector() - c.projector()));
        worst_infid =
            std::max(worst_infid, 1.0 - fidelity(update_base(c, delta), rho));
    }

    double worst_ratio = 0.0;
    for (int rep = 0; rep < 10000; ++rep) {
        const Eigen::Index d = 2 + rep % 4;
        const PureState c = random_state(d, stream);
        // Half the pairs are independent draws; half are tiny perturbations
        // near the domain boundary, where the local Lipschitz constant peaks.
        TangentVector d1 = random_tangent(c, stream.next_uniform() * domain, stream);
        TangentVector d2 = TangentVector::zero(c);
        if (rep % 2 == 0) {
            d2 = random_tangent(c, stream.next_uniform() * domain, stream);
        } else {
            d1 = (domain / std::max(d1.norm(), 1e-12) *
                  (1.0 - 1e-4 * stream.next_uniform())) *
                 d1;
            d2 = d1 + random_tangent(c, 1e-5 + 1e-4 * stream.next_uniform(), stream);
            if (d2.norm() > domain) d2 = (domain / d2.norm()) * d2;
        }
        const double denom = (d1 - d2).norm();
        if (denom < 1e-9) continue;
        const Matrix diff =
            update_base(c, d1).projector() - update_base(c, d2).projector();
        worst_ratio = std::max(worst_ratio, diff.norm() / denom);
    }

    const double analytic = base_update_lipschitz(domain);

    CriterionResult r;
    r.pass = worst_infid <= 1e-10 && worst_ratio <= 6.0 &&
             std::abs(analytic - 5.181) <= 1e-3;
    std::ostringstream os;
    os << "recovery infidelity " << worst_infid << ", max sampled ratio " << worst_ratio
       << ", analytic L(sqrt(3/8)) = " << analytic;
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------
// 3. Exact linear model: (p+ - p-)/2 = <Delta_*, O> to 1e-12 on 1e4 configs.
CriterionResult criterion_linear_model() {
    auto stream = test_stream(0xC3);
    double worst = 0.0;
    for (int rep = 0; rep < 10000; ++rep) {
        const Eigen::Index d = 2 + rep % 5;
        const PureState base = random_state(d, stream);
        const PureState rho = random_state(d, stream);
        const TangentVector dir = random_tangent(base, 1.0, stream);
        const double tau = 0.02 + 1.5 * stream.next_uniform();
        const PureState a_plus = retract(base, dir, tau);
        const PureState a_minus = retract(base, dir, -tau);
        const double scale = std::sin(kSqrt2 * tau) / kSqrt2;
        const TangentVector delta =
            project_to_tangent(base, Matrix(rho.projector() - base.projector()));
        const double lhs = 0.5 * (rho.overlap2(a_plus) - rho.overlap2(a_minus));
        worst = std::max(worst, std::abs(lhs - tangent_inner(delta, scale * dir)));
    }
    CriterionResult r;
    r.pass = worst <= 1e-12;
    std::ostringstream os;
    os << "max |(p+ - p-)/2 - <Delta,O>| = " << worst;
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------
// 4. Design isotropy (dense oracle) and scalar growth bounds.
CriterionResult criterion_design() {
    auto stream = test_stream(0xC4);

    double worst_iso = 0.0;  // relative deviation from lambda * I
    for (Eigen::Index d = 2; d <= 6; ++d) {
        const PureState base = random_state(d, stream);
        const TangentBasis canonical = complete_tangent_basis(base);
        const Eigen::Index n = canonical.size();
        Eigen::MatrixXd g(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) g(i, j) = stream.next_normal();
        const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
        TangentBasis rotated{base, {}};
        for (Eigen::Index a = 0; a < n; ++a) {
            TangentVector w = TangentVector::zero(base);
            for (Eigen::Index cidx = 0; cidx < n; ++cidx)
                w += q(a, cidx) * canonical.vectors[static_cast<std::size_t>(cidx)];
            rotated.vectors.push_back(std::move(w));
        }
        const double mu = 2.0 + 5.0 * stream.next_uniform();
        DesignState ds = design_init(mu);
        ds.omega = mu / (1.0 + 3.0 * stream.next_uniform());
        std::vector<DenseObservation> obs;
        for (long s = 0; s < 200; ++s) {
            const double scale = std::sin(std::sqrt(2.0 / ds.lambda)) / kSqrt2;
            for (const TangentVector& v : canonical.vectors)
                obs.push_back(DenseObservation{v, scale, ds.omega});
            ds = design_step(ds);
        }
        const Eigen::MatrixXd dense = dense_design_matrix(rotated, mu, obs);
        const double dev =
            (dense - ds.lambda * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
        worst_iso = std::max(worst_iso, dev / ds.lambda);
    }

    std::atomic<bool> growth_ok{true};
    std::vector<std::uint64_t> config_seeds(1000);
    for (std::size_t i = 0; i < config_seeds.size(); ++i) config_seeds[i] = 77000 + i;
    parallel_for(static_cast<int>(config_seeds.size()), [&](int i) {
        rng::Stream s(rng::derive_key(config_seeds[static_cast<std::size_t>(i)], {4}));
        const double mu = 2.0 + 98.0 * s.next_uniform();
        const double beta_var = 1.0 + 99.0 * s.next_uniform();
        const long horizon = 1000 + static_cast<long>(s.next_uniform() * 99000);
        DesignState ds = design_init(mu);
        ds.omega = mu / beta_var;
        const double c0sq = std::sin(1.0) * std::sin(1.0);
        for (long step = 1; step <= horizon; ++step) {
            ds = design_step(ds);
            const double lam2 = ds.lambda * ds.lambda;
            const double lo = mu * mu + 2.0 * c0sq * ds.omega * step;
            const double hi = mu * mu + 3.0 * ds.omega * step;
            if (lam2 < lo - 1e-9 * lam2 || lam2 > hi + 1e-9 * lam2) {
                growth_ok = false;
                return;
            }
        }
    });

    CriterionResult r;
    r.pass = worst_iso <= 1e-8 && growth_ok.load();
    std::ostringstream os;
    os << "max relative isotropy deviation " << worst_iso << ", growth bounds "
       << (growth_ok.load() ? "hold" : "VIOLATED") << " on 1000 recursions (s <= 1e5)";
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------
// 5. MoM concentration on the synthetic tangent linear model.
CriterionResult criterion_mom_concentration() {
    const int trials = 2000;
    const double radius2 = 72.0 * (3 - 1);  // beta_stat at d = 3
    std::atomic<int> failures{0};
    parallel_for(trials, [&](int trial) {
        rng::Stream s(rng::derive_key(0xC5, {static_cast<std::uint64_t>(trial)}));
        const SyntheticMoMOutcome out = synthetic_mom_trial(3, 24, 60, 2.0, 1.0, 0.3, s);
        if (out.weighted_err2 > radius2) failures.fetch_add(1);
    });
    const double freq = static_cast<double>(failures.load()) / trials;
    const double p = std::exp(-24.0 / 8.0);
    const double threshold = p + 3.0 * std::sqrt(p * (1.0 - p) / trials);
    CriterionResult r;
    r.pass = freq <= threshold;
    std::ostringstream os;
    os << "failure frequency " << freq << " (" << failures.load() << "/" << trials
       << ") vs bound " << threshold;
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------
// 6. Paper-constant bookkeeping and the mu-ratio >= 4 L_r^2 prerequisite.
CriterionResult criterion_constants() {
    bool formulas_ok = true;
    std::ostringstream os;
    for (int d : {2, 3, 5}) {
        const AlgorithmConstants k = derive_constants(d, 1000000, Preset::kPaper);
        const bool ok =
            k.d_tan == 2 * (d - 1) && k.beta_stat == 72.0 * (d - 1) &&
            k.beta_max == 4.0 * k.beta_stat && k.beta_var == 36.0 * k.beta_max + 1.0 &&
            k.mu_0 == 144.0 * k.beta_max && k.num_blocks % 2 == 0 && k.num_blocks >= 2 &&
            k.alpha == static_cast<long>(
                           std::ceil(8.0 * 1296.0 * k.beta_var / k.c0_sq));
        if (!ok) {
            formulas_ok = false;
            os << "formula mismatch at d=" << d << "; ";
        }
    }

    // Scalar recursions at paper alpha with small inherited precision:
    // after T = ceil(alpha * mu) steps with omega = mu / beta_var the
    // precision ratio must reach 4 L_r^2 = 144.
    const AlgorithmConstants k2 = derive_constants(2, 1000000, Preset::kPaper);
    // Longest recursion first keeps the two-thread schedule balanced.
    const std::vector<double> mus{5.0, 3.0, 2.0};
    std::vector<double> ratios(mus.size(), 0.0);
    parallel_for(static_cast<int>(mus.size()), [&](int i) {
        const double mu = mus[static_cast<std::size_t>(i)];
        const double omega = mu / k2.beta_var;
        const long steps = static_cast<long>(
            std::ceil(static_cast<double>(k2.alpha) * mu));
        double lambda = mu;
        for (long s = 0; s < steps; ++s) {
            const double sn = std::sin(std::sqrt(2.0 / lambda));
            lambda += 0.5 * omega * sn * sn;
        }
        ratios[static_cast<std::size_t>(i)] = lambda / mu;
    });
    bool ratio_ok = true;
    os << "mu ratios:";
    for (std::size_t i = 0; i < mus.size(); ++i) {
        os << " mu=" << mus[i] << " -> " << ratios[i];
        if (ratios[i] < 144.0) ratio_ok = false;
    }

    CriterionResult r;
    r.pass = formulas_ok && ratio_ok;
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------
// 7. End-to-end scaling under the practical preset.
CriterionResult criterion_scaling() {
    const std::uint64_t T = 1000000;
    const int seeds_per_d = 20;
    const std::vector<int> dims{2, 3, 4};

    struct RunFigures {
        double rate_early = 0.0;  // Regret(t)/t at the first checkpoint t >= 1e4
        double rate_late = 0.0;   // Regret(T)/T
        double infid_mid = 0.0;   // online infidelity at the first checkpoint t >= T/10
        double infid_final = 0.0;
        bool monotone = true;
        bool envelope_ok = true;
        bool ok = false;
    };
    std::vector<RunFigures> figures(dims.size() * seeds_per_d);

    parallel_for(static_cast<int>(figures.size()), [&](int idx) {
        const int d = dims[static_cast<std::size_t>(idx) / seeds_per_d];
        const std::uint64_t seed = 22000 + static_cast<std::uint64_t>(idx);
        Environment env = Environment::with_random_state(d, seed);
        RunOptions opts;
        opts.preset = Preset::kPractical;
        opts.audit = true;
        const RunRecord rec = run(env, d, T, opts);

        RunFigures f;
        bool got_early = false, got_mid = false;
        double prev_regret = 0.0;
        for (const Checkpoint& c : rec.trace) {
            if (c.cumulative_regret < prev_regret) f.monotone = false;
            prev_regret = c.cumulative_regret;
            if (!got_early && c.t >= 10000) {
                f.rate_early = c.cumulative_regret / static_cast<double>(c.t);
                got_early = true;
            }
            if (!got_mid && c.t >= T / 10 && c.online_infidelity.has_value()) {
                f.infid_mid = *c.online_infidelity;
                got_mid = true;
            }
        }
        f.rate_late = rec.final_regret / static_cast<double>(T);
        f.infid_final = rec.final_infidelity;
        f.envelope_ok = rec.envelope_violations == 0 && rec.envelope_checked > 0 &&
                        rec.variance_bound_violations == 0;
        f.ok = got_early && got_mid;
        figures[static_cast<std::size_t>(idx)] = f;
    });

    bool pass = true;
    std::ostringstream os;
    for (std::size_t di = 0; di < dims.size(); ++di) {
        double early = 0, late = 0, mid = 0, final_infid = 0;
        bool monotone = true, envelope = true, ok = true;
        for (int s = 0; s < seeds_per_d; ++s) {
            const RunFigures& f = figures[di * seeds_per_d + static_cast<std::size_t>(s)];
            early += f.rate_early;
            late += f.rate_late;
            mid += f.infid_mid;
            final_infid += f.infid_final;
            monotone = monotone && f.monotone;
            envelope = envelope && f.envelope_ok;
            ok = ok && f.ok;
        }
        early /= seeds_per_d;
        late /= seeds_per_d;
        mid /= seeds_per_d;
        final_infid /= seeds_per_d;

        const bool sublinear = late < 0.25 * early;           // (a)
        const bool decay = final_infid < 10.0 * (mid / 10.0);  // (b)
        pass = pass && sublinear && decay && monotone && envelope && ok;
        os << "d=" << dims[di] << ": rate " << early << " -> " << late
           << (sublinear ? " (sublinear ok)" : " (SUBLINEARITY FAIL)") << ", infid "
           << mid << " -> " << final_infid << (decay ? " (decay ok)" : " (DECAY FAIL)")
           << (monotone ? "" : " [NON-MONOTONE]")
           << (envelope ? "" : " [ENVELOPE VIOLATION]") << "; ";
    }
    CriterionResult r;
    r.pass = pass;
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------
// 8. Warm-up calibration at the default c_w.
CriterionResult criterion_warmup() {
    const int runs = 500;
    const double delta_w = 1e-4;
    bool pass = true;
    std::ostringstream os;
    for (int d : {2, 3, 4}) {
        const WarmupConfig cfg = make_warmup_config(d, delta_w);
        std::atomic<int> failures{0};
        parallel_for(runs, [&](int i) {
            Environment env = Environment::with_random_state(
                d, 331000 + static_cast<std::uint64_t>(d) * 10000 +
                       static_cast<std::uint64_t>(i));
            const WarmupResult result = run_warmup(env, d, cfg);
            if (frobenius_dist2(env.evaluator().hidden_state(), result.estimate) > 0.25) {
                failures.fetch_add(1);
            }
        });
        const double freq = static_cast<double>(failures.load()) / runs;
        const double threshold =
            delta_w + 3.0 * std::sqrt(delta_w * (1.0 - delta_w) / runs);
        if (freq > threshold) pass = false;
        os << "d=" << d << ": " << failures.load() << "/" << runs << " failures (bound "
           << threshold << "); ";
    }
    CriterionResult r;
    r.pass = pass;
    r.detail = os.str();
    return r;
}

// ---------------------------------------------------------------------------
// 9. CLI determinism across reruns and worker counts.
CriterionResult criterion_determinism() {
    const std::string cli = PSMAQB_CLI_PATH;
    const fs::path base = fs::temp_directory_path() / "psmaqb_acceptance_determinism";
    fs::remove_all(base);
    fs::create_directories(base);

    const std::string common =
        " --dimension 3 --horizon 20000 --seeds 0..3 --preset practical "
        "--checkpoint-every 500";
    const std::vector<std::pair<std::string, int>> variants = {
        {"a", 1}, {"b", 1}, {"c", 4}};
    for (const auto& [tag, workers] : variants) {
        const std::string cmd = cli + common + " --out " + (base / tag).string() +
                                " --workers " + std::to_string(workers) +
                                " > /dev/null";
        if (std::system(cmd.c_str()) != 0) {
            return CriterionResult{false, "CLI invocation failed: " + cmd};
        }
    }

    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    bool identical = true;
    std::vector<std::string> names{"summary.json"};
    for (int s = 0; s < 3; ++s) names.push_back("trace_d3_s" + std::to_string(s) + ".csv");
    for (const std::string& name : names) {
        const std::string ref = slurp(base / "a" / name);
        if (ref.empty() || ref != slurp(base / "b" / name) ||
            ref != slurp(base / "c" / name)) {
            identical = false;
        }
    }
    CriterionResult r;
    r.pass = identical;
    r.detail = identical ? "rerun and worker-count variants byte-identical"
                         : "outputs differ between variants";
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    struct Entry {
        int id;
        const char* name;
        std::function<CriterionResult()> fn;
    };
    const std::vector<Entry> entries = {
        {1, "geometry identities (1000 cases, d=2..8, tol 1e-10)", criterion_geometry},
        {2, "inverse-retraction exactness and Lipschitz <= 6", criterion_inverse_retraction},
        {3, "tangent linear-model unbiasedness (1e4 configs, 1e-12)", criterion_linear_model},
        {4, "design isotropy and eigenvalue growth bounds", criterion_design},
        {5, "MoM concentration (d=3, N=24, 2000 trials)", criterion_mom_concentration},
        {6, "paper-constant bookkeeping and mu-ratio >= 144", criterion_constants},
        {7, "end-to-end scaling, d={2,3,4}, T=1e6, 20 seeds", criterion_scaling},
        {8, "warm-up calibration (500 runs per d)", criterion_warmup},
        {9, "byte-identical CLI outputs across reruns/workers", criterion_determinism},
    };

    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const Entry& e : entries) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), e.id) == selected.end()) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        const CriterionResult result = e.fn();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("[%s] %d. %s  (%.1fs)\n", result.pass ? "PASS" : "FAIL", e.id,
                    e.name, secs);
        std::printf("       %s\n", result.detail.c_str());
        if (!result.pass) ++failures;
    }
    if (failures > 0) std::printf("%d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
