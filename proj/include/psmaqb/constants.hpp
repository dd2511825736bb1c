#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "psmaqb/errors.hpp"

namespace psmaqb {

enum class Preset { kPaper, kPractical };

Preset preset_from_string(const std::string& name);
std::string to_string(Preset preset);

/*
 * Derived parameters of one run.
 *
 * The `paper` preset uses the full theory constants:
 *
 *   d_tan = 2(d−1)               N     = 2⌈12·ln(T_total/δ)⌉
 *   c0²   = sin²(1)              β_stat = 72(d−1)
 *   β_max = 4·β_stat             L_r    = 6
 *   β_var = L_r²·β_max + 1       α      = ⌈8·L_r⁴·β_var/c0²⌉
 *   μ_0   = 4·L_r²·β_max         δ = δ_w = 1/T_total²
 *
 * These constants make every epoch astronomically long (T_1 ≈ 10^12 steps at
 * d = 2), so the `practical` preset substitutes smaller defaults with the
 * same structural relations (ω = μ/β_var, T_m = ⌈αμ⌉, hot start, MoM):
 *
 *   β_stat = 2(d−1)   β_max = 4·β_stat   L_r = 6   β_var = 4
 *   α = 8             μ_0 = 16           N = 2⌈3·ln(T_total/δ)⌉
 *
 * Overrides apply last, field by field (no re-derivation of dependent
 * fields), and are echoed in the run record.
 */
struct AlgorithmConstants {
    int d_tan = 0;
    int num_blocks = 0;      // N, MoM repetition count (even, ≥ 2)
    double c0_sq = 0.0;      // sin²(1)
    double beta_stat = 0.0;
    double beta_max = 0.0;
    double lipschitz = 0.0;  // L_r
    double beta_var = 0.0;
    long alpha = 0;
    double mu_0 = 0.0;
    double delta = 0.0;
    double delta_w = 0.0;
    double c_w = 40.0;       // warm-up sample multiplier
};

using Overrides = std::map<std::string, double>;

// Recognized override keys: beta_stat, beta_max, beta_var, alpha, mu_0, N,
// L_r, delta, delta_w, c_w. Throws ConfigError for unknown keys or values
// violating beta_var ≥ 1, mu_0 ≥ 2, N even ≥ 2, alpha ≥ 1.
AlgorithmConstants derive_constants(int d, std::uint64_t T_total, Preset preset,
                                    const Overrides& overrides = {});

/*
 * Epoch-count bound: the smallest M with
 *
 *   Σ_{m ≤ M} 2·N·d_tan·⌈α·μ_0·q^{m−1}⌉ ≥ T_total,
 *
 * for a given per-epoch precision growth ratio q. Under the `paper` preset
 * the ratio is q = √(1 + 16·L_r⁴); epoch lengths then grow geometrically and M
 * is logarithmic in T_total. Used for logging and failure-probability
 * bookkeeping.
 */
long epoch_count_bound_with_ratio(const AlgorithmConstants& consts, double mu_0,
                                  std::uint64_t T_total, double q);

// Same with q = √(1 + 16·L_r⁴) from the constants.
long epoch_count_bound(const AlgorithmConstants& consts, double mu_0,
                       std::uint64_t T_total);

}  // namespace psmaqb
