#include "psmaqb/constants.hpp"

#include <cmath>

namespace psmaqb {

Preset preset_from_string(const std::string& name) {
    if (name == "paper") return Preset::kPaper;
    if (name == "practical") return Preset::kPractical;
    throw ConfigError("unknown preset '" + name + "' (expected 'paper' or 'practical')");
}

std::string to_string(Preset preset) {
    return preset == Preset::kPaper ? "paper" : "practical";
}

namespace {

long ceil_positive(double x, const char* what) {
    const double c = std::ceil(x);
    if (!(c >= 1.0) || c > 9e18) {
        throw ConfigError(std::string(what) + ": value out of range");
    }
    return static_cast<long>(c);
}

void apply_overrides(AlgorithmConstants& k, const Overrides& overrides) {
    for (const auto& [key, value] : overrides) {
        if (key == "beta_stat") {
            k.beta_stat = value;
        } else if (key == "beta_max") {
            k.beta_max = value;
        } else if (key == "beta_var") {
            k.beta_var = value;
        } else if (key == "alpha") {
            if (value < 1.0 || value != std::floor(value)) {
                throw ConfigError("override alpha: must be a positive integer");
            }
            k.alpha = static_cast<long>(value);
        } else if (key == "mu_0") {
            k.mu_0 = value;
        } else if (key == "N") {
            if (value < 2.0 || value != std::floor(value) ||
                static_cast<long>(value) % 2 != 0) {
                throw ConfigError("override N: must be an even integer >= 2");
            }
            k.num_blocks = static_cast<int>(value);
        } else if (key == "L_r") {
            k.lipschitz = value;
        } else if (key == "delta") {
            k.delta = value;
        } else if (key == "delta_w") {
            k.delta_w = value;
        } else if (key == "c_w") {
            k.c_w = value;
        } else {
            throw ConfigError("unknown override key '" + key + "'");
        }
    }
}

void validate(const AlgorithmConstants& k) {
    if (!(k.beta_var >= 1.0)) throw ConfigError("beta_var: must be >= 1");
    if (!(k.mu_0 >= 2.0)) throw ConfigError("mu_0: must be >= 2");
    if (k.num_blocks < 2 || k.num_blocks % 2 != 0) {
        throw ConfigError("N: must be an even integer >= 2");
    }
    if (k.alpha < 1) throw ConfigError("alpha: must be >= 1");
    if (!(k.beta_stat > 0.0)) throw ConfigError("beta_stat: must be positive");
    if (!(k.beta_max > 0.0)) throw ConfigError("beta_max: must be positive");
    if (!(k.lipschitz > 0.0)) throw ConfigError("L_r: must be positive");
    if (!(k.delta > 0.0 && k.delta < 1.0)) throw ConfigError("delta: must lie in (0, 1)");
    if (!(k.delta_w > 0.0 && k.delta_w < 1.0)) {
        throw ConfigError("delta_w: must lie in (0, 1)");
    }
    if (!(k.c_w > 0.0)) throw ConfigError("c_w: must be positive");
}

}  // namespace

AlgorithmConstants derive_constants(int d, std::uint64_t T_total, Preset preset,
                                    const Overrides& overrides) {
    if (d < 2) throw ConfigError("dimension: must be >= 2");
    if (T_total < 1) throw ConfigError("horizon: must be >= 1");

    AlgorithmConstants k;
    k.d_tan = 2 * (d - 1);
    k.c0_sq = std::sin(1.0) * std::sin(1.0);
    k.lipschitz = 6.0;
    const double t = static_cast<double>(T_total);
    k.delta = 1.0 / (t * t);
    k.delta_w = k.delta;
    const double log_ratio = std::log(t / k.delta);

    if (preset == Preset::kPaper) {
        k.beta_stat = 72.0 * (d - 1);
        k.beta_max = 4.0 * k.beta_stat;
        k.beta_var = k.lipschitz * k.lipschitz * k.beta_max + 1.0;
        k.alpha = ceil_positive(8.0 * std::pow(k.lipschitz, 4) * k.beta_var / k.c0_sq,
                                "alpha");
        k.mu_0 = 4.0 * k.lipschitz * k.lipschitz * k.beta_max;
        k.num_blocks = 2 * static_cast<int>(std::ceil(12.0 * log_ratio));
    } else {
        k.beta_stat = 2.0 * (d - 1);
        k.beta_max = 4.0 * k.beta_stat;
        k.beta_var = 4.0;
        k.alpha = 8;
        k.mu_0 = 16.0;
        k.num_blocks = 2 * static_cast<int>(std::ceil(3.0 * log_ratio));
    }

    apply_overrides(k, overrides);
    validate(k);
    return k;
}

long epoch_count_bound_with_ratio(const AlgorithmConstants& consts, double mu_0,
                                  std::uint64_t T_total, double q) {
    if (!(q > 1.0)) throw ConfigError("epoch_count_bound: growth ratio must exceed 1");
    const double per_step = 2.0 * consts.num_blocks * consts.d_tan;
    double mu = mu_0;
    double spent = 0.0;
    long m = 0;
    const double target = static_cast<double>(T_total);
    while (spent < target) {
        ++m;
        spent += per_step * std::ceil(static_cast<double>(consts.alpha) * mu);
        mu *= q;
        if (m > 10000) break;  // horizon exhausted long before this
    }
    return m;
}

long epoch_count_bound(const AlgorithmConstants& consts, double mu_0,
                       std::uint64_t T_total) {
    const double q = std::sqrt(1.0 + 16.0 * std::pow(consts.lipschitz, 4));
    return epoch_count_bound_with_ratio(consts, mu_0, T_total, q);
}

}  // namespace psmaqb
