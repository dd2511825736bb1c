#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>

namespace psmaqb::rng {

// SplitMix64 finalizer. Full-avalanche 64-bit mixer used both as the
// per-stream generator and as the label hash that derives stream keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// Stable labeled hashing: every (master seed, label...) tuple maps to one
// stream key, independent of evaluation order or thread scheduling.
std::uint64_t derive_key(std::uint64_t master_seed,
                         std::initializer_list<std::uint64_t> labels);

// Top-level stream labels. Measurement streams append (epoch, step,
// direction, repetition, sign) after kEpochMeasure.
enum StreamLabel : std::uint64_t {
    kStateSample = 1,
    kWarmup = 2,
    kEpochMeasure = 3,
};

// Counter-based uniform stream (SplitMix64 over a derived key). Cheap to
// construct, so per-measurement streams are practical.
class Stream {
public:
    explicit Stream(std::uint64_t key) noexcept : state_(key) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double next_uniform_open() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the paired value is cached.
    double next_normal() noexcept;

    std::complex<double> next_complex_normal() noexcept {
        const double re = next_normal();
        const double im = next_normal();
        return {re, im};
    }

private:
    std::uint64_t state_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace psmaqb::rng
