#include "psmaqb/rng.hpp"

#include <cmath>

namespace psmaqb::rng {

std::uint64_t derive_key(std::uint64_t master_seed,
                         std::initializer_list<std::uint64_t> labels) {
    std::uint64_t h = mix64(master_seed ^ 0x6a09e667f3bcc908ULL);
    for (std::uint64_t label : labels) {
        h = mix64(h ^ mix64(label + 0x9e3779b97f4a7c15ULL));
    }
    return h;
}

double Stream::next_normal() noexcept {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    const double u1 = next_uniform_open();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

}  // namespace psmaqb::rng
