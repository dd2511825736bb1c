#pragma once

#include <stdexcept>
#include <string>

namespace psmaqb {

// Invalid run configuration (bad preset overrides, budget below the warm-up
// cost, malformed CLI input). The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace psmaqb
