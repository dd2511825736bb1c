#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "psmaqb/experiment.hpp"

// Exit codes: 0 full success, 1 any run-cell failure, 2 configuration error.
int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);

    psmaqb::ExperimentConfig cfg;
    try {
        cfg = psmaqb::parse_config(args);
    } catch (const psmaqb::HelpRequested& help) {
        std::cout << help.text;
        return 0;
    } catch (const psmaqb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        const psmaqb::BatchResult batch = psmaqb::run_batch(cfg);
        int failures = 0;
        for (const psmaqb::CellResult& cell : batch.cells) {
            if (cell.ok) {
                std::cout << "run d=" << cell.dimension << " seed=" << cell.seed << " ok";
                if (!cell.trace_path.empty()) std::cout << " trace=" << cell.trace_path;
                std::cout << '\n';
            } else {
                ++failures;
                std::cerr << "run d=" << cell.dimension << " seed=" << cell.seed
                          << " FAILED: " << cell.error << '\n';
            }
        }
        if (failures > 0) {
            std::cerr << failures << " of " << batch.cells.size() << " cells failed\n";
        }
        return batch.all_ok ? 0 : 1;
    } catch (const psmaqb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
