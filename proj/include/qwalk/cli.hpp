#pragma once

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/config.hpp"

namespace qwalk::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 2,
    kSimulationError = 3,
    kIoError = 4,
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Reads a JSON config file and applies key=value overrides on top.
nlohmann::json load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides);

/// Runs the experiment and writes its output files (plus config_echo.json)
/// into `output_dir`. Returns the written file names in write order.
std::vector<std::string> run_experiment(const ExperimentConfig& config,
                                        const std::filesystem::path& output_dir,
                                        const RunOptions& options, std::ostream& log);

/// Entry point behind the `qwalk` executable.
int main(int argc, char** argv);

} // namespace qwalk::cli
