#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qwalk/ensemble.hpp"

namespace qwalk {

enum class Experiment { run, scan, fss, profile };
enum class OutputFormat { csv, json, both };

std::string_view to_string(Experiment experiment);
std::string_view to_string(OutputFormat format);
Experiment parse_experiment(std::string_view text);

/// A config document that failed validation. what() joins all diagnostics.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct ExperimentConfig {
    Experiment experiment = Experiment::run;
    SimulationConfig simulation;
    std::vector<double> theta1_grid;
    std::vector<std::size_t> sizes;
    double tail_fraction = kDefaultTailFraction;
    /// Relative-site region for the profile tail fit.
    std::optional<std::pair<long, long>> tail_region;
    bool with_random_baseline = false;
    OutputFormat format = OutputFormat::both;
};

/// Radians from a number or from strings like "pi/4", "4pi/15", "-2*pi/3".
double parse_angle(std::string_view text);
double parse_angle(const nlohmann::json& value);
inline double parse_angle(const char* text) { return parse_angle(std::string_view(text)); }

/// Applies "dotted.key=value"; the value is read as JSON when it parses,
/// otherwise as a string.
void apply_override(nlohmann::json& doc, std::string_view assignment);

/// theta1 in [0, 2pi) in steps of pi/30; used when a scan gives no grid.
std::vector<double> default_theta1_grid();

/// Validates against the schema and resolves defaults. `experiment` is the
/// subcommand; a conflicting "experiment" key in the document is an error.
ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<Experiment> experiment = {});

/// Fully resolved document; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);

} // namespace qwalk
