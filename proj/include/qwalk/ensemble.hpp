#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qwalk/noise.hpp"
#include "qwalk/observables.hpp"
#include "qwalk/walker.hpp"

namespace qwalk {

struct SimulationConfig {
    std::size_t steps = 3000;
    /// nullopt means "auto" = 2 * steps + 3.
    std::optional<std::size_t> lattice_size;
    NoiseSpec noise;
    std::size_t realizations = 50;
    Amplitude qubit_up{std::numbers::sqrt2 / 2, 0.0};
    Amplitude qubit_down{0.0, std::numbers::sqrt2 / 2};
    std::size_t observable_stride = 1;
    std::optional<FitWindow> fit_window;

    std::size_t resolved_lattice_size() const;
    FitWindow resolved_fit_window() const;
    /// Realizations actually simulated (1 for homogeneous noise).
    std::size_t effective_realizations() const;
    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

struct RunOptions {
    /// Worker threads; 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
};

struct RealizationResult {
    MomentSeries series;
    ProbabilityDistribution final_distribution;
};

/// One walk with the schedule drawn from realization_seed(seed, index).
RealizationResult run_single(const SimulationConfig& config, std::size_t realization_index);

struct EnsembleResult {
    SimulationConfig config;
    std::size_t realizations = 0;
    /// Ensemble mean of sigma (and moments) with standard errors.
    MomentSeries mean;
    ProbabilityDistribution mean_distribution;
    /// Fit of the mean sigma; empty when sigma vanishes inside the window.
    std::optional<ExponentFit> fit;
    /// Per-realization fitted exponents (NaN where a fit was impossible).
    std::vector<double> realization_alphas;
    /// Per-realization sigma(t), indexed [realization][entry].
    std::vector<std::vector<double>> realization_sigma;
    std::vector<std::string> warnings;

    /// Standard error of the realization exponents; NaN for fewer than two.
    double alpha_spread_stderr() const;
};

EnsembleResult run_ensemble(const SimulationConfig& config, const RunOptions& options = {});

struct ScanPoint {
    double theta1 = 0.0;
    double alpha = 0.0;
    /// Standard error over realizations, or the fit's own error for R = 1.
    double alpha_stderr = 0.0;
};

std::vector<ScanPoint> run_theta_scan(const SimulationConfig& base,
                                      const std::vector<double>& theta1_values,
                                      const RunOptions& options = {});

struct FssPoint {
    std::size_t lattice_size = 0;
    std::size_t steps = 0;
    double sigma_bar = 0.0;
    double sigma_bar_stderr = 0.0;
};

struct FssResult {
    std::vector<FssPoint> points;
    /// ln(sigma_bar) against ln(N).
    LinearFit scaling;
};

inline constexpr double kDefaultTailFraction = 0.1;
inline constexpr std::size_t kDefaultFssRealizations = 10;

inline std::vector<std::size_t> default_fss_sizes() { return {4001, 8001, 16001, 32001}; }

/// For each odd size N the walk runs T = (N - 3) / 2 steps, so the light
/// cone just reaches the last free site; sigma is averaged over the final
/// tail_fraction of the series.
FssResult run_fss(const SimulationConfig& base, const std::vector<std::size_t>& sizes,
                  double tail_fraction = kDefaultTailFraction, const RunOptions& options = {});

/// Same experiment with binary-pair noise replaced by uncorrelated noise.
SimulationConfig random_baseline(const SimulationConfig& config);

} // namespace qwalk
