#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <json.hpp>

#include "qwalk/walker.hpp"

namespace qwalk {

/// probs[n] = |up_n|^2 + |down_n|^2 over the whole lattice.
struct ProbabilityDistribution {
    std::vector<double> probs;
    std::size_t origin = 0;

    /// Site index relative to the origin.
    long relative(std::size_t site) const
    {
        return static_cast<long>(site) - static_cast<long>(origin);
    }
};

ProbabilityDistribution probability_distribution(const WalkerState& state);

struct Moments {
    double mean_n = 0.0;  // sites, relative to origin
    double mean_n2 = 0.0; // sites^2
    double sigma = 0.0;
};

/// <n>, <n^2> and sigma = sqrt(<n^2> - <n>^2) with n measured from the
/// origin. Throws CorruptedStateError if the norm is off by more than 1e-6.
Moments moments_and_sigma(const WalkerState& state);
Moments moments_and_sigma(const ProbabilityDistribution& dist);

struct MomentSeries {
    std::vector<std::size_t> times;
    std::vector<double> mean_n;
    std::vector<double> mean_n2;
    std::vector<double> sigma;
    /// Ensemble standard error of sigma; empty for a single walk.
    std::vector<double> sigma_stderr;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    void push_back(std::size_t t, const Moments& m);
};

struct FitWindow {
    std::size_t t_min = 1;
    std::size_t t_max = 1;

    friend bool operator==(const FitWindow&, const FitWindow&) = default;
};

/// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0; // NaN with fewer than 3 points
    double r_squared = 0.0;
    std::size_t points = 0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct ExponentFit {
    double alpha = 0.0;
    double log_prefactor = 0.0;
    FitWindow window;
    double stderr_alpha = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Log-spaced subsampling density used before the log-log regression.
inline constexpr double kFitPointsPerDecade = 200.0;
inline constexpr std::size_t kMinFitPoints = 10;

/// Least squares of ln(sigma) against ln(t) over the window. Entries with
/// t = 0 are skipped; the remaining points are averaged (in log space)
/// within bins 1/kFitPointsPerDecade decades wide before the regression.
ExponentFit fit_power_law(const MomentSeries& series, FitWindow window);

/// Default window [T/2, T] for a series ending at T.
FitWindow default_fit_window(std::size_t steps);

struct TailFit {
    double decay_rate = 0.0; // per site; positive for decaying tails
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// Least squares of ln(prob) against |n - n0| on the relative-site region
/// [first, last] (inclusive, one side of the origin). A walk from a point
/// source lives on one parity sublattice; when every site of one parity in
/// the region is exactly zero, the fit uses the other parity only.
TailFit fit_exponential_tail(const ProbabilityDistribution& dist, long first, long last);

/// Entrywise ensemble mean of the moments (sigma is averaged as sigma, not
/// recomputed from averaged amplitudes) plus the standard error of sigma.
/// All series must share the same time grid.
MomentSeries average_series(std::span<const MomentSeries> runs);

ProbabilityDistribution average_distributions(std::span<const ProbabilityDistribution> runs);

/// Sample standard deviation over sqrt(n); 0 for n < 2.
double standard_error(std::span<const double> values);

/// Mean of sigma over the final `tail_fraction` of the entries.
double long_time_average(const MomentSeries& series, double tail_fraction);

// Serialization. Numbers in CSV use 17 significant digits.

std::string format_number(double value);

/// Columns: t, mean_n, mean_n2, sigma, sigma_stderr
void write_moment_series_csv(std::ostream& out, const MomentSeries& series);
/// Columns: n_relative, probability
void write_profile_csv(std::ostream& out, const ProbabilityDistribution& dist);

nlohmann::json to_json(const MomentSeries& series);
nlohmann::json to_json(const ExponentFit& fit);
nlohmann::json to_json(const TailFit& fit);

} // namespace qwalk
