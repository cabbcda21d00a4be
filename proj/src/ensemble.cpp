#include "qwalk/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace qwalk {

namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers. Exceptions are
// kept per index and the lowest-index one is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    const std::size_t workers = std::min<std::size_t>(threads, count);
    std::vector<std::exception_ptr> errors(count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count && !failed; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                        failed = true;
                    }
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace

std::size_t SimulationConfig::resolved_lattice_size() const
{
    return lattice_size.value_or(2 * steps + 3);
}

FitWindow SimulationConfig::resolved_fit_window() const
{
    return fit_window.value_or(default_fit_window(steps));
}

std::size_t SimulationConfig::effective_realizations() const
{
    return noise.kind == NoiseKind::homogeneous ? 1 : realizations;
}

void SimulationConfig::validate() const
{
    if (steps < 1) {
        throw std::invalid_argument("steps must be positive");
    }
    const std::size_t n = resolved_lattice_size();
    if (n % 2 == 0) {
        throw std::invalid_argument("lattice_size must be odd, got " + std::to_string(n));
    }
    if (n < 2 * steps + 3) {
        throw std::invalid_argument("lattice_size " + std::to_string(n) + " is below 2*steps+3 = " +
                                    std::to_string(2 * steps + 3));
    }
    if (realizations < 1) {
        throw std::invalid_argument("realizations must be at least 1");
    }
    if (observable_stride < 1) {
        throw std::invalid_argument("observable_stride must be at least 1");
    }
    const double norm = std::norm(qubit_up) + std::norm(qubit_down);
    if (std::abs(norm - 1.0) > 1e-12) {
        throw std::invalid_argument("initial qubit is not normalized");
    }
    if (!std::isfinite(noise.theta1) || !std::isfinite(noise.theta2)) {
        throw std::invalid_argument("noise angles must be finite");
    }
    if (!(noise.fraction_theta2 >= 0.0 && noise.fraction_theta2 <= 1.0)) {
        throw std::invalid_argument("fraction_theta2 must lie in [0, 1]");
    }
    if (noise.kind == NoiseKind::binary_pair && noise.axis == NoiseAxis::temporal && steps < 2) {
        throw std::invalid_argument("temporal binary-pair noise needs at least 2 steps");
    }
    if (fit_window) {
        if (fit_window->t_min < 1 || fit_window->t_min > fit_window->t_max ||
            fit_window->t_max > steps) {
            throw std::invalid_argument("fit_window must satisfy 1 <= t_min <= t_max <= steps");
        }
    }
}

RealizationResult run_single(const SimulationConfig& config, std::size_t realization_index)
{
    config.validate();
    const std::size_t n = config.resolved_lattice_size();
    NoiseSpec spec = config.noise;
    spec.seed = realization_seed(config.noise.seed, realization_index);
    const std::size_t length = spec.axis == NoiseAxis::spatial ? n : config.steps;
    const AngleSchedule schedule = generate_schedule(spec, length);

    RealizationResult result;
    WalkerState state = initial_state(n, config.qubit_up, config.qubit_down);
    result.series.push_back(0, moments_and_sigma(state));
    const std::size_t stride = config.observable_stride;
    const std::size_t steps = config.steps;
    state = evolve(std::move(state), schedule, steps, [&](const WalkerState& s) {
        if (s.time() % stride == 0 || s.time() == steps) {
            result.series.push_back(s.time(), moments_and_sigma(s));
        }
    });
    result.final_distribution = probability_distribution(state);
    return result;
}

double EnsembleResult::alpha_spread_stderr() const
{
    std::vector<double> finite;
    for (const double a : realization_alphas) {
        if (std::isfinite(a)) {
            finite.push_back(a);
        }
    }
    if (finite.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return standard_error(finite);
}

EnsembleResult run_ensemble(const SimulationConfig& config, const RunOptions& options)
{
    config.validate();
    EnsembleResult result;
    result.config = config;
    const std::size_t count = config.effective_realizations();
    result.realizations = count;
    if (count != config.realizations) {
        result.warnings.push_back("homogeneous noise has no disorder to average; running 1 realization instead of " +
                                  std::to_string(config.realizations));
    }

    std::vector<RealizationResult> runs(count);
    parallel_for(count, options.threads,
                 [&](std::size_t i) { runs[i] = run_single(config, i); });

    // Fixed-order reduction over realization index.
    std::vector<MomentSeries> series;
    std::vector<ProbabilityDistribution> distributions;
    series.reserve(count);
    distributions.reserve(count);
    for (auto& run : runs) {
        series.push_back(std::move(run.series));
        distributions.push_back(std::move(run.final_distribution));
    }
    runs.clear();
    result.mean = average_series(series);
    result.mean_distribution = average_distributions(distributions);
    distributions.clear();

    const FitWindow window = config.resolved_fit_window();
    try {
        result.fit = fit_power_law(result.mean, window);
    } catch (const std::invalid_argument& e) {
        result.warnings.push_back(std::string("no power-law fit of the mean sigma: ") + e.what());
    }
    result.realization_alphas.reserve(count);
    result.realization_sigma.reserve(count);
    for (auto& run : series) {
        double alpha = std::numeric_limits<double>::quiet_NaN();
        try {
            alpha = fit_power_law(run, window).alpha;
        } catch (const std::invalid_argument&) {
        }
        result.realization_alphas.push_back(alpha);
        result.realization_sigma.push_back(std::move(run.sigma));
    }
    return result;
}

std::vector<ScanPoint> run_theta_scan(const SimulationConfig& base,
                                      const std::vector<double>& theta1_values,
                                      const RunOptions& options)
{
    if (theta1_values.empty()) {
        throw std::invalid_argument("theta1 scan needs at least one value");
    }
    std::vector<ScanPoint> table;
    table.reserve(theta1_values.size());
    for (const double theta1 : theta1_values) {
        SimulationConfig config = base;
        config.noise.theta1 = theta1;
        const EnsembleResult ensemble = run_ensemble(config, options);
        ScanPoint point;
        point.theta1 = theta1;
        point.alpha = ensemble.fit ? ensemble.fit->alpha : std::numeric_limits<double>::quiet_NaN();
        if (ensemble.realizations >= 2) {
            point.alpha_stderr = ensemble.alpha_spread_stderr();
        } else {
            point.alpha_stderr =
                ensemble.fit ? ensemble.fit->stderr_alpha : std::numeric_limits<double>::quiet_NaN();
        }
        table.push_back(point);
    }
    return table;
}

FssResult run_fss(const SimulationConfig& base, const std::vector<std::size_t>& sizes,
                  double tail_fraction, const RunOptions& options)
{
    if (sizes.size() < 2) {
        throw std::invalid_argument("finite-size scaling needs at least two lattice sizes");
    }
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] % 2 == 0 || sizes[i] < 1001) {
            throw std::invalid_argument("FSS sizes must be odd and >= 1001, got " +
                                        std::to_string(sizes[i]));
        }
        if (i > 0 && sizes[i] <= sizes[i - 1]) {
            throw std::invalid_argument("FSS sizes must be strictly ascending");
        }
    }
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw std::invalid_argument("tail fraction must lie in (0, 1]");
    }

    FssResult result;
    std::vector<double> log_n;
    std::vector<double> log_sigma;
    for (const std::size_t n : sizes) {
        SimulationConfig config = base;
        config.lattice_size = n;
        config.steps = (n - 3) / 2;
        config.fit_window.reset();
        const EnsembleResult ensemble = run_ensemble(config, options);

        FssPoint point;
        point.lattice_size = n;
        point.steps = config.steps;
        point.sigma_bar = long_time_average(ensemble.mean, tail_fraction);
        std::vector<double> per_run;
        for (const auto& sigma : ensemble.realization_sigma) {
            MomentSeries single;
            single.times = ensemble.mean.times;
            single.sigma = sigma;
            per_run.push_back(long_time_average(single, tail_fraction));
        }
        point.sigma_bar_stderr = standard_error(per_run);
        result.points.push_back(point);
        log_n.push_back(std::log(static_cast<double>(n)));
        log_sigma.push_back(std::log(point.sigma_bar));
    }
    result.scaling = fit_line(log_n, log_sigma);
    return result;
}

SimulationConfig random_baseline(const SimulationConfig& config)
{
    SimulationConfig twin = config;
    if (twin.noise.kind == NoiseKind::binary_pair) {
        twin.noise.kind = NoiseKind::random_binary;
    }
    return twin;
}

} // namespace qwalk
