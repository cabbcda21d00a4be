#include "qwalk/observables.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qwalk/errors.hpp"

namespace qwalk {

namespace {

constexpr double kNormTolerance = 1e-6;

Moments finish_moments(double total, double first, double second)
{
    if (std::abs(total - 1.0) > kNormTolerance) {
        throw CorruptedStateError("state norm is " + std::to_string(total) + ", expected 1");
    }
    Moments m;
    m.mean_n = first;
    m.mean_n2 = second;
    m.sigma = std::sqrt(std::max(0.0, second - first * first));
    return m;
}

} // namespace

ProbabilityDistribution probability_distribution(const WalkerState& state)
{
    ProbabilityDistribution dist;
    dist.origin = state.origin();
    dist.probs.assign(state.size(), 0.0);
    for (std::size_t n = state.support_begin(); n < state.support_end(); ++n) {
        dist.probs[n] = state.probability(n);
    }
    return dist;
}

Moments moments_and_sigma(const WalkerState& state)
{
    double total = 0.0;
    double first = 0.0;
    double second = 0.0;
    const double origin = static_cast<double>(state.origin());
    for (std::size_t n = state.support_begin(); n < state.support_end(); ++n) {
        const double p = state.probability(n);
        const double x = static_cast<double>(n) - origin;
        total += p;
        first += x * p;
        second += x * x * p;
    }
    return finish_moments(total, first, second);
}

Moments moments_and_sigma(const ProbabilityDistribution& dist)
{
    double total = 0.0;
    double first = 0.0;
    double second = 0.0;
    const double origin = static_cast<double>(dist.origin);
    for (std::size_t n = 0; n < dist.probs.size(); ++n) {
        const double p = dist.probs[n];
        const double x = static_cast<double>(n) - origin;
        total += p;
        first += x * p;
        second += x * x * p;
    }
    return finish_moments(total, first, second);
}

void MomentSeries::push_back(std::size_t t, const Moments& m)
{
    times.push_back(t);
    mean_n.push_back(m.mean_n);
    mean_n2.push_back(m.mean_n2);
    sigma.push_back(m.sigma);
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) {
        throw std::invalid_argument("fit_line: x and y differ in length");
    }
    const std::size_t n = x.size();
    if (n < 2) {
        throw std::invalid_argument("fit_line: need at least two points");
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx <= 0.0) {
        throw std::invalid_argument("fit_line: x values are all equal");
    }
    LinearFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ssr += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
    fit.slope_stderr = n > 2 ? std::sqrt(ssr / static_cast<double>(n - 2) / sxx)
                             : std::numeric_limits<double>::quiet_NaN();
    return fit;
}

FitWindow default_fit_window(std::size_t steps)
{
    return {std::max<std::size_t>(1, steps / 2), std::max<std::size_t>(1, steps)};
}

ExponentFit fit_power_law(const MomentSeries& series, FitWindow window)
{
    if (series.empty()) {
        throw std::invalid_argument("fit_power_law: empty series");
    }
    if (window.t_min < 1 || window.t_min > window.t_max) {
        throw std::invalid_argument("fit_power_law: window must satisfy 1 <= t_min <= t_max");
    }
    if (window.t_min < series.times.front() || window.t_max > series.times.back()) {
        throw std::invalid_argument("fit_power_law: window [" + std::to_string(window.t_min) + ", " +
                                    std::to_string(window.t_max) + "] outside series range [" +
                                    std::to_string(series.times.front()) + ", " +
                                    std::to_string(series.times.back()) + "]");
    }

    std::vector<double> all_x;
    std::vector<double> all_y;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::size_t t = series.times[i];
        if (t == 0 || t < window.t_min || t > window.t_max) {
            continue;
        }
        const double s = series.sigma[i];
        if (!(s > 0.0)) {
            throw std::invalid_argument("fit_power_law: sigma(" + std::to_string(t) +
                                        ") is not positive");
        }
        all_x.push_back(std::log(static_cast<double>(t)));
        all_y.push_back(std::log(s));
    }
    if (all_x.size() < kMinFitPoints) {
        throw std::invalid_argument("fit_power_law: window holds " + std::to_string(all_x.size()) +
                                    " points, need at least " + std::to_string(kMinFitPoints));
    }

    // Average within log bins of width 1/kFitPointsPerDecade decades. This
    // also smooths the even/odd-step oscillation of sigma.
    const double spacing = std::log(10.0) / kFitPointsPerDecade;
    std::vector<double> x;
    std::vector<double> y;
    long current_bin = 0;
    std::size_t in_bin = 0;
    for (std::size_t i = 0; i < all_x.size(); ++i) {
        const auto bin = static_cast<long>(std::floor(all_x[i] / spacing));
        if (in_bin == 0 || bin != current_bin) {
            if (in_bin > 0) {
                x.back() /= static_cast<double>(in_bin);
                y.back() /= static_cast<double>(in_bin);
            }
            x.push_back(0.0);
            y.push_back(0.0);
            current_bin = bin;
            in_bin = 0;
        }
        x.back() += all_x[i];
        y.back() += all_y[i];
        ++in_bin;
    }
    x.back() /= static_cast<double>(in_bin);
    y.back() /= static_cast<double>(in_bin);
    if (x.size() < kMinFitPoints) {
        x = std::move(all_x);
        y = std::move(all_y);
    }

    const LinearFit line = fit_line(x, y);
    ExponentFit fit;
    fit.alpha = line.slope;
    fit.log_prefactor = line.intercept;
    fit.window = window;
    fit.stderr_alpha = line.slope_stderr;
    fit.r_squared = line.r_squared;
    fit.points = line.points;
    return fit;
}

TailFit fit_exponential_tail(const ProbabilityDistribution& dist, long first, long last)
{
    if (first > last) {
        std::swap(first, last);
    }
    if (first < 0 && last > 0) {
        throw std::invalid_argument("tail region must lie on one side of the origin");
    }
    const long lo_site = first + static_cast<long>(dist.origin);
    const long hi_site = last + static_cast<long>(dist.origin);
    if (lo_site < 0 || hi_site >= static_cast<long>(dist.probs.size())) {
        throw std::invalid_argument("tail region outside the lattice");
    }

    // Detect a parity sublattice that is identically zero.
    bool parity_has_nonzero[2] = {false, false};
    bool parity_has_zero[2] = {false, false};
    for (long r = first; r <= last; ++r) {
        const double p = dist.probs[static_cast<std::size_t>(r + static_cast<long>(dist.origin))];
        const int parity = static_cast<int>(((r % 2) + 2) % 2);
        if (p > 0.0) {
            parity_has_nonzero[parity] = true;
        } else {
            parity_has_zero[parity] = true;
        }
    }
    int skip_parity = -1;
    for (int parity = 0; parity < 2; ++parity) {
        if (parity_has_zero[parity] && !parity_has_nonzero[parity]) {
            skip_parity = parity;
        }
    }
    std::vector<double> x;
    std::vector<double> y;
    for (long r = first; r <= last; ++r) {
        const int parity = static_cast<int>(((r % 2) + 2) % 2);
        if (parity == skip_parity) {
            continue;
        }
        const double p = dist.probs[static_cast<std::size_t>(r + static_cast<long>(dist.origin))];
        if (!(p > 0.0)) {
            throw std::invalid_argument("tail region contains a zero probability at n=" +
                                        std::to_string(r) + "; clip the region to the support");
        }
        x.push_back(static_cast<double>(std::abs(r)));
        y.push_back(std::log(p));
    }
    if (x.size() < kMinFitPoints) {
        throw std::invalid_argument("tail region holds " + std::to_string(x.size()) +
                                    " usable points, need at least " + std::to_string(kMinFitPoints));
    }
    const LinearFit line = fit_line(x, y);
    TailFit fit;
    fit.decay_rate = -line.slope;
    fit.intercept = line.intercept;
    fit.r_squared = line.r_squared;
    fit.points = line.points;
    return fit;
}

double standard_error(std::span<const double> values)
{
    const std::size_t n = values.size();
    if (n < 2) {
        return 0.0;
    }
    double mean = 0.0;
    for (const double v : values) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

MomentSeries average_series(std::span<const MomentSeries> runs)
{
    if (runs.empty()) {
        throw std::invalid_argument("average_series: no series given");
    }
    const std::size_t entries = runs.front().size();
    for (const auto& run : runs) {
        if (run.times != runs.front().times) {
            throw std::invalid_argument("average_series: series sample different times");
        }
    }
    const double inv = 1.0 / static_cast<double>(runs.size());
    MomentSeries mean;
    mean.times = runs.front().times;
    mean.mean_n.assign(entries, 0.0);
    mean.mean_n2.assign(entries, 0.0);
    mean.sigma.assign(entries, 0.0);
    mean.sigma_stderr.assign(entries, 0.0);
    for (const auto& run : runs) {
        for (std::size_t k = 0; k < entries; ++k) {
            mean.mean_n[k] += run.mean_n[k];
            mean.mean_n2[k] += run.mean_n2[k];
            mean.sigma[k] += run.sigma[k];
        }
    }
    std::vector<double> column(runs.size());
    for (std::size_t k = 0; k < entries; ++k) {
        mean.mean_n[k] *= inv;
        mean.mean_n2[k] *= inv;
        mean.sigma[k] *= inv;
        for (std::size_t r = 0; r < runs.size(); ++r) {
            column[r] = runs[r].sigma[k];
        }
        mean.sigma_stderr[k] = standard_error(column);
    }
    return mean;
}

ProbabilityDistribution average_distributions(std::span<const ProbabilityDistribution> runs)
{
    if (runs.empty()) {
        throw std::invalid_argument("average_distributions: no distributions given");
    }
    ProbabilityDistribution mean;
    mean.origin = runs.front().origin;
    mean.probs.assign(runs.front().probs.size(), 0.0);
    for (const auto& run : runs) {
        if (run.probs.size() != mean.probs.size() || run.origin != mean.origin) {
            throw std::invalid_argument("average_distributions: lattices differ");
        }
        for (std::size_t n = 0; n < mean.probs.size(); ++n) {
            mean.probs[n] += run.probs[n];
        }
    }
    const double inv = 1.0 / static_cast<double>(runs.size());
    for (double& p : mean.probs) {
        p *= inv;
    }
    return mean;
}

double long_time_average(const MomentSeries& series, double tail_fraction)
{
    if (series.empty()) {
        throw std::invalid_argument("long_time_average: empty series");
    }
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw std::invalid_argument("long_time_average: tail fraction must lie in (0, 1]");
    }
    const std::size_t n = series.size();
    const auto wanted = static_cast<std::size_t>(std::llround(tail_fraction * static_cast<double>(n)));
    const std::size_t count = std::clamp<std::size_t>(wanted, 1, n);
    double total = 0.0;
    for (std::size_t i = n - count; i < n; ++i) {
        total += series.sigma[i];
    }
    return total / static_cast<double>(count);
}

std::string format_number(double value)
{
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, result.ptr);
}

void write_moment_series_csv(std::ostream& out, const MomentSeries& series)
{
    out << "t,mean_n,mean_n2,sigma,sigma_stderr\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double err = i < series.sigma_stderr.size() ? series.sigma_stderr[i] : 0.0;
        out << series.times[i] << ',' << format_number(series.mean_n[i]) << ','
            << format_number(series.mean_n2[i]) << ',' << format_number(series.sigma[i]) << ','
            << format_number(err) << '\n';
    }
}

void write_profile_csv(std::ostream& out, const ProbabilityDistribution& dist)
{
    out << "n_relative,probability\n";
    for (std::size_t n = 0; n < dist.probs.size(); ++n) {
        out << dist.relative(n) << ',' << format_number(dist.probs[n]) << '\n';
    }
}

nlohmann::json to_json(const MomentSeries& series)
{
    return {
        {"t", series.times},
        {"mean_n", series.mean_n},
        {"mean_n2", series.mean_n2},
        {"sigma", series.sigma},
        {"sigma_stderr", series.sigma_stderr},
    };
}

namespace {

nlohmann::json finite_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

} // namespace

nlohmann::json to_json(const ExponentFit& fit)
{
    return {
        {"alpha", finite_or_null(fit.alpha)},
        {"log_prefactor", finite_or_null(fit.log_prefactor)},
        {"stderr", finite_or_null(fit.stderr_alpha)},
        {"r2", finite_or_null(fit.r_squared)},
        {"window", {fit.window.t_min, fit.window.t_max}},
        {"points", fit.points},
    };
}

nlohmann::json to_json(const TailFit& fit)
{
    return {
        {"decay_rate", finite_or_null(fit.decay_rate)},
        {"intercept", finite_or_null(fit.intercept)},
        {"r2", finite_or_null(fit.r_squared)},
        {"points", fit.points},
    };
}

} // namespace qwalk
