#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qwalk/ensemble.hpp"

using namespace qwalk;
using std::numbers::pi;

namespace {

SimulationConfig small_config(NoiseKind kind, NoiseAxis axis, std::size_t steps = 200,
                              std::size_t realizations = 6)
{
    SimulationConfig c;
    c.steps = steps;
    c.realizations = realizations;
    c.noise = NoiseSpec{kind, axis, pi / 3, pi / 4, 0.5, 0};
    return c;
}

} // namespace

TEST_SUITE("ensemble-runner") {

TEST_CASE("config validation")
{
    SimulationConfig c = small_config(NoiseKind::binary_pair, NoiseAxis::spatial);
    CHECK_NOTHROW(c.validate());
    c.lattice_size = 402;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.lattice_size = 401;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.lattice_size = 403;
    CHECK_NOTHROW(c.validate());
    c.fit_window = FitWindow{10, 201};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.fit_window = FitWindow{0, 10};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.fit_window.reset();
    c.observable_stride = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("single realizations are deterministic and sampled on the stride")
{
    SimulationConfig c = small_config(NoiseKind::random_binary, NoiseAxis::temporal, 101);
    c.observable_stride = 10;
    const RealizationResult a = run_single(c, 3);
    const RealizationResult b = run_single(c, 3);
    CHECK(a.series.sigma == b.series.sigma);
    CHECK(a.final_distribution.probs == b.final_distribution.probs);
    REQUIRE(a.series.size() == 12);
    CHECK(a.series.times.front() == 0);
    CHECK(a.series.times[1] == 10);
    CHECK(a.series.times.back() == 101);
    CHECK(run_single(c, 4).series.sigma != a.series.sigma);
}

TEST_CASE("homogeneous Hadamard walk spreads ballistically")
{
    SimulationConfig c = small_config(NoiseKind::homogeneous, NoiseAxis::spatial, 400, 50);
    c.noise.theta1 = pi / 4;
    const EnsembleResult r = run_ensemble(c);
    CHECK(r.realizations == 1);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings.front().find("homogeneous") != std::string::npos);
    REQUIRE(r.fit);
    CHECK(r.fit->alpha == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::isnan(r.alpha_spread_stderr()));
}

TEST_CASE("thread count does not change results")
{
    const SimulationConfig c = small_config(NoiseKind::binary_pair, NoiseAxis::temporal, 150, 7);
    const EnsembleResult serial = run_ensemble(c, RunOptions{1});
    const EnsembleResult parallel = run_ensemble(c, RunOptions{4});
    CHECK(serial.mean.sigma == parallel.mean.sigma);
    CHECK(serial.mean.sigma_stderr == parallel.mean.sigma_stderr);
    CHECK(serial.mean_distribution.probs == parallel.mean_distribution.probs);
    CHECK(serial.realization_alphas == parallel.realization_alphas);
}

TEST_CASE("mean sigma lies between realization extremes")
{
    const SimulationConfig c = small_config(NoiseKind::random_binary, NoiseAxis::spatial, 150, 5);
    const EnsembleResult r = run_ensemble(c);
    REQUIRE(r.realization_sigma.size() == 5);
    for (std::size_t i = 0; i < r.mean.size(); ++i) {
        double lo = r.realization_sigma[0][i];
        double hi = lo;
        for (const auto& s : r.realization_sigma) {
            lo = std::min(lo, s[i]);
            hi = std::max(hi, s[i]);
        }
        CHECK(r.mean.sigma[i] >= lo - 1e-12);
        CHECK(r.mean.sigma[i] <= hi + 1e-12);
    }
    double total = 0.0;
    for (const double p : r.mean_distribution.probs) {
        total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("master seeds give independent ensembles")
{
    SimulationConfig c = small_config(NoiseKind::binary_pair, NoiseAxis::spatial, 60, 3);
    std::vector<std::vector<double>> finals;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        c.noise.seed = seed;
        const EnsembleResult r = run_ensemble(c);
        for (const auto& s : r.realization_sigma) {
            finals.push_back(s);
        }
    }
    for (std::size_t i = 0; i < finals.size(); ++i) {
        for (std::size_t j = i + 1; j < finals.size(); ++j) {
            CHECK(finals[i] != finals[j]);
        }
    }
}

TEST_CASE("fitted exponents agree across master seeds")
{
    SimulationConfig c = small_config(NoiseKind::binary_pair, NoiseAxis::spatial, 400, 12);
    std::vector<std::pair<double, double>> fits;
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
        c.noise.seed = seed;
        const EnsembleResult r = run_ensemble(c);
        REQUIRE(r.fit);
        fits.emplace_back(r.fit->alpha, r.alpha_spread_stderr());
    }
    for (std::size_t i = 0; i < fits.size(); ++i) {
        for (std::size_t j = i + 1; j < fits.size(); ++j) {
            const double combined = std::hypot(fits[i].second, fits[j].second);
            CHECK(std::abs(fits[i].first - fits[j].first) <= 3 * combined);
        }
    }
}

TEST_CASE("scan with theta1 equal to theta2 is ballistic")
{
    SimulationConfig c = small_config(NoiseKind::binary_pair, NoiseAxis::spatial, 400, 3);
    c.noise.theta2 = pi / 4;
    const auto table = run_theta_scan(c, {pi / 4, pi / 3});
    REQUIRE(table.size() == 2);
    CHECK(table[0].theta1 == pi / 4);
    CHECK(table[0].alpha == doctest::Approx(1.0).epsilon(0.02));
    CHECK(table[0].alpha_stderr < 1e-9);
    CHECK(table[1].alpha < table[0].alpha);
    CHECK_THROWS_AS(run_theta_scan(c, {}), std::invalid_argument);
}

TEST_CASE("finite-size scaling on small lattices")
{
    SimulationConfig c = small_config(NoiseKind::homogeneous, NoiseAxis::spatial, 1, 1);
    c.noise.theta1 = pi / 4;
    const FssResult r = run_fss(c, {1001, 2001});
    REQUIRE(r.points.size() == 2);
    CHECK(r.points[0].steps == 499);
    CHECK(r.points[1].steps == 999);
    CHECK(r.scaling.slope == doctest::Approx(1.0).epsilon(0.03));

    CHECK_THROWS_AS(run_fss(c, {1001}), std::invalid_argument);
    CHECK_THROWS_AS(run_fss(c, {1001, 1002}), std::invalid_argument);
    CHECK_THROWS_AS(run_fss(c, {2001, 1001}), std::invalid_argument);
    CHECK_THROWS_AS(run_fss(c, {999, 1001}), std::invalid_argument);
    CHECK_THROWS_AS(run_fss(c, {1001, 2001}, 0.0), std::invalid_argument);
}

TEST_CASE("random baseline swaps only binary-pair noise")
{
    const SimulationConfig bp = small_config(NoiseKind::binary_pair, NoiseAxis::temporal);
    const SimulationConfig twin = random_baseline(bp);
    CHECK(twin.noise.kind == NoiseKind::random_binary);
    CHECK(twin.noise.axis == NoiseAxis::temporal);
    CHECK(twin.noise.seed == bp.noise.seed);
    CHECK(random_baseline(small_config(NoiseKind::homogeneous, NoiseAxis::spatial)).noise.kind ==
          NoiseKind::homogeneous);
}

}
