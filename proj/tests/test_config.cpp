#include <doctest.h>

#include <numbers>

#include "qwalk/config.hpp"

using namespace qwalk;
using nlohmann::json;
using std::numbers::pi;

namespace {

json base_run()
{
    return json::parse(R"({
        "experiment": "run",
        "steps": 100,
        "noise": {"kind": "binary-pair", "axis": "spatial", "theta1": "pi/3", "theta2": "pi/4", "seed": 7},
        "realizations": 4
    })");
}

bool mentions(const ConfigError& e, const std::string& needle)
{
    for (const auto& p : e.problems()) {
        if (p.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

} // namespace

TEST_SUITE("config") {

TEST_CASE("angle forms")
{
    CHECK(parse_angle("pi") == pi);
    CHECK(parse_angle("pi/4") == pi / 4);
    CHECK(parse_angle("4pi/15") == doctest::Approx(4 * pi / 15).epsilon(1e-15));
    CHECK(parse_angle("-2*pi/3") == doctest::Approx(-2 * pi / 3).epsilon(1e-15));
    CHECK(parse_angle("0.5") == 0.5);
    CHECK(parse_angle(json(1.25)) == 1.25);
    CHECK_THROWS_AS(parse_angle("tau/2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_angle("pi/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_angle(json(true)), std::invalid_argument);
}

TEST_CASE("defaults and resolution")
{
    const ExperimentConfig c = parse_config(base_run());
    CHECK(c.experiment == Experiment::run);
    CHECK(c.simulation.resolved_lattice_size() == 203);
    CHECK(c.simulation.resolved_fit_window() == FitWindow{50, 100});
    CHECK(c.simulation.noise.fraction_theta2 == 0.5);
    CHECK(c.simulation.noise.theta1 == pi / 3);
    CHECK(c.format == OutputFormat::both);
}

TEST_CASE("overrides")
{
    json doc = base_run();
    apply_override(doc, "noise.theta1=4pi/15");
    apply_override(doc, "steps=250");
    apply_override(doc, "noise.axis=temporal");
    apply_override(doc, "fit_window=[10,200]");
    const ExperimentConfig c = parse_config(doc);
    CHECK(c.simulation.noise.theta1 == doctest::Approx(4 * pi / 15));
    CHECK(c.simulation.steps == 250);
    CHECK(c.simulation.noise.axis == NoiseAxis::temporal);
    CHECK(c.simulation.resolved_fit_window() == FitWindow{10, 200});
    CHECK_THROWS_AS(apply_override(doc, "steps"), ConfigError);
    CHECK_THROWS_AS(apply_override(doc, "steps.x=1"), ConfigError);
}

TEST_CASE("every problem is reported")
{
    json doc = base_run();
    doc.erase("steps");
    doc["colour"] = "red";
    doc["noise"]["spin"] = 1;
    try {
        parse_config(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "'steps'"));
        CHECK(mentions(e, "colour"));
        CHECK(mentions(e, "noise.spin"));
    }
}

TEST_CASE("simulation constraints surface as config errors")
{
    json doc = base_run();
    doc["lattice_size"] = 100;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc["lattice_size"] = 199;
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc["lattice_size"] = 301;
    CHECK(parse_config(doc).simulation.resolved_lattice_size() == 301);
    doc["lattice_size"] = "auto";
    CHECK(parse_config(doc).simulation.resolved_lattice_size() == 203);

    json bad_fraction = base_run();
    bad_fraction["noise"]["fraction_theta2"] = 1.5;
    CHECK_THROWS_AS(parse_config(bad_fraction), ConfigError);

    json bad_qubit = base_run();
    bad_qubit["qubit_up"] = 1.0;
    CHECK_THROWS_AS(parse_config(bad_qubit), ConfigError);

    json conflict = base_run();
    CHECK_THROWS_AS(parse_config(conflict, Experiment::scan), ConfigError);
}

TEST_CASE("theta1 grid")
{
    json doc = base_run();
    doc["experiment"] = "scan";
    doc["theta1_grid"] = {{"start", 0}, {"stop", "pi"}, {"step", "pi/4"}};
    const ExperimentConfig c = parse_config(doc);
    REQUIRE(c.theta1_grid.size() == 4);
    CHECK(c.theta1_grid[0] == 0.0);
    CHECK(c.theta1_grid[3] == doctest::Approx(3 * pi / 4));

    doc["theta1_grid"] = json::array({"pi/6", 0.3});
    CHECK(parse_config(doc).theta1_grid == std::vector<double>{pi / 6, 0.3});

    doc["theta1_grid"] = {{"start", 1}, {"stop", 1}, {"step", 0.1}};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc.erase("theta1_grid");
    const auto grid = parse_config(doc).theta1_grid;
    REQUIRE(grid.size() == 60);
    CHECK(grid[20] == doctest::Approx(2 * pi / 3));
    CHECK(grid.back() < 2 * pi);
}

TEST_CASE("finite-size scaling sizes")
{
    json doc = base_run();
    doc["experiment"] = "fss";
    doc.erase("steps");
    doc["sizes"] = {1001, 2001};
    const ExperimentConfig c = parse_config(doc);
    CHECK(c.sizes == std::vector<std::size_t>{1001, 2001});
    CHECK(c.tail_fraction == kDefaultTailFraction);

    CHECK(c.simulation.realizations == 4);

    doc.erase("sizes");
    doc.erase("realizations");
    const ExperimentConfig defaults = parse_config(doc);
    CHECK(defaults.sizes == std::vector<std::size_t>{4001, 8001, 16001, 32001});
    CHECK(defaults.simulation.realizations == 10);

    doc["sizes"] = {1001};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc["sizes"] = {1001, 2000};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc["sizes"] = {2001, 1001};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc["sizes"] = {501, 1001};
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
}

TEST_CASE("resolved echo parses back to the same config")
{
    std::vector<json> docs{base_run()};
    json scan = base_run();
    scan["experiment"] = "scan";
    scan["theta1_grid"] = {{"start", 0}, {"stop", "pi/2"}, {"step", "pi/8"}};
    docs.push_back(scan);
    json fss = base_run();
    fss["experiment"] = "fss";
    fss.erase("steps");
    fss["sizes"] = {1001, 1501};
    docs.push_back(fss);
    json profile = base_run();
    profile["experiment"] = "profile";
    profile["tail_region"] = {10, 40};
    profile["qubit_up"] = {1.0, 0.0};
    profile["qubit_down"] = 0.0;
    docs.push_back(profile);

    for (const auto& doc : docs) {
        const json echo = to_json(parse_config(doc));
        const json again = to_json(parse_config(json::parse(echo.dump())));
        CHECK(echo.dump() == again.dump());
    }
    const json fss_echo = to_json(parse_config(fss));
    CHECK_FALSE(fss_echo.contains("steps"));
}

}
