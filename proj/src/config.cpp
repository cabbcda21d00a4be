#include "qwalk/config.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <regex>
#include <set>

namespace qwalk {

using nlohmann::json;

std::string_view to_string(Experiment experiment)
{
    switch (experiment) {
    case Experiment::run: return "run";
    case Experiment::scan: return "scan";
    case Experiment::fss: return "fss";
    case Experiment::profile: return "profile";
    }
    return "?";
}

std::string_view to_string(OutputFormat format)
{
    switch (format) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::both: return "both";
    }
    return "?";
}

Experiment parse_experiment(std::string_view text)
{
    if (text == "run") return Experiment::run;
    if (text == "scan") return Experiment::scan;
    if (text == "fss") return Experiment::fss;
    if (text == "profile") return Experiment::profile;
    throw std::invalid_argument("unknown experiment '" + std::string(text) + "'");
}

namespace {

std::string join(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) {
            out += "; ";
        }
        out += item;
    }
    return out;
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument("invalid config: " + join(problems)), problems_(std::move(problems))
{
}

double parse_angle(std::string_view text)
{
    static const std::regex pi_form(
        R"(^\s*([+-]?)\s*([0-9]+(?:\.[0-9]*)?)?\s*\*?\s*pi\s*(?:/\s*([0-9]+(?:\.[0-9]*)?))?\s*$)");
    const std::string s(text);
    std::smatch m;
    if (std::regex_match(s, m, pi_form)) {
        const double coefficient = m[2].matched ? std::stod(m[2].str()) : 1.0;
        const double denominator = m[3].matched ? std::stod(m[3].str()) : 1.0;
        if (denominator == 0.0) {
            throw std::invalid_argument("angle '" + s + "' divides by zero");
        }
        const double value = coefficient * std::numbers::pi / denominator;
        return m[1].str() == "-" ? -value : value;
    }
    double value = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    while (begin < end && *begin == ' ') ++begin;
    while (end > begin && end[-1] == ' ') --end;
    if (begin < end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw std::invalid_argument("cannot parse angle '" + s + "' (use radians or forms like \"pi/4\")");
    }
    return value;
}

double parse_angle(const json& value)
{
    if (value.is_number()) {
        const double v = value.get<double>();
        if (!std::isfinite(v)) {
            throw std::invalid_argument("angle must be finite");
        }
        return v;
    }
    if (value.is_string()) {
        return parse_angle(std::string_view(value.get_ref<const std::string&>()));
    }
    throw std::invalid_argument("angle must be a number or a string such as \"pi/4\"");
}

void apply_override(json& doc, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError({"override '" + std::string(assignment) + "' is not of the form key=value"});
    }
    const std::string key(assignment.substr(0, eq));
    const std::string raw(assignment.substr(eq + 1));
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) {
        value = raw;
    }
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) {
            throw ConfigError({"override key '" + key + "' has an empty component"});
        }
        if (!node->is_object()) {
            if (node->is_null()) {
                *node = json::object();
            } else {
                throw ConfigError({"override key '" + key + "' descends into a non-object"});
            }
        }
        if (dot == std::string::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

namespace {

class SchemaReader {
public:
    std::vector<std::string> problems;

    void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where)
    {
        for (const auto& [key, value] : obj.items()) {
            if (!allowed.contains(key)) {
                problems.push_back("unknown key '" + where + key + "'");
            }
        }
    }

    std::optional<std::size_t> count(const json& obj, const std::string& key, const std::string& name,
                                     std::size_t minimum)
    {
        if (!obj.contains(key) || obj.at(key).is_null()) {
            return std::nullopt;
        }
        const json& v = obj.at(key);
        if (!v.is_number_integer()) {
            problems.push_back("'" + name + "' must be an integer");
            return std::nullopt;
        }
        if (v.is_number_unsigned() || v.get<long long>() >= 0) {
            const auto n = v.get<std::size_t>();
            if (n >= minimum) {
                return n;
            }
        }
        problems.push_back("'" + name + "' must be at least " + std::to_string(minimum));
        return std::nullopt;
    }

    std::optional<double> number(const json& obj, const std::string& key, const std::string& name)
    {
        if (!obj.contains(key) || obj.at(key).is_null()) {
            return std::nullopt;
        }
        const json& v = obj.at(key);
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            problems.push_back("'" + name + "' must be a finite number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    std::optional<double> angle(const json& obj, const std::string& key, const std::string& name)
    {
        if (!obj.contains(key) || obj.at(key).is_null()) {
            return std::nullopt;
        }
        try {
            return parse_angle(obj.at(key));
        } catch (const std::invalid_argument& e) {
            problems.push_back("'" + name + "': " + e.what());
            return std::nullopt;
        }
    }

    std::optional<std::string> text(const json& obj, const std::string& key, const std::string& name)
    {
        if (!obj.contains(key) || obj.at(key).is_null()) {
            return std::nullopt;
        }
        if (!obj.at(key).is_string()) {
            problems.push_back("'" + name + "' must be a string");
            return std::nullopt;
        }
        return obj.at(key).get<std::string>();
    }

    std::optional<Amplitude> complex(const json& obj, const std::string& key)
    {
        if (!obj.contains(key) || obj.at(key).is_null()) {
            return std::nullopt;
        }
        const json& v = obj.at(key);
        if (v.is_number()) {
            return Amplitude{v.get<double>(), 0.0};
        }
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
            return Amplitude{v[0].get<double>(), v[1].get<double>()};
        }
        problems.push_back("'" + key + "' must be a number or [re, im]");
        return std::nullopt;
    }

    void missing(const std::string& name) { problems.push_back("missing required key '" + name + "'"); }
};

} // namespace

std::vector<double> default_theta1_grid()
{
    std::vector<double> grid;
    for (int i = 0; i < 60; ++i) {
        grid.push_back(i * std::numbers::pi / 30);
    }
    return grid;
}

namespace {

bool is_count(const json& v)
{
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
}

std::vector<double> expand_grid(const json& grid, SchemaReader& reader)
{
    std::vector<double> values;
    if (grid.is_array()) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            try {
                values.push_back(parse_angle(grid[i]));
            } catch (const std::invalid_argument& e) {
                reader.problems.push_back("'theta1_grid[" + std::to_string(i) + "]': " + e.what());
            }
        }
        return values;
    }
    if (!grid.is_object()) {
        reader.problems.push_back("'theta1_grid' must be a list of angles or {start, stop, step}");
        return values;
    }
    reader.reject_unknown(grid, {"start", "stop", "step"}, "theta1_grid.");
    const auto start = reader.angle(grid, "start", "theta1_grid.start");
    const auto stop = reader.angle(grid, "stop", "theta1_grid.stop");
    const auto step = reader.angle(grid, "step", "theta1_grid.step");
    if (!start || !stop || !step) {
        if (!grid.contains("start")) reader.missing("theta1_grid.start");
        if (!grid.contains("stop")) reader.missing("theta1_grid.stop");
        if (!grid.contains("step")) reader.missing("theta1_grid.step");
        return values;
    }
    if (!(*step > 0.0)) {
        reader.problems.push_back("'theta1_grid.step' must be positive");
        return values;
    }
    // Half-open [start, stop); the slack absorbs rounding in (stop-start)/step.
    const double span = (*stop - *start) / *step;
    const auto count = span > 0.0 ? static_cast<std::size_t>(std::ceil(span - 1e-9)) : 0;
    for (std::size_t i = 0; i < count; ++i) {
        values.push_back(*start + static_cast<double>(i) * *step);
    }
    return values;
}

} // namespace

ExperimentConfig parse_config(const json& doc, std::optional<Experiment> experiment)
{
    SchemaReader reader;
    ExperimentConfig config;
    if (!doc.is_object()) {
        throw ConfigError({"config must be a JSON object"});
    }
    reader.reject_unknown(doc,
                          {"experiment", "steps", "lattice_size", "noise", "realizations", "fit_window",
                           "theta1_grid", "sizes", "tail_fraction", "tail_region", "qubit_up",
                           "qubit_down", "observable_stride", "with_random_baseline", "format"},
                          "");

    if (const auto name = reader.text(doc, "experiment", "experiment")) {
        try {
            const Experiment declared = parse_experiment(*name);
            if (experiment && *experiment != declared) {
                reader.problems.push_back("config declares experiment '" + *name +
                                          "' but the '" + std::string(to_string(*experiment)) +
                                          "' subcommand was used");
            }
            config.experiment = experiment.value_or(declared);
        } catch (const std::invalid_argument& e) {
            reader.problems.push_back(e.what());
        }
    } else if (experiment) {
        config.experiment = *experiment;
    } else {
        reader.missing("experiment");
    }
    const bool fss = config.experiment == Experiment::fss;

    SimulationConfig& sim = config.simulation;
    if (const auto steps = reader.count(doc, "steps", "steps", 1)) {
        sim.steps = *steps;
    } else if (!doc.contains("steps") && !fss) {
        reader.missing("steps");
    }
    if (doc.contains("lattice_size") && !doc.at("lattice_size").is_null()) {
        const json& v = doc.at("lattice_size");
        if (v.is_string() && v.get<std::string>() == "auto") {
            sim.lattice_size.reset();
        } else if (const auto n = reader.count(doc, "lattice_size", "lattice_size", 3)) {
            sim.lattice_size = *n;
        }
    }
    if (const auto r = reader.count(doc, "realizations", "realizations", 1)) {
        sim.realizations = *r;
    } else if (fss && !doc.contains("realizations")) {
        sim.realizations = kDefaultFssRealizations;
    }
    if (const auto stride = reader.count(doc, "observable_stride", "observable_stride", 1)) {
        sim.observable_stride = *stride;
    }
    if (const auto up = reader.complex(doc, "qubit_up")) {
        sim.qubit_up = *up;
    }
    if (const auto down = reader.complex(doc, "qubit_down")) {
        sim.qubit_down = *down;
    }

    if (!doc.contains("noise") || !doc.at("noise").is_object()) {
        if (doc.contains("noise")) {
            reader.problems.push_back("'noise' must be an object");
        } else {
            reader.missing("noise");
        }
    } else {
        const json& noise = doc.at("noise");
        reader.reject_unknown(noise, {"kind", "axis", "theta1", "theta2", "fraction_theta2", "seed"},
                              "noise.");
        NoiseSpec& spec = sim.noise;
        if (const auto kind = reader.text(noise, "kind", "noise.kind")) {
            try {
                spec.kind = parse_noise_kind(*kind);
            } catch (const std::invalid_argument& e) {
                reader.problems.push_back(e.what());
            }
        } else {
            reader.missing("noise.kind");
        }
        const bool homogeneous = spec.kind == NoiseKind::homogeneous;
        if (const auto axis = reader.text(noise, "axis", "noise.axis")) {
            try {
                spec.axis = parse_noise_axis(*axis);
            } catch (const std::invalid_argument& e) {
                reader.problems.push_back(e.what());
            }
        } else if (!homogeneous) {
            reader.missing("noise.axis");
        }
        if (const auto t1 = reader.angle(noise, "theta1", "noise.theta1")) {
            spec.theta1 = *t1;
        } else if (!noise.contains("theta1") && !(config.experiment == Experiment::scan)) {
            reader.missing("noise.theta1");
        }
        if (const auto t2 = reader.angle(noise, "theta2", "noise.theta2")) {
            spec.theta2 = *t2;
        } else if (!noise.contains("theta2")) {
            if (homogeneous) {
                spec.theta2 = spec.theta1;
            } else {
                reader.missing("noise.theta2");
            }
        }
        if (const auto f = reader.number(noise, "fraction_theta2", "noise.fraction_theta2")) {
            if (*f < 0.0 || *f > 1.0) {
                reader.problems.push_back("'noise.fraction_theta2' must lie in [0, 1]");
            }
            spec.fraction_theta2 = *f;
        }
        if (noise.contains("seed") && !noise.at("seed").is_null()) {
            const json& seed = noise.at("seed");
            if (seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<long long>() >= 0)) {
                spec.seed = seed.get<std::uint64_t>();
            } else {
                reader.problems.push_back("'noise.seed' must be a non-negative integer");
            }
        }
    }

    if (doc.contains("fit_window") && !doc.at("fit_window").is_null()) {
        const json& w = doc.at("fit_window");
        if (w.is_array() && w.size() == 2 && is_count(w[0]) && is_count(w[1])) {
            sim.fit_window = FitWindow{w[0].get<std::size_t>(), w[1].get<std::size_t>()};
        } else {
            reader.problems.push_back("'fit_window' must be [t_min, t_max] or null");
        }
    }

    if (doc.contains("theta1_grid") && !doc.at("theta1_grid").is_null()) {
        config.theta1_grid = expand_grid(doc.at("theta1_grid"), reader);
    } else if (config.experiment == Experiment::scan) {
        config.theta1_grid = default_theta1_grid();
    }
    if (config.experiment == Experiment::scan && config.theta1_grid.empty()) {
        reader.problems.push_back("'theta1_grid' must hold at least one angle for a scan");
    }

    if (doc.contains("sizes") && !doc.at("sizes").is_null()) {
        const json& sizes = doc.at("sizes");
        if (!sizes.is_array()) {
            reader.problems.push_back("'sizes' must be a list of odd lattice sizes");
        } else {
            for (const auto& n : sizes) {
                if (!is_count(n)) {
                    reader.problems.push_back("'sizes' entries must be positive integers");
                    break;
                }
                config.sizes.push_back(n.get<std::size_t>());
            }
        }
    } else if (fss) {
        config.sizes = default_fss_sizes();
    }
    if (fss) {
        if (config.sizes.size() < 2) {
            reader.problems.push_back("'sizes' needs at least two lattice sizes to fit a slope");
        }
        for (std::size_t i = 0; i < config.sizes.size(); ++i) {
            const std::size_t n = config.sizes[i];
            if (n % 2 == 0 || n < 1001) {
                reader.problems.push_back("'sizes' entries must be odd and >= 1001, got " + std::to_string(n));
            }
            if (i > 0 && n <= config.sizes[i - 1]) {
                reader.problems.push_back("'sizes' must be strictly ascending");
            }
        }
    }

    if (const auto f = reader.number(doc, "tail_fraction", "tail_fraction")) {
        if (!(*f > 0.0 && *f <= 1.0)) {
            reader.problems.push_back("'tail_fraction' must lie in (0, 1]");
        }
        config.tail_fraction = *f;
    }
    if (doc.contains("tail_region") && !doc.at("tail_region").is_null()) {
        const json& r = doc.at("tail_region");
        if (r.is_array() && r.size() == 2 && r[0].is_number_integer() && r[1].is_number_integer()) {
            config.tail_region = std::pair<long, long>{r[0].get<long>(), r[1].get<long>()};
        } else {
            reader.problems.push_back("'tail_region' must be [first, last] relative sites or null");
        }
    }
    if (doc.contains("with_random_baseline")) {
        if (doc.at("with_random_baseline").is_boolean()) {
            config.with_random_baseline = doc.at("with_random_baseline").get<bool>();
        } else {
            reader.problems.push_back("'with_random_baseline' must be true or false");
        }
    }
    if (const auto format = reader.text(doc, "format", "format")) {
        if (*format == "csv") {
            config.format = OutputFormat::csv;
        } else if (*format == "json") {
            config.format = OutputFormat::json;
        } else if (*format == "both") {
            config.format = OutputFormat::both;
        } else {
            reader.problems.push_back("'format' must be csv, json or both");
        }
    }

    if (reader.problems.empty() && !fss) {
        try {
            sim.validate();
        } catch (const std::invalid_argument& e) {
            reader.problems.push_back(e.what());
        }
    }
    if (reader.problems.empty() && fss) {
        SimulationConfig probe = sim;
        probe.steps = (config.sizes.front() - 3) / 2;
        probe.lattice_size = config.sizes.front();
        probe.fit_window.reset();
        try {
            probe.validate();
        } catch (const std::invalid_argument& e) {
            reader.problems.push_back(e.what());
        }
    }
    if (!reader.problems.empty()) {
        throw ConfigError(std::move(reader.problems));
    }
    return config;
}

json to_json(const ExperimentConfig& config)
{
    const SimulationConfig& sim = config.simulation;
    json noise = {
        {"kind", std::string(to_string(sim.noise.kind))},
        {"axis", std::string(to_string(sim.noise.axis))},
        {"theta1", sim.noise.theta1},
        {"theta2", sim.noise.theta2},
        {"fraction_theta2", sim.noise.fraction_theta2},
        {"seed", sim.noise.seed},
    };
    json doc = {
        {"experiment", std::string(to_string(config.experiment))},
        {"noise", noise},
        {"realizations", sim.realizations},
        {"qubit_up", {sim.qubit_up.real(), sim.qubit_up.imag()}},
        {"qubit_down", {sim.qubit_down.real(), sim.qubit_down.imag()}},
        {"observable_stride", sim.observable_stride},
        {"tail_fraction", config.tail_fraction},
        {"with_random_baseline", config.with_random_baseline},
        {"format", std::string(to_string(config.format))},
    };
    if (config.experiment != Experiment::fss) {
        const FitWindow window = sim.resolved_fit_window();
        doc["steps"] = sim.steps;
        doc["lattice_size"] = sim.resolved_lattice_size();
        doc["fit_window"] = {window.t_min, window.t_max};
    }
    doc["theta1_grid"] = config.theta1_grid.empty() ? json(nullptr) : json(config.theta1_grid);
    doc["sizes"] = config.sizes.empty() ? json(nullptr) : json(config.sizes);
    doc["tail_region"] = config.tail_region
                             ? json{config.tail_region->first, config.tail_region->second}
                             : json(nullptr);
    return doc;
}

} // namespace qwalk
