#include "qwalk/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qwalk/errors.hpp"

namespace qwalk::cli {

using nlohmann::json;
namespace fs = std::filesystem;

nlohmann::json load_config(const fs::path& path, const std::vector<std::string>& overrides)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read config file '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    json doc = json::parse(buffer.str(), nullptr, false);
    if (doc.is_discarded()) {
        throw ConfigError({"'" + path.string() + "' is not valid JSON"});
    }
    for (const auto& assignment : overrides) {
        apply_override(doc, assignment);
    }
    return doc;
}

namespace {

class OutputDir {
public:
    OutputDir(fs::path dir, std::vector<std::string>& written) : dir_(std::move(dir)), written_(written)
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) {
            throw IoError("cannot create output directory '" + dir_.string() + "'");
        }
    }

    void write(const std::string& name, const std::string& content)
    {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
        out.close();
        if (!out) {
            throw IoError("cannot write '" + path.string() + "'");
        }
        written_.push_back(name);
    }

    void write_json(const std::string& name, const json& doc) { write(name, doc.dump(2) + "\n"); }

private:
    fs::path dir_;
    std::vector<std::string>& written_;
};

std::string with_suffix(const std::string& stem, const std::string& suffix, const std::string& ext)
{
    return stem + suffix + ext;
}

json fit_document(const EnsembleResult& result)
{
    json doc;
    if (result.fit) {
        doc = to_json(*result.fit);
    } else {
        const FitWindow window = result.config.resolved_fit_window();
        doc = {{"alpha", nullptr}, {"stderr", nullptr}, {"r2", nullptr},
               {"window", {window.t_min, window.t_max}}};
    }
    doc["realizations"] = result.realizations;
    doc["realization_alphas"] = result.realization_alphas;
    const double spread = result.alpha_spread_stderr();
    doc["alpha_realization_stderr"] = std::isfinite(spread) ? json(spread) : json(nullptr);
    doc["delta_theta"] = result.config.noise.delta_theta();
    doc["noise_kind"] = std::string(to_string(result.config.noise.kind));
    doc["noise_axis"] = std::string(to_string(result.config.noise.axis));
    return doc;
}

void report(std::ostream& log, const EnsembleResult& result)
{
    for (const auto& w : result.warnings) {
        log << "warning: " << w << '\n';
    }
}

void write_run(OutputDir& out, const ExperimentConfig& config, const SimulationConfig& sim,
               const std::string& suffix, const RunOptions& options, std::ostream& log)
{
    const EnsembleResult result = run_ensemble(sim, options);
    report(log, result);
    const MomentSeries& series = result.mean;
    if (config.format != OutputFormat::json) {
        std::ostringstream csv;
        csv << "t,sigma_mean,sigma_stderr\n";
        for (std::size_t i = 0; i < series.size(); ++i) {
            csv << series.times[i] << ',' << format_number(series.sigma[i]) << ','
                << format_number(series.sigma_stderr[i]) << '\n';
        }
        out.write(with_suffix("sigma_series", suffix, ".csv"), csv.str());
        std::ostringstream moments;
        write_moment_series_csv(moments, series);
        out.write(with_suffix("moments", suffix, ".csv"), moments.str());
    }
    if (config.format != OutputFormat::csv) {
        out.write_json(with_suffix("series", suffix, ".json"), to_json(series));
    }
    out.write_json(with_suffix("fit", suffix, ".json"), fit_document(result));
}

void write_profile(OutputDir& out, const ExperimentConfig& config, const SimulationConfig& sim,
                   const std::string& suffix, const RunOptions& options, std::ostream& log)
{
    const EnsembleResult result = run_ensemble(sim, options);
    report(log, result);
    const ProbabilityDistribution& dist = result.mean_distribution;
    if (config.format != OutputFormat::json) {
        std::ostringstream csv;
        csv << "n_relative,probability_mean\n";
        for (std::size_t n = 0; n < dist.probs.size(); ++n) {
            csv << dist.relative(n) << ',' << format_number(dist.probs[n]) << '\n';
        }
        out.write(with_suffix("profile", suffix, ".csv"), csv.str());
    }
    if (config.format != OutputFormat::csv) {
        std::vector<long> sites(dist.probs.size());
        for (std::size_t n = 0; n < sites.size(); ++n) {
            sites[n] = dist.relative(n);
        }
        out.write_json(with_suffix("profile", suffix, ".json"),
                       json{{"n_relative", sites}, {"probability_mean", dist.probs}});
    }
    if (config.tail_region) {
        const TailFit tail =
            fit_exponential_tail(dist, config.tail_region->first, config.tail_region->second);
        json doc = to_json(tail);
        doc["region"] = {config.tail_region->first, config.tail_region->second};
        out.write_json(with_suffix("tail_fit", suffix, ".json"), doc);
    }
}

void write_scan(OutputDir& out, const ExperimentConfig& config, const SimulationConfig& sim,
                const std::string& suffix, const RunOptions& options)
{
    const auto table = run_theta_scan(sim, config.theta1_grid, options);
    if (config.format != OutputFormat::json) {
        std::ostringstream csv;
        csv << "theta1,alpha,alpha_stderr\n";
        for (const auto& p : table) {
            csv << format_number(p.theta1) << ',' << format_number(p.alpha) << ','
                << format_number(p.alpha_stderr) << '\n';
        }
        out.write(with_suffix("alpha_vs_theta1", suffix, ".csv"), csv.str());
    }
    if (config.format != OutputFormat::csv) {
        json rows = json::array();
        for (const auto& p : table) {
            rows.push_back({{"theta1", p.theta1}, {"alpha", p.alpha}, {"alpha_stderr", p.alpha_stderr}});
        }
        out.write_json(with_suffix("alpha_vs_theta1", suffix, ".json"), rows);
    }
}

void write_fss(OutputDir& out, const ExperimentConfig& config, const SimulationConfig& sim,
               const std::string& suffix, const RunOptions& options)
{
    const FssResult result = run_fss(sim, config.sizes, config.tail_fraction, options);
    if (config.format != OutputFormat::json) {
        std::ostringstream csv;
        csv << "N,sigma_bar,stderr\n";
        for (const auto& p : result.points) {
            csv << p.lattice_size << ',' << format_number(p.sigma_bar) << ','
                << format_number(p.sigma_bar_stderr) << '\n';
        }
        out.write(with_suffix("sigma_vs_N", suffix, ".csv"), csv.str());
    }
    if (config.format != OutputFormat::csv) {
        json rows = json::array();
        for (const auto& p : result.points) {
            rows.push_back({{"N", p.lattice_size},
                            {"steps", p.steps},
                            {"sigma_bar", p.sigma_bar},
                            {"stderr", p.sigma_bar_stderr}});
        }
        out.write_json(with_suffix("sigma_vs_N", suffix, ".json"), rows);
    }
    const LinearFit& fit = result.scaling;
    out.write_json(with_suffix("scaling_fit", suffix, ".json"),
                   json{{"slope", fit.slope},
                        {"stderr", std::isfinite(fit.slope_stderr) ? json(fit.slope_stderr) : json(nullptr)},
                        {"intercept", fit.intercept},
                        {"r2", fit.r_squared},
                        {"tail_fraction", config.tail_fraction}});
}

} // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& config, const fs::path& output_dir,
                                        const RunOptions& options, std::ostream& log)
{
    std::vector<std::string> written;
    OutputDir out(output_dir, written);
    out.write_json("config_echo.json", to_json(config));

    std::vector<std::pair<SimulationConfig, std::string>> variants{{config.simulation, ""}};
    if (config.with_random_baseline) {
        if (config.simulation.noise.kind == NoiseKind::binary_pair) {
            variants.emplace_back(random_baseline(config.simulation), "_random");
        } else {
            log << "note: --with-random-baseline only applies to binary-pair noise; ignored\n";
        }
    }
    for (const auto& [sim, suffix] : variants) {
        switch (config.experiment) {
        case Experiment::run: write_run(out, config, sim, suffix, options, log); break;
        case Experiment::profile: write_profile(out, config, sim, suffix, options, log); break;
        case Experiment::scan: write_scan(out, config, sim, suffix, options); break;
        case Experiment::fss: write_fss(out, config, sim, suffix, options); break;
        }
    }
    return written;
}

int main(int argc, char** argv)
{
    CLI::App app{"qwalk: one-dimensional discrete-time quantum walks under correlated coin noise"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
    std::string format;
    unsigned threads = 0;
    bool with_baseline = false;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"run", "ensemble sigma(t) series and power-law fit"},
        {"scan", "spreading exponent against theta1"},
        {"fss", "finite-size scaling of the long-time width"},
        {"profile", "ensemble-averaged final probability profile"},
    };
    for (const auto& [name, description] : commands) {
        CLI::App* sub = app.add_subcommand(name, description);
        sub->add_option("config", config_path, "JSON config file")->required();
        sub->add_option("overrides", overrides, "key=value overrides, e.g. noise.theta1=pi/3");
        sub->add_option("-o,--output-dir", output_dir, "directory for output files")->required();
        sub->add_option("--format", format, "csv, json or both")
            ->check(CLI::IsMember({"csv", "json", "both"}));
        sub->add_option("--threads", threads, "worker threads (0 = all cores; QWALK_THREADS overrides)");
        sub->add_flag("--with-random-baseline", with_baseline,
                      "also run the uncorrelated twin of a binary-pair experiment");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    if (const char* env = std::getenv("QWALK_THREADS")) {
        try {
            threads = static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            std::cerr << "error: QWALK_THREADS must be a non-negative integer\n";
            return kConfigError;
        }
    }
    const Experiment experiment = parse_experiment(app.get_subcommands().front()->get_name());

    ExperimentConfig config;
    try {
        json doc = load_config(config_path, overrides);
        if (!format.empty()) {
            doc["format"] = format;
        }
        if (with_baseline) {
            doc["with_random_baseline"] = true;
        }
        config = parse_config(doc, experiment);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const ConfigError& e) {
        for (const auto& problem : e.problems()) {
            std::cerr << "config error: " << problem << '\n';
        }
        return kConfigError;
    }

    try {
        run_experiment(config, output_dir, RunOptions{threads}, std::cerr);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kSimulationError;
    }
    return kOk;
}

} // namespace qwalk::cli
