// zmap-lab: runs one experiment and writes a CSV or JSON-lines artifact.
//
//   zmap-lab <spin-map|spin-osc|band-sweep|bias-sweep> --config <path>
//            [--out <path>] [--format csv|jsonl] [--workers N] [--seed N]
//
// Exit status: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "zmap/app/config.hpp"
#include "zmap/app/runner.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("zmap");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::warn);
    if (const char* lvl = std::getenv("ZMAP_LOG")) {
        const auto parsed = spdlog::level::from_str(lvl);
        // from_str maps unknown names to off
        if (parsed != spdlog::level::off || std::string(lvl) == "off") spdlog::set_level(parsed);
    }
}

} // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Cycle-operator pumping experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format;
    int workers = 0;
    long seed = 0;

    for (const char* name : {"spin-map", "spin-osc", "band-sweep", "bias-sweep"}) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        sub->add_option("--config", config_path, "config file (key = value lines)")->required();
        sub->add_option("--out", out_path, "output file (default: stdout or output.path)");
        sub->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
        sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "recorded in the metadata; every experiment is deterministic");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    const auto* sub = app.get_subcommands().front();
    const auto experiment = *zmap::app::parse_experiment(sub->get_name());

    zmap::app::RunConfig cfg;
    try {
        cfg = zmap::app::load_config(config_path);
        if (cfg.experiment && *cfg.experiment != experiment) {
            throw zmap::app::ValidationError("config names experiment '" +
                                             std::string(zmap::app::experiment_name(*cfg.experiment)) +
                                             "' but the command is '" + sub->get_name() + "'");
        }
        if (!format.empty()) cfg.format = format == "jsonl" ? zmap::app::OutputFormat::Jsonl : zmap::app::OutputFormat::Csv;
        if (workers > 0) cfg.workers = workers;
        if (sub->count("--seed")) cfg.seed = seed;
        if (!out_path.empty()) cfg.output_path = out_path;
        zmap::app::validate(cfg);
    } catch (const zmap::app::ParseError& e) {
        spdlog::error("config parse error: {}", e.what());
        return kExitConfig;
    } catch (const zmap::app::ValidationError& e) {
        spdlog::error("config validation error: {}", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        spdlog::error("config validation error: {}", e.what());
        return kExitConfig;
    }

    spdlog::info("running {} with {} worker(s)", sub->get_name(), cfg.workers);
    zmap::app::SweepArtifact artifact;
    try {
        artifact = zmap::app::run(cfg, experiment, cfg.workers);
    } catch (const zmap::app::ValidationError& e) {
        spdlog::error("config validation error: {}", e.what());
        return kExitConfig;
    } catch (const zmap::NumericalError& e) {
        spdlog::error("numerical failure: {}", e.what());
        return kExitNumerical;
    }
    spdlog::info("{} rows", artifact.rows.size());

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (cfg.output_path) {
        file.open(*cfg.output_path);
        if (!file) {
            spdlog::error("cannot open output file {}", *cfg.output_path);
            return kExitConfig;
        }
        out = &file;
    }
    if (cfg.format == zmap::app::OutputFormat::Jsonl) {
        zmap::app::write_jsonl(artifact, *out);
    } else {
        zmap::app::write_csv(artifact, *out);
    }
    out->flush();
    return 0;
}
