#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "gscr/config.hpp"
#include "gscr/run.hpp"

namespace {

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("gscr");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (char const* env = std::getenv("GSCR_LOG")) {
        std::string const level = env;
        if (level == "error") spdlog::set_level(spdlog::level::err);
        else if (level == "warn") spdlog::set_level(spdlog::level::warn);
        else if (level == "info") spdlog::set_level(spdlog::level::info);
        else if (level == "debug") spdlog::set_level(spdlog::level::debug);
        else spdlog::warn("ignoring unknown GSCR_LOG level '{}'", level);
    }
}

std::vector<gscr::ContourTarget> parse_targets(std::string const& list) {
    std::vector<gscr::ContourTarget> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(gscr::ContourTarget::parse(item));
    if (out.empty()) throw gscr::Error(gscr::ErrorCode::SchemaError, "--targets: empty list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();

    CLI::App app{"Grid strength and static voltage stability margin of multi-infeed HVDC systems"};
    app.set_version_flag("--version", gscr::tool_version());
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<double> tol, from, to;
    std::optional<int> steps;
    std::optional<std::string> bus, targets, t_ref;

    for (auto const* name : {"analyze", "sweep", "contour", "boundary", "study"}) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        sub->add_option("config", config_path, "study configuration (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--tol", tol, "bisection tolerance in p.u.");
        sub->add_option("--steps", steps, "number of sweep samples");
        sub->add_option("--bus", bus, "bus whose rated power is varied");
        sub->add_option("--from", from, "start of the loading range, p.u.");
        sub->add_option("--to", to, "end of the loading range, p.u.");
        sub->add_option("--targets", targets, "contour targets, e.g. 2,2.1,critical,singular");
        sub->add_option("--t-ref", t_ref, "centre of the homogeneous reference")
            ->check(CLI::IsMember({"t_star", "mean"}));
    }

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e);
        return code == 0 ? gscr::kExitOk : gscr::kExitConfigError;
    }

    try {
        auto cfg = gscr::load_config(config_path);
        cfg.experiment = *gscr::parse_experiment(app.get_subcommands().front()->get_name());
        auto& p = cfg.params;
        if (out_dir) cfg.output = *out_dir;
        if (tol) p.tol = *tol;
        if (steps) p.steps = *steps;
        if (bus) p.bus = *bus;
        if (from) p.from = *from;
        if (to) p.to = *to;
        if (t_ref) p.t_ref = *t_ref == "mean" ? gscr::TRef::Mean : gscr::TRef::TStar;
        if (targets) {
            try {
                p.targets = parse_targets(*targets);
            } catch (gscr::Error const& e) {
                throw gscr::Error(gscr::ErrorCode::SchemaError, std::string("--targets: ") + e.what());
            }
        }
        if (tol && !(*tol > 0.0)) throw gscr::Error(gscr::ErrorCode::SchemaError, "--tol must be > 0");

        auto const manifest = gscr::run(cfg);
        std::cout << manifest.experiment << ": " << manifest.summary << "\n";
        for (auto const& f : manifest.files) std::cout << "  " << f << "\n";
        return gscr::kExitOk;
    } catch (gscr::Error const& e) {
        std::cerr << gscr::error_record(e) << std::endl;
        return gscr::exit_code(e.code());
    } catch (std::exception const& e) {
        std::cerr << gscr::error_record(gscr::Error(gscr::ErrorCode::InvalidArgument, e.what()))
                  << std::endl;
        return gscr::kExitDomainError;
    }
}
