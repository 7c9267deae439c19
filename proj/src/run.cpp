#include "gscr/run.hpp"

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include "gscr/output.hpp"

namespace gscr {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class OutputDir {
  public:
    explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir_.string() + ": " + ec.message());
    }

    void write(std::string const& name, std::string const& content) {
        auto const path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
        files_.push_back(path.generic_string());
        spdlog::debug("wrote {}", path.generic_string());
    }

    std::vector<std::string> const& files() const { return files_; }

  private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

std::string utc_timestamp() {
    auto const now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

ContourAxes axes_for(StudyConfig const& cfg, AnalysisInputs const& in) {
    auto const& buses = in.network.buses;
    ContourAxes axes;
    axes.solve_bus = cfg.params.solve_bus.value_or(buses.at(0).id);
    if (cfg.params.grid_bus) {
        axes.grid_bus = *cfg.params.grid_bus;
    } else {
        for (auto const& b : buses) {
            if (b.id != axes.solve_bus) {
                axes.grid_bus = b.id;
                break;
            }
        }
    }
    return axes;
}

LoadingDirection direction_for(StudyConfig const& cfg, AnalysisInputs const& in) {
    return LoadingDirection{in.converters, cfg.params.bus, cfg.params.from, *cfg.params.to};
}

std::string run_analyze(StudyConfig const& cfg, AnalysisInputs const& in, OutputDir& out,
                        std::vector<std::string>& warnings) {
    auto const r = analyze(in.network, in.converters, {cfg.params.t_ref, 1e-6});
    warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
    if (cfg.wants(OutputFormat::Report)) out.write("report.json", report_json(r) + "\n");
    if (cfg.wants(OutputFormat::Csv)) {
        CsvTable t({"gscr", "t_star", "cgscr_star", "margin", "lambda_crit_exact",
                    "lambda_crit_approx", "delta", "epsilon", "validity", "radius", "verdict"});
        t.add_row({r.gscr, r.t_star, r.cgscr_star, r.margin, r.lambda_crit_exact,
                   r.lambda_crit_approx, r.diagnostics.delta, r.diagnostics.epsilon,
                   r.diagnostics.validity, r.diagnostics.radius, std::string(to_string(r.verdict))});
        out.write("analyze.csv", t.str());
    }
    return fmt::format("gscr={} t_star={} cgscr_star={} margin={} verdict={}",
                       format_number(r.gscr), format_number(r.t_star),
                       format_number(r.cgscr_star), format_number(r.margin), to_string(r.verdict));
}

std::string run_sweep(StudyConfig const& cfg, AnalysisInputs const& in, OutputDir& out,
                      std::vector<std::string>& warnings) {
    auto const dir = direction_for(cfg, in);
    auto const s = sweep(in.network, dir, cfg.params.steps, {cfg.params.t_ref, 1e-6});
    warnings.insert(warnings.end(), s.warnings.begin(), s.warnings.end());
    auto const crossing = sweep_crossing(s, [](StrengthReport const& r) { return r.margin; });

    if (cfg.wants(OutputFormat::Csv)) out.write("sweep.csv", sweep_table(s).str());
    if (cfg.wants(OutputFormat::Report)) {
        json failed = json::array();
        for (auto const& sample : s.samples) {
            if (!sample.report) failed.push_back({{"p", sample.p}, {"error", sample.error}});
        }
        json j{{"bus", dir.bus ? json(*dir.bus) : json("uniform")},
               {"from", dir.lo},
               {"to", dir.hi},
               {"steps", cfg.params.steps},
               {"gscr_strictly_decreasing", s.gscr_strictly_decreasing},
               {"cgscr_star_variation", number(s.cgscr_star_variation)},
               {"margin_crossing", crossing ? json(*crossing) : json(nullptr)},
               {"failed_samples", failed},
               {"warnings", s.warnings}};
        out.write("sweep.json", j.dump(2) + "\n");
    }
    return fmt::format("{} samples, gscr strictly decreasing: {}, cgscr_star variation {}",
                       s.samples.size(), s.gscr_strictly_decreasing,
                       format_number(s.cgscr_star_variation));
}

std::string run_boundary(StudyConfig const& cfg, AnalysisInputs const& in, OutputDir& out) {
    auto const dir = direction_for(cfg, in);
    BisectionOptions opts;
    opts.tol = cfg.params.tol;
    auto const c = compare_boundaries(in.network, dir, opts);
    auto const at_exact = analyze(in.network, dir.at(in.network, c.p_exact), {cfg.params.t_ref, 1e-6});

    if (cfg.wants(OutputFormat::Csv)) {
        CsvTable t({"p_exact", "p_approx", "rel_error", "gscr_at_exact", "cgscr_star_at_exact"});
        t.add_row({c.p_exact, c.p_approx, c.rel_error, at_exact.gscr, at_exact.cgscr_star});
        out.write("boundary.csv", t.str());
    }
    if (cfg.wants(OutputFormat::Report)) {
        json j{{"bus", dir.bus ? json(*dir.bus) : json("uniform")},
               {"p_exact", c.p_exact},
               {"p_approx", c.p_approx},
               {"rel_error", c.rel_error},
               {"tol", opts.tol},
               {"report_at_exact", json::parse(report_json(at_exact))}};
        out.write("boundary.json", j.dump(2) + "\n");
    }
    return fmt::format("p_exact={} p_approx={} rel_error={}", format_number(c.p_exact),
                       format_number(c.p_approx), format_number(c.rel_error));
}

std::string run_contour(StudyConfig const& cfg, AnalysisInputs const& in, OutputDir& out,
                        std::vector<std::string>& warnings) {
    auto const axes = axes_for(cfg, in);
    auto const grid = linspace(cfg.params.grid.from, cfg.params.grid.to, cfg.params.grid.steps);
    BisectionOptions opts;
    opts.tol = cfg.params.tol;

    CsvTable t({"target", "p_grid", "p_solve"});
    json curves = json::array();
    std::size_t points = 0;
    for (auto const& target : cfg.params.targets) {
        auto const c = gscr_contour(in.network, in.converters, target, grid, axes, opts);
        for (auto const& pt : c.points) t.add_row({target.label(), pt.p_grid, pt.p_solve});
        for (auto const& s : c.skipped) {
            spdlog::warn("contour point skipped: {}", s);
            warnings.push_back(s);
        }
        points += c.points.size();
        curves.push_back({{"target", target.label()},
                          {"points", c.points.size()},
                          {"skipped", c.skipped}});
    }
    if (cfg.wants(OutputFormat::Csv)) out.write("contour.csv", t.str());
    if (cfg.wants(OutputFormat::Report)) {
        json j{{"solve_bus", axes.solve_bus}, {"grid_bus", axes.grid_bus}, {"curves", curves}};
        out.write("contour.json", j.dump(2) + "\n");
    }
    return fmt::format("{} contour points over {} targets (solve bus {}, grid bus {})", points,
                       cfg.params.targets.size(), axes.solve_bus, axes.grid_bus);
}

std::string run_study(StudyConfig const& cfg, AnalysisInputs const& in, OutputDir& out) {
    auto const axes = axes_for(cfg, in);
    auto const grid = linspace(cfg.params.grid.from, cfg.params.grid.to, cfg.params.grid.steps);
    BisectionOptions opts;
    opts.tol = cfg.params.tol;
    auto const rows = inhomogeneity_study(in.network, in.converters, cfg.params.t_rows, grid, axes, opts);

    if (cfg.wants(OutputFormat::Csv)) out.write("study.csv", study_table(rows).str());
    if (cfg.wants(OutputFormat::Report)) {
        json jr = json::array();
        for (auto const& r : rows) {
            jr.push_back({{"t", r.control},
                          {"std_dev", r.std_dev},
                          {"max_rel_error", r.max_rel_error},
                          {"max_p_rel_gap", r.max_grid_gap},
                          {"points", r.points}});
        }
        json j{{"solve_bus", axes.solve_bus}, {"grid_bus", axes.grid_bus}, {"rows", jr}};
        out.write("study.json", j.dump(2) + "\n");
    }
    return fmt::format("{} study rows", rows.size());
}

}  // namespace

std::string tool_version() { return GSCR_VERSION; }

int exit_code(ErrorCode code) noexcept {
    return is_config_error(code) ? kExitConfigError : kExitDomainError;
}

std::string error_record(Error const& e) {
    json j{{"code", std::string(to_string(e.code()))},
           {"exit", exit_code(e.code())},
           {"message", e.what()}};
    return j.dump();
}

RunManifest run(StudyConfig const& cfg) {
    check_experiment(cfg);

    RunManifest m;
    m.config_hash = config_hash(cfg);
    m.tool_version = tool_version();
    m.timestamp = utc_timestamp();
    m.experiment = std::string(to_string(cfg.experiment));

    auto const in = analysis_inputs(cfg);
    if (in.network.size() != cfg.network.size()) {
        auto const note = fmt::format("Kron-reduced {} non-converter bus(es)",
                                      cfg.network.size() - in.network.size());
        spdlog::info(note);
        m.warnings.push_back(note);
    }
    spdlog::info("running {} on {} converter bus(es)", m.experiment, in.network.size());

    OutputDir out(cfg.output);
    switch (cfg.experiment) {
        case Experiment::Analyze: m.summary = run_analyze(cfg, in, out, m.warnings); break;
        case Experiment::Sweep: m.summary = run_sweep(cfg, in, out, m.warnings); break;
        case Experiment::Contour: m.summary = run_contour(cfg, in, out, m.warnings); break;
        case Experiment::Boundary: m.summary = run_boundary(cfg, in, out); break;
        case Experiment::Study: m.summary = run_study(cfg, in, out); break;
    }
    m.files = out.files();

    json j{{"config_hash", m.config_hash},
           {"tool_version", m.tool_version},
           {"timestamp", m.timestamp},
           {"experiment", m.experiment},
           {"files", m.files},
           {"warnings", m.warnings}};
    out.write("manifest.json", j.dump(2) + "\n");
    return m;
}

}  // namespace gscr
