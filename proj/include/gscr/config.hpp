#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gscr/boundary.hpp"
#include "gscr/network.hpp"
#include "gscr/strength.hpp"

namespace gscr {

enum class Experiment { Analyze, Sweep, Contour, Boundary, Study };
std::string_view to_string(Experiment e) noexcept;
std::optional<Experiment> parse_experiment(std::string_view name) noexcept;

struct BusConverter {
    double p_rated = 0.0;
    double t_param = 0.0;
};

struct GridSpec {
    double from = 1.0;
    double to = 1.4;
    int steps = 41;
};

struct ExperimentParams {
    std::optional<std::string> bus;  // loading bus; empty means uniform scaling
    double from = 1.0;
    std::optional<double> to;
    int steps = 50;
    double tol = 1e-8;
    TRef t_ref = TRef::TStar;
    std::vector<ContourTarget> targets{ContourTarget::gscr(2.0), ContourTarget::gscr(2.1),
                                       ContourTarget::critical(), ContourTarget::singular()};
    std::optional<std::string> solve_bus;  // defaults to the first converter bus
    std::optional<std::string> grid_bus;   // defaults to the second converter bus
    GridSpec grid;
    std::vector<std::vector<double>> t_rows;
};

enum class OutputFormat { Report, Csv };

struct StudyConfig {
    AcNetwork network;  // as written, parallel branches merged
    std::vector<std::optional<BusConverter>> converters;  // aligned with network.buses
    Experiment experiment = Experiment::Analyze;
    ExperimentParams params;
    std::filesystem::path output = "out";
    std::vector<OutputFormat> formats{OutputFormat::Report, OutputFormat::Csv};

    bool wants(OutputFormat f) const;
};

/// Network restricted to converter buses plus the aligned converter data.
struct AnalysisInputs {
    AcNetwork network;
    ConverterSet converters;
};

/// Reads, parses and validates a config file. Throws Error with ParseError
/// (with line/column), SchemaError (naming the field) or CrossRefError.
StudyConfig load_config(std::filesystem::path const& path);

/// Same as load_config() for in-memory text; `origin` names the source in errors.
StudyConfig parse_config(std::string const& text, std::string const& origin = "<config>");

/// Checks the experiment-specific requirements (e.g. a sweep needs `to`).
/// Called after command-line overrides have been applied.
void check_experiment(StudyConfig const& cfg);

/// Canonical JSON text: every field explicit, keys sorted, no whitespace.
/// parse_config(canonical_json(c)) reproduces c.
std::string canonical_json(StudyConfig const& cfg);

/// SHA-256 over the canonical JSON dump, lowercase hex.
std::string config_hash(StudyConfig const& cfg);

/// Kron-reduces away non-converter buses.
AnalysisInputs analysis_inputs(StudyConfig const& cfg);

}  // namespace gscr
