#include "gscr/output.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <cmath>

namespace gscr {

using nlohmann::json;

namespace {

std::string quote(std::string const& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(Eigen::VectorXd const& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
    return out;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.12g}", v);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "CSV row width differs from header");
    }
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    auto emit = [&out](std::vector<std::string> const& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += quote(cells[i]);
        }
        out += "\r\n";
    };
    emit(header_);
    for (auto const& row : rows_) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (auto const& c : row) {
            cells.push_back(std::holds_alternative<double>(c) ? format_number(std::get<double>(c))
                                                              : std::get<std::string>(c));
        }
        emit(cells);
    }
    return out;
}

std::string report_json(StrengthReport const& r, int indent) {
    json j{
        {"gscr", number(r.gscr)},
        {"t_star", number(r.t_star)},
        {"cgscr_star", number(r.cgscr_star)},
        {"margin", number(r.margin)},
        {"lambda_crit_approx", number(r.lambda_crit_approx)},
        {"lambda_crit_exact", number(r.lambda_crit_exact)},
        {"t_ref", number(r.t_ref)},
        {"diagnostics",
         {{"delta", number(r.diagnostics.delta)},
          {"epsilon", number(r.diagnostics.epsilon)},
          {"validity", number(r.diagnostics.validity)},
          {"radius", number(r.diagnostics.radius)},
          {"bound_applicable", r.diagnostics.applicable()}}},
        {"verdict", std::string(to_string(r.verdict))},
        {"eigenvalues", vector_json(r.eigenvalues)},
        {"weights", vector_json(r.weights)},
        {"warnings", r.warnings},
    };
    return j.dump(indent);
}

CsvTable sweep_table(SweepResult const& s) {
    CsvTable t({"p", "gscr", "cgscr_star", "margin", "lambda_crit_exact", "lambda_crit_approx"});
    for (auto const& sample : s.samples) {
        if (!sample.report) continue;
        auto const& r = *sample.report;
        t.add_row({sample.p, r.gscr, r.cgscr_star, r.margin, r.lambda_crit_exact,
                   r.lambda_crit_approx});
    }
    return t;
}

CsvTable study_table(std::vector<StudyRow> const& rows) {
    std::size_t width = 0;
    for (auto const& r : rows) width = std::max(width, r.control.size());
    std::vector<std::string> header;
    for (std::size_t k = 0; k < width; ++k) header.push_back("t" + std::to_string(k + 1));
    for (auto const* h : {"std_dev", "max_rel_error", "max_p_rel_gap", "points"}) header.push_back(h);

    CsvTable t(std::move(header));
    for (auto const& r : rows) {
        std::vector<CsvTable::Cell> cells(r.control.begin(), r.control.end());
        cells.resize(width, std::string{});
        cells.push_back(r.std_dev);
        cells.push_back(r.max_rel_error);
        cells.push_back(r.max_grid_gap);
        cells.push_back(static_cast<double>(r.points));
        t.add_row(std::move(cells));
    }
    return t;
}

}  // namespace gscr
