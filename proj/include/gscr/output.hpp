#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gscr/boundary.hpp"
#include "gscr/strength.hpp"

namespace gscr {

/// RFC 4180 table: CRLF line ends, header row first, numbers printed with 12
/// significant digits and '.' as the decimal separator.
class CsvTable {
  public:
    using Cell = std::variant<double, std::string>;

    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<Cell> row);
    std::size_t rows() const noexcept { return rows_.size(); }
    std::string str() const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

/// Fixed 12-significant-digit formatting used in every CSV cell.
std::string format_number(double v);

/// JSON text of a report. Non-finite numbers are written as null.
std::string report_json(StrengthReport const& r, int indent = 2);

CsvTable sweep_table(SweepResult const& s);
CsvTable study_table(std::vector<StudyRow> const& rows);

}  // namespace gscr
