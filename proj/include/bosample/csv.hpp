#pragma once

#include <string>
#include <vector>

#include "bosample/dataset.hpp"

namespace bosample {

// Parsed numeric CSV: header row + all-numeric body.
struct CsvTable {
    std::vector<std::string> columns;
    Eigen::MatrixXd values; // rows x columns
};

CsvTable read_numeric_csv(const std::string& path);

// Population CSV: the named response column plus every other column as a
// feature, in header order. Requires at least 3 rows; parse errors name the
// offending row and column.
Dataset load_population_csv(const std::string& path, const std::string& response_column);

// Single numeric column, with or without a header line.
std::vector<double> read_numeric_column(const std::string& path);

// 17-significant-digit formatting so emitted values round-trip exactly and
// output files are byte-stable.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

} // namespace bosample
