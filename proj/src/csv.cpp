#include "bosample/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bosample/errors.hpp"

namespace bosample {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        std::ostringstream msg;
        msg << "non-numeric cell at row " << row << ", column '" << column << "': '" << cell << "'";
        throw IoError(msg.str());
    }
    return v;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) lines.push_back(line);
    }
    return lines;
}

} // namespace

CsvTable read_numeric_csv(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    if (lines.size() < 2) throw IoError("csv has no data rows: " + path);

    CsvTable t;
    t.columns = split_csv_line(lines[0]);
    const std::size_t ncol = t.columns.size();
    if (ncol == 0) throw IoError("csv has an empty header: " + path);

    t.values.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(ncol));
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const std::vector<std::string> cells = split_csv_line(lines[r]);
        if (cells.size() != ncol) {
            std::ostringstream msg;
            msg << "row " << r << " has " << cells.size() << " cells, expected " << ncol << ": "
                << path;
            throw IoError(msg.str());
        }
        for (std::size_t c = 0; c < ncol; ++c)
            t.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
                parse_cell(cells[c], r, t.columns[c]);
    }
    return t;
}

Dataset load_population_csv(const std::string& path, const std::string& response_column) {
    const CsvTable t = read_numeric_csv(path);
    const auto it = std::find(t.columns.begin(), t.columns.end(), response_column);
    if (it == t.columns.end())
        throw IoError("response column '" + response_column + "' not found in " + path);
    const Eigen::Index resp = static_cast<Eigen::Index>(it - t.columns.begin());
    if (t.values.rows() < 3) throw IoError("population csv needs at least 3 rows: " + path);
    if (t.columns.size() < 2) throw IoError("population csv needs at least one feature column: " + path);

    Dataset d;
    d.responses = t.values.col(resp);
    d.features.resize(t.values.rows(), t.values.cols() - 1);
    Eigen::Index out = 0;
    for (Eigen::Index c = 0; c < t.values.cols(); ++c) {
        if (c == resp) continue;
        d.features.col(out) = t.values.col(c);
        d.feature_names.push_back(t.columns[static_cast<std::size_t>(c)]);
        ++out;
    }
    return d;
}

std::vector<double> read_numeric_column(const std::string& path) {
    const std::vector<std::string> lines = read_lines(path);
    std::vector<double> values;
    values.reserve(lines.size());
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const std::string cell = trim(lines[r]);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
            if (r == 0) continue; // treat a single non-numeric first line as a header
            std::ostringstream msg;
            msg << "non-numeric value at row " << r << " in " << path << ": '" << cell << "'";
            throw IoError(msg.str());
        }
        values.push_back(v);
    }
    return values;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

} // namespace bosample
