#include "prefdiff/csv.hpp"

#include <cstdio>
#include <stdexcept>

namespace prefdiff {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), n_columns_(columns.size()) {
    if (!out_) throw std::runtime_error("csv: cannot open " + path);
    for (size_t i = 0; i < columns.size(); ++i) {
        if (i) out_ << ',';
        out_ << columns[i];
    }
    out_ << '\n';
}

CsvWriter& CsvWriter::field(const std::string& s) {
    if (in_row_) out_ << ',';
    out_ << s;
    ++in_row_;
    return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(format_double(v)); }

CsvWriter& CsvWriter::field(long v) { return field(std::to_string(v)); }

void CsvWriter::end_row() {
    if (in_row_ != n_columns_)
        throw std::runtime_error("csv: row has " + std::to_string(in_row_) + " fields, expected " +
                                 std::to_string(n_columns_));
    out_ << '\n';
    in_row_ = 0;
}

int CsvTable::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    throw std::runtime_error("csv: no column '" + name + "'");
}

double CsvTable::number(size_t row, int col) const {
    return std::stod(rows.at(row).at(static_cast<size_t>(col)));
}

namespace {
std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}
}  // namespace

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) return t;
    t.columns = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        t.rows.push_back(split_line(line));
    }
    return t;
}

}  // namespace prefdiff
