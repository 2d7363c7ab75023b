#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace prefdiff {

// Minimal CSV writer with deterministic float formatting (%.17g round-trips
// doubles, so identical runs produce byte-identical files).
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);

    CsvWriter& field(const std::string& s);
    CsvWriter& field(double v);
    CsvWriter& field(long v);
    CsvWriter& field(int v) { return field(static_cast<long>(v)); }
    void end_row();

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    size_t n_columns_;
    size_t in_row_ = 0;
};

std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const;
    double number(size_t row, int col) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace prefdiff
