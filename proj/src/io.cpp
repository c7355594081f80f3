#include "segregate/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace seg {

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<CsvColumn>& columns) {
    if (columns.empty()) throw std::invalid_argument("write_csv: no columns");
    size_t rows = columns.front().values.size();
    for (const auto& c : columns)
        if (c.values.size() != rows) throw std::invalid_argument("write_csv: ragged columns");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
    for (size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c].name;
    out << "\n";
    for (size_t r = 0; r < rows; ++r) {
        for (size_t c = 0; c < columns.size(); ++c) {
            if (c) out << ",";
            if (columns[c].values[r]) out << fmt_g17(*columns[c].values[r]);
        }
        out << "\n";
    }
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_text: cannot open '" + path + "'");
    out << content;
}

} // namespace seg
