#include "fastdiff/io.hpp"

#include <cstdio>
#include <fstream>

#include "fastdiff/errors.hpp"

namespace fastdiff {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string csv_table(const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& columns) {
    if (names.size() != columns.size()) throw ConfigError("csv_table: names/columns mismatch");
    std::string out;
    for (std::size_t c = 0; c < names.size(); ++c) {
        out += names[c];
        out += c + 1 < names.size() ? ',' : '\n';
    }
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns) {
        if (col.size() != rows) throw ConfigError("csv_table: ragged columns");
    }
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            out += fmt17(columns[c][r]);
            out += c + 1 < columns.size() ? ',' : '\n';
        }
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw ConfigError("failed writing '" + path + "'");
}

} // namespace fastdiff
