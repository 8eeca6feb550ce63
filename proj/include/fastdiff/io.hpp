#pragma once

#include <string>
#include <vector>

namespace fastdiff {

/// Full round-trip decimal formatting (17 significant digits) so downstream
/// comparisons are bit-stable.
std::string fmt17(double x);

/// Assembles a CSV with one header line; columns must share a length.
std::string csv_table(const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& columns);

void write_file(const std::string& path, const std::string& content);

} // namespace fastdiff
