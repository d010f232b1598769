#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fpplab {

inline constexpr const char* kToolName = "fpplab";
inline constexpr const char* kToolVersion = "0.1.0";

// One output document: identity + echoed config, scalar results, and an
// optional numeric table.  Rendering is purely a function of the contents,
// so identical computations give byte-identical files.
struct TableDoc {
  std::string command;
  std::vector<std::pair<std::string, std::string>> meta;     // echoed inputs
  std::vector<std::pair<std::string, std::string>> results;  // named scalars
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Stable shortest-ish decimal rendering used for every numeric cell.
std::string format_double(double v);

std::string render_csv(const TableDoc& doc);
std::string render_json(const TableDoc& doc);

// Write-then-rename; an empty path streams to stdout instead.
void write_output(const std::string& path, const std::string& content);

}  // namespace fpplab
