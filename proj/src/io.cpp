#include "fpplab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

namespace fpplab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string render_csv(const TableDoc& doc) {
  std::string out;
  out += "# ";
  out += kToolName;
  out += " ";
  out += kToolVersion;
  out += "\n";
  for (const auto& [k, v] : doc.meta) out += "# " + k + " = " + v + "\n";
  for (const auto& [k, v] : doc.results) out += "# result " + k + " = " + v + "\n";
  if (!doc.columns.empty()) {
    for (size_t i = 0; i < doc.columns.size(); ++i) {
      if (i) out += ",";
      out += doc.columns[i];
    }
    out += "\n";
    for (const auto& row : doc.rows) {
      for (size_t i = 0; i < row.size(); ++i) {
        if (i) out += ",";
        out += format_double(row[i]);
      }
      out += "\n";
    }
  }
  return out;
}

std::string render_json(const TableDoc& doc) {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = doc.command;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : doc.meta) cfg[k] = v;
  j["config"] = cfg;
  nlohmann::ordered_json res = nlohmann::ordered_json::object();
  for (const auto& [k, v] : doc.results) res[k] = v;
  j["results"] = res;
  if (!doc.columns.empty()) {
    j["columns"] = doc.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : doc.rows) {
      nlohmann::ordered_json r = nlohmann::ordered_json::array();
      for (double v : row) r.push_back(format_double(v));
      rows.push_back(std::move(r));
    }
    j["rows"] = rows;
  }
  return j.dump(2) + "\n";
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open output file: " + tmp);
    os << content;
    if (!os) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot move output into place: " + path);
}

}  // namespace fpplab
