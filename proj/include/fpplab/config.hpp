#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpplab/geometry.hpp"
#include "fpplab/weights.hpp"

namespace fpplab {

// Flat key/value view of a run's inputs.  Config files use "key = value"
// lines; [section] headings group keys visually but carry no meaning, since
// key names are globally unique.  '#' and ';' start comments.
struct KeyValues {
  std::map<std::string, std::string> kv;
  bool has(const std::string& k) const { return kv.count(k) != 0; }
};

KeyValues parse_config_text(const std::string& text);
KeyValues parse_config_file(const std::string& path);

// Fully resolved run inputs: file keys, overridden by command-line keys,
// overridden by the FPPLAB_SEED environment variable (seed only).
struct RunConfig {
  std::string command;

  Distribution dist = Distribution::exponential(1.0);
  double q = 0.5;
  std::optional<double> d0;  // explicit lo/hi threshold

  int64_t base = 4;
  std::optional<int> levels;
  double pad = 1.5;
  int dims = 2;
  Vertex x = Vertex::of({8, 0});
  Vertex direction = Vertex::of({1, 0});
  std::vector<int64_t> n_list = {8, 16, 32, 64};
  bool cylinder = false;
  double alpha = 0.25;

  int replicates = 200;
  int outer = 41;
  uint64_t seed = 20250822;
  int workers = 1;

  double xi = 0.2;
  std::optional<double> epsilon;  // default derived from the threshold gap
  std::optional<double> r_lo;     // default centers the band in the window
  std::optional<double> a_low;    // explicit window position, skipping the search
  double tol = 0.05;
  std::vector<double> c_grid = {0.05, 0.10, 0.15, 0.20, 0.25, 0.30};

  int flip_level = 0;    // 0 = middle of the deviation scan range
  int64_t flip_to = -1;  // -1 = two standard deviations below the mean count
  bool augmented = false;

  int min_eligible = 1;
  int max_eligible = 12;
  int attempts = 100;

  std::string format = "csv";  // csv | json
  std::string output;          // empty = stdout

  // Canonical echo of the semantic inputs (fixed order), reproduced in every
  // output document.  Presentation keys (workers, output, format) stay out,
  // so payloads are comparable across runs that differ only in those.
  std::vector<std::pair<std::string, std::string>> echo;
};

// Merge + parse + validate.  Unknown keys, malformed values, and illegal
// combinations land in `errors`; the returned config is only meaningful when
// `errors` comes back empty.
RunConfig resolve_config(const std::string& command, const KeyValues& file_kv,
                         const KeyValues& flag_kv, std::vector<std::string>& errors);

const std::vector<std::string>& known_commands();
const std::vector<std::string>& known_keys();

}  // namespace fpplab
