#include "fpplab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fpplab {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

const std::vector<std::string> kCommands = {
    "validate",   "scan",     "cylinder-scan", "coupling-check", "median-find", "goodset",
    "flip",       "antichain", "smallball",    "reckon",         "time-constant"};

const std::vector<std::string> kKeys = {
    "dist",      "lambda",      "a",           "b",        "v1",         "p1",
    "v2",        "values",      "probs",       "shift",    "p0",         "q",
    "d0",        "base",        "levels",      "pad",      "d",          "x",
    "direction", "nlist",       "mode",        "alpha",    "replicates", "outer",
    "seed",      "workers",     "xi",          "epsilon",  "r",          "alow",
    "tol",       "cgrid",       "fliplevel",   "flipto",   "augmented",  "mineligible",
    "maxeligible", "attempts",  "format",      "output"};

// Typed readers over the merged map; every failure is recorded, never thrown,
// so one pass reports all problems at once.
struct Reader {
  const std::map<std::string, std::string>& kv;
  std::vector<std::string>& errors;

  bool has(const std::string& k) const { return kv.count(k) != 0; }

  std::string str(const std::string& k, const std::string& dflt) const {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
  }

  template <typename T, typename Fn>
  T number(const std::string& k, T dflt, Fn parse) const {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    try {
      size_t used = 0;
      T v = parse(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      errors.push_back("bad value for '" + k + "': " + it->second);
      return dflt;
    }
  }

  double real(const std::string& k, double dflt) const {
    return number<double>(k, dflt, [](const std::string& s, size_t* used) {
      return std::stod(s, used);
    });
  }
  int64_t integer(const std::string& k, int64_t dflt) const {
    return number<int64_t>(k, dflt, [](const std::string& s, size_t* used) {
      return std::stoll(s, used);
    });
  }
  uint64_t unsigned64(const std::string& k, uint64_t dflt) const {
    return number<uint64_t>(k, dflt, [](const std::string& s, size_t* used) {
      if (!s.empty() && s[0] == '-') throw std::invalid_argument("negative");
      return std::stoull(s, used);
    });
  }
  bool flag(const std::string& k, bool dflt) const {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    const std::string v = it->second;
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    errors.push_back("bad value for '" + k + "': " + v);
    return dflt;
  }

  std::vector<double> reals(const std::string& k, std::vector<double> dflt) const {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    std::vector<double> out;
    for (const std::string& p : split(it->second, ',')) {
      try {
        size_t used = 0;
        out.push_back(std::stod(p, &used));
        if (used != p.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        errors.push_back("bad list entry for '" + k + "': " + p);
        return dflt;
      }
    }
    return out;
  }
  std::vector<int64_t> integers(const std::string& k, std::vector<int64_t> dflt) const {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    std::vector<int64_t> out;
    for (const std::string& p : split(it->second, ',')) {
      try {
        size_t used = 0;
        out.push_back(std::stoll(p, &used));
        if (used != p.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        errors.push_back("bad list entry for '" + k + "': " + p);
        return dflt;
      }
    }
    return out;
  }

  Vertex vertex(const std::string& k, const Vertex& dflt) const {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    const auto parts = split(it->second, ',');
    if (parts.size() < 2 || parts.size() > static_cast<size_t>(kMaxDims)) {
      errors.push_back("bad coordinate list for '" + k + "': " + it->second);
      return dflt;
    }
    Vertex v;
    v.d = static_cast<int>(parts.size());
    for (size_t i = 0; i < parts.size(); ++i) {
      try {
        size_t used = 0;
        const long long c = std::stoll(parts[i], &used);
        if (used != parts[i].size() || c < INT32_MIN || c > INT32_MAX)
          throw std::invalid_argument("range");
        v.c[i] = static_cast<int32_t>(c);
      } catch (const std::exception&) {
        errors.push_back("bad coordinate list for '" + k + "': " + it->second);
        return dflt;
      }
    }
    return v;
  }
};

Distribution build_distribution(const Reader& rd, std::vector<std::string>& errors) {
  const std::string kind = rd.str("dist", "exponential");
  try {
    if (kind == "exponential") return Distribution::exponential(rd.real("lambda", 1.0));
    if (kind == "uniform") return Distribution::uniform(rd.real("a", 0.0), rd.real("b", 1.0));
    if (kind == "twopoint")
      return Distribution::two_point(rd.real("v1", 1.0), rd.real("p1", 0.5), rd.real("v2", 10.0));
    if (kind == "shiftedexp")
      return Distribution::shifted_exponential(rd.real("shift", 1.0), rd.real("lambda", 1.0));
    if (kind == "atomexp")
      return Distribution::atom_exponential(rd.real("p0", 0.25), rd.real("lambda", 1.0));
    if (kind == "table") {
      const auto values = rd.reals("values", {});
      const auto probs = rd.reals("probs", {});
      if (values.empty() || values.size() != probs.size()) {
        errors.push_back("table law needs matching 'values' and 'probs' lists");
        return Distribution::exponential(1.0);
      }
      std::vector<std::pair<double, double>> vp;
      for (size_t i = 0; i < values.size(); ++i) vp.emplace_back(values[i], probs[i]);
      return Distribution::table(std::move(vp));
    }
  } catch (const std::exception& e) {
    errors.push_back(std::string("bad distribution parameters: ") + e.what());
    return Distribution::exponential(1.0);
  }
  errors.push_back("unknown distribution kind: " + kind);
  return Distribution::exponential(1.0);
}

std::string fmt_double_echo(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
  KeyValues out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line = line.substr(0, cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config line " + std::to_string(lineno) + ": unclosed section");
      continue;  // sections are decorative
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
    out.kv[key] = value;
  }
  return out;
}

KeyValues parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

const std::vector<std::string>& known_commands() { return kCommands; }
const std::vector<std::string>& known_keys() { return kKeys; }

RunConfig resolve_config(const std::string& command, const KeyValues& file_kv,
                         const KeyValues& flag_kv, std::vector<std::string>& errors) {
  RunConfig cfg;
  cfg.command = command;
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    errors.push_back("unknown command: " + command);

  std::map<std::string, std::string> merged = file_kv.kv;
  for (const auto& [k, v] : flag_kv.kv) merged[k] = v;
  for (const auto& [k, v] : merged)
    if (std::find(kKeys.begin(), kKeys.end(), k) == kKeys.end())
      errors.push_back("unknown key: " + k);

  // Every run is relative to a weight law; refusing to default it keeps
  // configs self-describing.
  if (merged.count("dist") == 0) errors.push_back("missing required key: dist");

  const Reader rd{merged, errors};
  cfg.dist = build_distribution(rd, errors);
  cfg.q = rd.real("q", cfg.q);
  if (rd.has("d0")) cfg.d0 = rd.real("d0", 0.0);
  cfg.base = rd.integer("base", cfg.base);
  if (rd.has("levels")) cfg.levels = static_cast<int>(rd.integer("levels", 1));
  cfg.pad = rd.real("pad", cfg.pad);
  cfg.dims = static_cast<int>(rd.integer("d", cfg.dims));
  cfg.x = rd.vertex("x", cfg.x);
  cfg.direction = rd.vertex("direction", cfg.direction);
  cfg.n_list = rd.integers("nlist", cfg.n_list);
  const std::string mode = rd.str("mode", command == "cylinder-scan" ? "cylinder" : "plane");
  if (mode != "plane" && mode != "cylinder") errors.push_back("mode must be plane or cylinder");
  cfg.cylinder = mode == "cylinder" || command == "cylinder-scan";
  cfg.alpha = rd.real("alpha", cfg.alpha);
  cfg.replicates = static_cast<int>(rd.integer("replicates", cfg.replicates));
  cfg.outer = static_cast<int>(rd.integer("outer", cfg.outer));
  cfg.seed = rd.unsigned64("seed", cfg.seed);
  cfg.workers = static_cast<int>(rd.integer("workers", cfg.workers));
  cfg.xi = rd.real("xi", cfg.xi);
  if (rd.has("epsilon")) cfg.epsilon = rd.real("epsilon", 0.0);
  if (rd.has("r")) cfg.r_lo = rd.real("r", 0.0);
  if (rd.has("alow")) cfg.a_low = rd.real("alow", 0.0);
  cfg.tol = rd.real("tol", cfg.tol);
  cfg.c_grid = rd.reals("cgrid", cfg.c_grid);
  cfg.flip_level = static_cast<int>(rd.integer("fliplevel", cfg.flip_level));
  cfg.flip_to = rd.integer("flipto", cfg.flip_to);
  cfg.augmented = rd.flag("augmented", cfg.augmented);
  cfg.min_eligible = static_cast<int>(rd.integer("mineligible", cfg.min_eligible));
  cfg.max_eligible = static_cast<int>(rd.integer("maxeligible", cfg.max_eligible));
  cfg.attempts = static_cast<int>(rd.integer("attempts", cfg.attempts));
  cfg.format = rd.str("format", cfg.format);
  cfg.output = rd.str("output", cfg.output);

  if (const char* env = std::getenv("FPPLAB_SEED")) {
    try {
      size_t used = 0;
      cfg.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      errors.push_back(std::string("bad FPPLAB_SEED value: ") + env);
    }
  }

  if (cfg.format != "csv" && cfg.format != "json") errors.push_back("format must be csv or json");
  if (!(cfg.q > 0 && cfg.q < 1)) errors.push_back("q must lie in (0,1)");
  if (cfg.base < 2) errors.push_back("base must be at least 2");
  if (cfg.levels && (*cfg.levels < 1 || *cfg.levels > 40)) errors.push_back("levels out of range");
  if (!(cfg.pad >= 1.0)) errors.push_back("pad must be at least 1");
  if (cfg.dims < 2 || cfg.dims > kMaxDims) errors.push_back("d out of range");
  if (cfg.x.d != cfg.dims) errors.push_back("x does not match the dimension d");
  if (cfg.direction.d != cfg.dims) errors.push_back("direction does not match the dimension d");
  if (cfg.replicates < 2) errors.push_back("replicates must be at least 2");
  if (cfg.outer < 3) errors.push_back("outer must be at least 3");
  if (cfg.workers < 1 || cfg.workers > 256) errors.push_back("workers out of range");
  if (!(cfg.xi > 0 && cfg.xi < 1)) errors.push_back("xi must lie in (0,1)");
  if (cfg.epsilon && !(*cfg.epsilon > 0)) errors.push_back("epsilon must be positive");
  if (!(cfg.tol > 0)) errors.push_back("tol must be positive");
  if (!(cfg.alpha > 0 && cfg.alpha < 1)) errors.push_back("alpha must lie in (0,1)");
  if (cfg.min_eligible < 1 || cfg.max_eligible < cfg.min_eligible || cfg.max_eligible > 12)
    errors.push_back("eligibility bounds must satisfy 1 <= min <= max <= 12");
  if (cfg.attempts < 1) errors.push_back("attempts must be positive");
  for (int64_t n : cfg.n_list)
    if (n < 1) errors.push_back("nlist entries must be positive");
  for (double c : cfg.c_grid)
    if (!(c > 0)) errors.push_back("cgrid entries must be positive");

  // Canonical echo, fixed order.
  auto put = [&](const std::string& k, const std::string& v) { cfg.echo.emplace_back(k, v); };
  put("command", cfg.command);
  put("dist", cfg.dist.describe());
  put("q", fmt_double_echo(cfg.q));
  if (cfg.d0) put("d0", fmt_double_echo(*cfg.d0));
  put("base", std::to_string(cfg.base));
  if (cfg.levels) put("levels", std::to_string(*cfg.levels));
  put("pad", fmt_double_echo(cfg.pad));
  put("d", std::to_string(cfg.dims));
  put("x", cfg.x.str());
  put("direction", cfg.direction.str());
  {
    std::string ns;
    for (size_t i = 0; i < cfg.n_list.size(); ++i)
      ns += (i ? "," : "") + std::to_string(cfg.n_list[i]);
    put("nlist", ns);
  }
  put("mode", cfg.cylinder ? "cylinder" : "plane");
  put("alpha", fmt_double_echo(cfg.alpha));
  put("replicates", std::to_string(cfg.replicates));
  put("outer", std::to_string(cfg.outer));
  put("seed", std::to_string(cfg.seed));
  put("xi", fmt_double_echo(cfg.xi));
  if (cfg.epsilon) put("epsilon", fmt_double_echo(*cfg.epsilon));
  if (cfg.r_lo) put("r", fmt_double_echo(*cfg.r_lo));
  if (cfg.a_low) put("alow", fmt_double_echo(*cfg.a_low));
  put("tol", fmt_double_echo(cfg.tol));
  {
    std::string cs;
    for (size_t i = 0; i < cfg.c_grid.size(); ++i)
      cs += (i ? "," : "") + fmt_double_echo(cfg.c_grid[i]);
    put("cgrid", cs);
  }
  put("fliplevel", std::to_string(cfg.flip_level));
  put("flipto", std::to_string(cfg.flip_to));
  put("augmented", cfg.augmented ? "true" : "false");
  put("mineligible", std::to_string(cfg.min_eligible));
  put("maxeligible", std::to_string(cfg.max_eligible));
  put("attempts", std::to_string(cfg.attempts));
  return cfg;
}

}  // namespace fpplab
