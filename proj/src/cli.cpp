#include "fpplab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <utility>

#include <CLI11.hpp>

#include "fpplab/experiments.hpp"
#include "fpplab/model.hpp"
#include "fpplab/paths.hpp"

namespace fpplab {

namespace {

std::string fd(double v) { return format_double(v); }

void put(TableDoc& doc, const std::string& k, const std::string& v) {
  doc.results.emplace_back(k, v);
}
void putd(TableDoc& doc, const std::string& k, double v) { put(doc, k, fd(v)); }

StudyModel make_model(const RunConfig& cfg) {
  ModelOptions opt;
  opt.dist = cfg.dist;
  opt.threshold_quantile = cfg.q;
  opt.explicit_cut = cfg.d0;
  opt.scale_base = cfg.base;
  opt.scale_levels = cfg.levels;
  opt.dims = cfg.dims;
  opt.pad = cfg.pad;
  opt.target = cfg.x;
  opt.cylinder = cfg.cylinder;
  opt.alpha = cfg.alpha;
  try {
    return StudyModel(std::move(opt));
  } catch (const std::invalid_argument& e) {
    throw ConfigFailure(e.what());
  }
}

// The clamp window every conditional command works inside: either placed
// explicitly or centered by the bisection search.
TruncationWindow resolve_window(const StudyModel& model, const RunConfig& cfg, TableDoc& doc) {
  if (cfg.a_low) {
    const TruncationWindow w{*cfg.a_low, model.window_width()};
    put(doc, "window", "explicit");
    putd(doc, "window_a_low", w.a_low);
    putd(doc, "window_width", w.width);
    return w;
  }
  const TruncationSearch s =
      find_truncation(model, cfg.outer, cfg.replicates, cfg.tol, cfg.seed, cfg.workers);
  put(doc, "window", s.converged ? "centered" : "budget-exhausted");
  putd(doc, "window_a_low", s.window.a_low);
  putd(doc, "window_width", s.window.width);
  putd(doc, "window_gap", s.achieved_gap);
  return s.window;
}

double resolve_epsilon(const StudyModel& model, const RunConfig& cfg) {
  if (cfg.epsilon) return *cfg.epsilon;
  // Default band width: a tenth of the gap between the threshold and the
  // mean lo-mode weight.  Degenerates for laws whose lo mode is a single
  // atom; those runs must say what band they mean.
  const double cut = model.cut().value;
  const double eps = 0.1 * (cut - model.dist().mean_below(cut));
  if (!(eps > 0))
    throw ConfigFailure("derived epsilon is not positive for this law; pass epsilon explicitly");
  return eps;
}

ExitCode cmd_validate(const RunConfig& cfg, TableDoc& doc) {
  const ValidationReport rep = validate_distribution(cfg.dist);
  put(doc, "pass", rep.pass ? "true" : "false");
  putd(doc, "mass_at_zero", cfg.dist.cdf(0.0));
  putd(doc, "support_infimum", cfg.dist.infimum());
  for (size_t i = 0; i < rep.failures.size(); ++i)
    put(doc, "failure" + std::to_string(i), rep.failures[i]);
  for (size_t i = 0; i < rep.warnings.size(); ++i)
    put(doc, "warning" + std::to_string(i), rep.warnings[i]);
  return rep.pass ? ExitCode::Ok : ExitCode::Violation;
}

ExitCode cmd_scan(const RunConfig& cfg, TableDoc& doc) {
  ScanOptions opt;
  opt.dims = cfg.dims;
  opt.direction = cfg.direction;
  opt.cylinder = cfg.cylinder;
  opt.alpha = cfg.alpha;
  opt.pad = cfg.pad;
  const auto points =
      fluctuation_scan(cfg.dist, cfg.n_list, cfg.replicates, opt, cfg.seed, cfg.workers);
  doc.columns = {"n",   "samples", "mean", "var", "iqr", "q20", "q80",
                 "iqr_over_rootlog", "iqr_over_power", "boundary_frac"};
  for (const auto& p : points) {
    const ScanRow& r = p.row;
    doc.rows.push_back({static_cast<double>(r.n), static_cast<double>(r.samples), r.mean_t,
                        r.var_t, r.iqr, r.q20, r.q80, r.norm_root_log, r.norm_power,
                        r.boundary_frac});
  }
  return ExitCode::Ok;
}

ExitCode cmd_coupling_check(const RunConfig& cfg, TableDoc& doc) {
  const StudyModel model = make_model(cfg);
  const LawComparison cmp =
      coupled_vs_direct_ks(model, cfg.replicates, cfg.seed, cfg.workers);
  put(doc, "samples", std::to_string(cmp.samples));
  putd(doc, "ks", cmp.ks);
  putd(doc, "critical", cmp.critical);
  putd(doc, "level", cmp.level);
  put(doc, "pass", cmp.pass ? "true" : "false");
  return cmp.pass ? ExitCode::Ok : ExitCode::Violation;
}

ExitCode cmd_median_find(const RunConfig& cfg, TableDoc& doc) {
  const StudyModel model = make_model(cfg);
  const TruncationSearch s =
      find_truncation(model, cfg.outer, cfg.replicates, cfg.tol, cfg.seed, cfg.workers);
  putd(doc, "a_low", s.window.a_low);
  putd(doc, "width", s.window.width);
  putd(doc, "mid", s.window.mid());
  putd(doc, "inner_lo", s.window.inner_lo());
  putd(doc, "inner_hi", s.window.inner_hi());
  putd(doc, "median_estimate", s.median_estimate);
  putd(doc, "achieved_gap", s.achieved_gap);
  putd(doc, "tol_abs", s.tol_abs);
  put(doc, "iterations", std::to_string(s.iterations));
  put(doc, "converged", s.converged ? "true" : "false");
  return s.converged ? ExitCode::Ok : ExitCode::Undecided;
}

ExitCode cmd_goodset(const RunConfig& cfg, TableDoc& doc) {
  const StudyModel model = make_model(cfg);
  const TruncationWindow window = resolve_window(model, cfg, doc);
  const std::vector<int64_t> counts = model.counts_for(cfg.seed, 0);
  const GoodSetReport rep =
      good_set_probe(model, counts, window, cfg.xi, cfg.replicates, cfg.seed, 2, cfg.workers);
  {
    std::string cs;
    for (size_t i = 0; i < counts.size(); ++i) cs += (i ? "," : "") + std::to_string(counts[i]);
    put(doc, "counts", cs);
  }
  putd(doc, "xi", rep.xi);
  putd(doc, "inner_freq", rep.inner_freq);
  put(doc, "good", rep.good ? "true" : "false");
  put(doc, "replicates", std::to_string(rep.replicates));
  doc.columns = {"level", "shells_hit_freq"};
  for (size_t i = 0; i < rep.levels.size(); ++i)
    doc.rows.push_back({static_cast<double>(rep.levels[i]), rep.level_freq[i]});
  return ExitCode::Ok;
}

ExitCode cmd_flip(const RunConfig& cfg, TableDoc& doc) {
  const StudyModel model = make_model(cfg);
  const TruncationWindow window = resolve_window(model, cfg, doc);
  const std::vector<int64_t> counts = model.counts_for(cfg.seed, 0);
  const auto [j_lo, j_hi] = model.scan_range();
  int level = cfg.flip_level;
  if (level == 0) level = (j_lo + j_hi) / 2;
  if (level < 1 || level > model.shells().levels())
    throw ConfigFailure("fliplevel outside the shell ladder");

  int64_t to = cfg.flip_to;
  if (to < 0) {
    const auto m = static_cast<double>(model.shells().shell_size(level));
    const double mu = m * model.p_hi();
    const double sigma = std::sqrt(m * model.p_hi() * (1.0 - model.p_hi()));
    to = std::llround(std::floor(mu - 2.0 * sigma));
    to = std::clamp<int64_t>(to, 0, model.shells().shell_size(level));
  }
  const FlipReport rep = flip_probe(model, counts, level, to, window, cfg.replicates, cfg.seed, 3,
                                    cfg.workers);
  put(doc, "level", std::to_string(rep.level));
  put(doc, "count_from", std::to_string(rep.count_from));
  put(doc, "count_to", std::to_string(rep.count_to));
  put(doc, "replicates", std::to_string(rep.replicates));
  putd(doc, "mean_delta", rep.mean_delta);
  putd(doc, "se_delta", rep.se_delta);
  put(doc, "negatives", std::to_string(rep.negatives));
  putd(doc, "hit_freq", rep.hit_freq);
  putd(doc, "hit_mean", rep.hit_mean);
  putd(doc, "hit_second", rep.hit_second);
  return rep.negatives == 0 ? ExitCode::Ok : ExitCode::Violation;
}

ExitCode cmd_antichain(const RunConfig& cfg, TableDoc& doc) {
  const StudyModel model = make_model(cfg);
  const TruncationWindow window = resolve_window(model, cfg, doc);
  const double eps = resolve_epsilon(model, cfg);
  const double r_lo = cfg.r_lo ? *cfg.r_lo : window.mid() - 0.5 * eps;
  AntichainOptions opts;
  opts.min_eligible = cfg.min_eligible;
  opts.max_eligible = cfg.max_eligible;
  opts.max_attempts = cfg.attempts;
  const AntichainReport rep = antichain_extract(model, window, r_lo, eps, cfg.xi, cfg.replicates,
                                                cfg.seed, cfg.workers, opts);
  put(doc, "verdict", verdict_name(rep.verdict));
  put(doc, "attempt", std::to_string(rep.attempt_used));
  {
    std::string es;
    for (size_t i = 0; i < rep.eligible.size(); ++i)
      es += (i ? "," : "") + std::to_string(rep.eligible[i]);
    put(doc, "eligible_levels", es);
  }
  putd(doc, "band_lo", rep.band_lo);
  putd(doc, "band_hi", rep.band_hi);
  putd(doc, "epsilon", rep.epsilon);
  put(doc, "family_size", std::to_string(rep.selected.size()));
  put(doc, "antichain", rep.antichain_ok ? "true" : "false");
  putd(doc, "density", rep.density);
  putd(doc, "density_bound", rep.density_bound);
  put(doc, "max_antichain", std::to_string(rep.max_antichain));
  put(doc, "note", rep.note);
  for (size_t g = 0; g < rep.gaps.size(); ++g) {
    const GapRow& gr = rep.gaps[g];
    put(doc, "gap" + std::to_string(g),
        "upper=" + std::to_string(gr.upper) + " lower=" + std::to_string(gr.lower) +
            " position=" + std::to_string(gr.position) + " gap=" + fd(gr.gap) +
            " se=" + fd(gr.se));
  }
  doc.columns = {"assignment", "estimate", "se", "good", "in_band", "selected"};
  for (const AssignmentRow& row : rep.rows) {
    const bool sel = std::binary_search(rep.selected.begin(), rep.selected.end(), row.bits);
    doc.rows.push_back({static_cast<double>(row.bits), row.estimate, row.se,
                        row.good ? 1.0 : 0.0, row.in_band ? 1.0 : 0.0, sel ? 1.0 : 0.0});
  }
  switch (rep.verdict) {
    case Verdict::Pass: return ExitCode::Ok;
    case Verdict::Fail: return ExitCode::Violation;
    default: return ExitCode::Undecided;
  }
}

ExitCode cmd_smallball(const RunConfig& cfg, TableDoc& doc) {
  const StudyModel model = make_model(cfg);
  const TruncationWindow window = resolve_window(model, cfg, doc);
  const double eps = resolve_epsilon(model, cfg);
  const SmallBallReport rep = small_ball_scan(model, window, eps, cfg.xi, cfg.outer,
                                              cfg.replicates, cfg.seed, cfg.workers);
  putd(doc, "epsilon", rep.epsilon);
  putd(doc, "xi", rep.xi);
  put(doc, "outer", std::to_string(rep.outer));
  put(doc, "inner", std::to_string(rep.inner));
  putd(doc, "sup_freq", rep.sup_freq);
  doc.columns = {"r", "freq"};
  for (const SmallBallRow& row : rep.rows) doc.rows.push_back({row.r, row.freq});
  return ExitCode::Ok;
}

ExitCode cmd_reckon(const RunConfig& cfg, TableDoc& doc) {
  const StudyModel model = make_model(cfg);
  const TruncationWindow window = resolve_window(model, cfg, doc);
  const ReckoningReport rep =
      reckoning_check(model, window, cfg.c_grid, cfg.replicates, cfg.seed, cfg.workers);
  put(doc, "samples", std::to_string(rep.samples));
  putd(doc, "mid", rep.mid);
  putd(doc, "width", rep.width);
  putd(doc, "certified_c", rep.certified_c);
  doc.columns = {"c", "freq_low", "freq_high", "certified"};
  for (const ReckoningRow& row : rep.rows)
    doc.rows.push_back({row.c, row.freq_low, row.freq_high, row.certified ? 1.0 : 0.0});
  return ExitCode::Ok;
}

ExitCode cmd_time_constant(const RunConfig& cfg, TableDoc& doc) {
  std::optional<ModeThreshold> cut;
  if (cfg.augmented) {
    try {
      cut = cfg.d0 ? ModeThreshold{*cfg.d0} : choose_threshold(cfg.dist, cfg.q);
    } catch (const std::invalid_argument& e) {
      throw ConfigFailure(e.what());
    }
  }
  const auto rows = estimate_time_constant(cfg.dist, cfg.direction, cfg.n_list, cfg.replicates,
                                           cfg.pad, cfg.seed, cfg.workers, cut);
  if (cut) {
    doc.columns = {"n", "mean", "se", "mean_raised", "se_raised"};
    for (const TimeConstantRow& r : rows)
      doc.rows.push_back({static_cast<double>(r.n), r.mean, r.se, *r.mean_aug, *r.se_aug});
  } else {
    doc.columns = {"n", "mean", "se"};
    for (const TimeConstantRow& r : rows)
      doc.rows.push_back({static_cast<double>(r.n), r.mean, r.se});
  }
  return ExitCode::Ok;
}

}  // namespace

ExitCode run_command(const RunConfig& cfg, TableDoc* doc_out) {
  TableDoc doc;
  doc.command = cfg.command;
  doc.meta = cfg.echo;

  ExitCode code;
  if (cfg.command == "validate")
    code = cmd_validate(cfg, doc);
  else if (cfg.command == "scan" || cfg.command == "cylinder-scan")
    code = cmd_scan(cfg, doc);
  else if (cfg.command == "coupling-check")
    code = cmd_coupling_check(cfg, doc);
  else if (cfg.command == "median-find")
    code = cmd_median_find(cfg, doc);
  else if (cfg.command == "goodset")
    code = cmd_goodset(cfg, doc);
  else if (cfg.command == "flip")
    code = cmd_flip(cfg, doc);
  else if (cfg.command == "antichain")
    code = cmd_antichain(cfg, doc);
  else if (cfg.command == "smallball")
    code = cmd_smallball(cfg, doc);
  else if (cfg.command == "reckon")
    code = cmd_reckon(cfg, doc);
  else if (cfg.command == "time-constant")
    code = cmd_time_constant(cfg, doc);
  else
    throw ConfigFailure("unknown command: " + cfg.command);

  put(doc, "exit", std::to_string(static_cast<int>(code)));
  write_output(cfg.output, cfg.format == "json" ? render_json(doc) : render_csv(doc));
  if (doc_out) *doc_out = std::move(doc);
  return code;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Deterministic passage-time fluctuation laboratory"};
  app.name("fpplab");

  std::string command;
  app.add_option("command", command, "one of: validate scan cylinder-scan coupling-check "
                                     "median-find goodset flip antichain smallball reckon "
                                     "time-constant")
      ->required();
  std::string config_path;
  app.add_option("--config", config_path, "key = value file merged below the flags");

  static const std::map<std::string, std::string> help = {
      {"dist", "law: exponential uniform twopoint table shiftedexp atomexp"},
      {"x", "target vertex, e.g. 64,0"},
      {"nlist", "scan distances, e.g. 8,16,32"},
      {"mode", "plane or cylinder"},
      {"seed", "master seed (FPPLAB_SEED overrides)"},
      {"workers", "worker threads; results do not depend on it"},
      {"format", "csv or json"},
      {"output", "output path (default stdout)"},
  };
  KeyValues flags;
  for (const std::string& key : known_keys()) {
    const auto it = help.find(key);
    app.add_option_function<std::string>(
        "--" + key, [&flags, key](const std::string& v) { flags.kv[key] = v; },
        it == help.end() ? "run input (see README)" : it->second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::BadConfig);
  }

  try {
    KeyValues file_kv;
    if (!config_path.empty()) file_kv = parse_config_file(config_path);
    std::vector<std::string> errors;
    const RunConfig cfg = resolve_config(command, file_kv, flags, errors);
    if (!errors.empty()) {
      for (const std::string& e : errors) std::cerr << "config error: " << e << "\n";
      return static_cast<int>(ExitCode::BadConfig);
    }
    return static_cast<int>(run_command(cfg));
  } catch (const ConfigFailure& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::BadConfig);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Failure);
  }
}

}  // namespace fpplab
