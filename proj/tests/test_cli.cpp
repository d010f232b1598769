#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "fpplab/cli.hpp"
#include "fpplab/config.hpp"
#include "fpplab/io.hpp"

namespace {

using namespace fpplab;

struct SeedEnvGuard {
  std::optional<std::string> saved;
  SeedEnvGuard() {
    if (const char* v = std::getenv("FPPLAB_SEED")) saved = v;
    ::unsetenv("FPPLAB_SEED");
  }
  ~SeedEnvGuard() {
    if (saved)
      ::setenv("FPPLAB_SEED", saved->c_str(), 1);
    else
      ::unsetenv("FPPLAB_SEED");
  }
};

// Output file that cleans up after itself (including the staging file).
struct TmpOut {
  std::string path;
  explicit TmpOut(std::string p) : path(std::move(p)) {}
  ~TmpOut() {
    std::remove(path.c_str());
    std::remove((path + ".tmp").c_str());
  }
};

RunConfig cfg_from(const std::string& command, const std::string& text,
                   const std::string& output) {
  std::vector<std::string> errors;
  const KeyValues file_kv = parse_config_text(text);
  RunConfig cfg = resolve_config(command, file_kv, KeyValues{}, errors);
  for (const std::string& e : errors) INFO("config error: ", e);
  REQUIRE(errors.empty());
  cfg.output = output;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is.good());
  return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

std::optional<std::string> result_value(const TableDoc& doc, const std::string& key) {
  for (const auto& [k, v] : doc.results)
    if (k == key) return v;
  return std::nullopt;
}

int call_cli(std::vector<std::string> args) {
  std::vector<char*> argv;
  argv.reserve(args.size());
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes have the documented numeric values") {
  CHECK(static_cast<int>(ExitCode::Ok) == 0);
  CHECK(static_cast<int>(ExitCode::Violation) == 1);
  CHECK(static_cast<int>(ExitCode::Undecided) == 2);
  CHECK(static_cast<int>(ExitCode::BadConfig) == 3);
  CHECK(static_cast<int>(ExitCode::Failure) == 4);
}

TEST_CASE("validate command reports the law and writes its document") {
  SeedEnvGuard guard;
  TmpOut out("cli_validate_test.csv");
  const RunConfig cfg = cfg_from("validate", "dist = exponential\n", out.path);
  TableDoc doc;
  const ExitCode code = run_command(cfg, &doc);
  CHECK(code == ExitCode::Ok);
  CHECK(doc.command == "validate");
  CHECK(doc.meta == cfg.echo);
  CHECK(result_value(doc, "pass") == std::string("true"));
  CHECK(result_value(doc, "exit") == std::string("0"));
  // The file on disk is exactly the rendering of the returned document.
  CHECK(slurp(out.path) == render_csv(doc));
}

TEST_CASE("validate command flags an unusable law") {
  SeedEnvGuard guard;
  TmpOut out("cli_validate_bad_test.csv");
  // Mass 0.6 at zero sits above the bond-percolation threshold.
  const RunConfig cfg =
      cfg_from("validate", "dist = twopoint\nv1 = 0\np1 = 0.6\nv2 = 1\n", out.path);
  TableDoc doc;
  const ExitCode code = run_command(cfg, &doc);
  CHECK(code == ExitCode::Violation);
  CHECK(result_value(doc, "pass") == std::string("false"));
  CHECK(result_value(doc, "failure0").has_value());
  CHECK(result_value(doc, "exit") == std::string("1"));
}

TEST_CASE("scan command emits one row per distance and repeats exactly") {
  SeedEnvGuard guard;
  const std::string text = "dist = exponential\nnlist = 2,4\nreplicates = 4\nseed = 5\n";
  TmpOut out_a("cli_scan_a_test.csv");
  TmpOut out_b("cli_scan_b_test.csv");

  TableDoc doc;
  CHECK(run_command(cfg_from("scan", text, out_a.path), &doc) == ExitCode::Ok);
  REQUIRE(doc.columns.size() == 10);
  CHECK(doc.columns.front() == "n");
  CHECK(doc.columns.back() == "boundary_frac");
  REQUIRE(doc.rows.size() == 2);
  CHECK(doc.rows[0][0] == 2.0);
  CHECK(doc.rows[1][0] == 4.0);
  CHECK(doc.rows[0][1] == 4.0);  // samples column echoes the replicate count

  CHECK(run_command(cfg_from("scan", text, out_b.path), nullptr) == ExitCode::Ok);
  CHECK(slurp(out_a.path) == slurp(out_b.path));
}

TEST_CASE("json output renders the same document") {
  SeedEnvGuard guard;
  TmpOut out("cli_scan_json_test.json");
  RunConfig cfg =
      cfg_from("scan", "dist = exponential\nnlist = 2\nreplicates = 4\nformat = json\n", out.path);
  TableDoc doc;
  CHECK(run_command(cfg, &doc) == ExitCode::Ok);
  CHECK(slurp(out.path) == render_json(doc));
}

TEST_CASE("worker count changes neither payload nor exit code") {
  SeedEnvGuard guard;
  const std::string base =
      "dist = exponential\nx = 8,0\nbase = 2\nreplicates = 6\nouter = 5\ntol = 0.1\nseed = 19\n";
  TmpOut out_one("cli_workers_one_test.csv");
  TmpOut out_many("cli_workers_many_test.csv");
  const ExitCode one =
      run_command(cfg_from("median-find", base + "workers = 1\n", out_one.path), nullptr);
  const ExitCode many =
      run_command(cfg_from("median-find", base + "workers = 3\n", out_many.path), nullptr);
  CHECK(one == many);
  CHECK(slurp(out_one.path) == slurp(out_many.path));
}

TEST_CASE("coupling check command accepts the layered sampler") {
  SeedEnvGuard guard;
  TmpOut out("cli_coupling_test.csv");
  const RunConfig cfg = cfg_from(
      "coupling-check", "dist = exponential\nx = 4,0\nbase = 2\nreplicates = 120\nseed = 9\n",
      out.path);
  TableDoc doc;
  const ExitCode code = run_command(cfg, &doc);
  CHECK(code == ExitCode::Ok);
  CHECK(result_value(doc, "pass") == std::string("true"));
  CHECK(result_value(doc, "samples") == std::string("120"));
}

TEST_CASE("goodset command reports one row per scanned level") {
  SeedEnvGuard guard;
  TmpOut out("cli_goodset_test.csv");
  const RunConfig cfg = cfg_from(
      "goodset",
      "dist = exponential\nx = 8,0\nbase = 2\nreplicates = 8\nalow = 1\nseed = 13\n", out.path);
  TableDoc doc;
  CHECK(run_command(cfg, &doc) == ExitCode::Ok);
  CHECK(result_value(doc, "window") == std::string("explicit"));
  CHECK(result_value(doc, "window_a_low") == std::string("1"));
  const auto good = result_value(doc, "good");
  REQUIRE(good.has_value());
  CHECK((*good == "true" || *good == "false"));
  REQUIRE(doc.columns == std::vector<std::string>{"level", "shells_hit_freq"});
  REQUIRE(doc.rows.size() == 2);  // scanned levels for distance 8 at base 2
  CHECK(doc.rows[0][0] == 1.0);
  CHECK(doc.rows[1][0] == 2.0);
  for (const auto& row : doc.rows) {
    CHECK(row[1] >= 0.0);
    CHECK(row[1] <= 1.0);
  }
}

TEST_CASE("flip command defaults its level and replacement count") {
  SeedEnvGuard guard;
  TmpOut out("cli_flip_test.csv");
  const RunConfig cfg = cfg_from(
      "flip", "dist = exponential\nx = 8,0\nbase = 2\nreplicates = 6\nalow = 1\nseed = 15\n",
      out.path);
  TableDoc doc;
  const ExitCode code = run_command(cfg, &doc);
  CHECK(code == ExitCode::Ok);  // lowering counts can never raise the time
  CHECK(result_value(doc, "level") == std::string("1"));  // middle of scan range [1,2]
  CHECK(result_value(doc, "negatives") == std::string("0"));
  const auto from = result_value(doc, "count_from");
  const auto to = result_value(doc, "count_to");
  REQUIRE(from.has_value());
  REQUIRE(to.has_value());
  CHECK(std::stoll(*from) >= std::stoll(*to));

  // A level beyond the ladder is a configuration fault.
  RunConfig bad = cfg_from(
      "flip",
      "dist = exponential\nx = 8,0\nbase = 2\nreplicates = 6\nalow = 1\nfliplevel = 9\n",
      out.path);
  CHECK_THROWS_AS(run_command(bad, nullptr), ConfigFailure);
}

TEST_CASE("antichain command verdict matches its exit code") {
  SeedEnvGuard guard;
  TmpOut out("cli_antichain_test.csv");
  // Concentrated two-atom law: every band gap is a few 1e-9, decisively
  // below the requested band width, so the family test must fail.
  const RunConfig cfg = cfg_from("antichain",
                                 "dist = table\n"
                                 "values = 1,1.000000001\n"
                                 "probs = 0.5,0.5\n"
                                 "d0 = 1\n"
                                 "x = 3,0\n"
                                 "base = 2\n"
                                 "replicates = 8\n"
                                 "xi = 0.9\n"
                                 "alow = 2.5\n"
                                 "epsilon = 0.001\n"
                                 "r = 2.9995\n"
                                 "seed = 2026\n",
                                 out.path);
  TableDoc doc;
  const ExitCode code = run_command(cfg, &doc);
  CHECK(code == ExitCode::Violation);
  CHECK(result_value(doc, "verdict") == std::string("fail"));
  CHECK(result_value(doc, "eligible_levels") == std::string("1"));
  REQUIRE(doc.columns.size() == 6);
  CHECK(doc.rows.size() == 2);  // one eligible level, two assignments
  const auto family = result_value(doc, "family_size");
  REQUIRE(family.has_value());
  CHECK(std::stoll(*family) >= 1);
}

TEST_CASE("antichain command refuses a degenerate derived band") {
  SeedEnvGuard guard;
  TmpOut out("cli_antichain_eps_test.csv");
  // The lo mode of this law is the single atom at 1, so the derived band
  // width collapses to zero and the run must ask for an explicit one.
  const RunConfig cfg = cfg_from(
      "antichain", "dist = twopoint\nv1 = 1\np1 = 0.5\nv2 = 10\nx = 8,0\nbase = 2\nalow = 1\n",
      out.path);
  CHECK_THROWS_AS(run_command(cfg, nullptr), ConfigFailure);
}

TEST_CASE("smallball command tabulates the scan grid") {
  SeedEnvGuard guard;
  TmpOut out("cli_smallball_test.csv");
  const RunConfig cfg = cfg_from("smallball",
                                 "dist = exponential\nx = 4,0\nbase = 2\nreplicates = 4\n"
                                 "outer = 4\nalow = 0\nepsilon = 2\nxi = 0.5\nseed = 23\n",
                                 out.path);
  TableDoc doc;
  CHECK(run_command(cfg, &doc) == ExitCode::Ok);
  CHECK(doc.columns == std::vector<std::string>{"r", "freq"});
  REQUIRE(!doc.rows.empty());
  CHECK(result_value(doc, "sup_freq").has_value());
  for (const auto& row : doc.rows) {
    CHECK(row[1] >= 0.0);
    CHECK(row[1] <= 1.0);
  }
}

TEST_CASE("reckon command tabulates the deviation grid") {
  SeedEnvGuard guard;
  TmpOut out("cli_reckon_test.csv");
  const RunConfig cfg = cfg_from(
      "reckon",
      "dist = exponential\nx = 4,0\nbase = 2\nreplicates = 6\nalow = 0\ncgrid = 0.1,0.2\n",
      out.path);
  TableDoc doc;
  CHECK(run_command(cfg, &doc) == ExitCode::Ok);
  CHECK(doc.columns == std::vector<std::string>{"c", "freq_low", "freq_high", "certified"});
  REQUIRE(doc.rows.size() == 2);
  CHECK(doc.rows[0][0] == doctest::Approx(0.1));
  CHECK(doc.rows[1][0] == doctest::Approx(0.2));
  CHECK(result_value(doc, "certified_c").has_value());
}

TEST_CASE("time constant command scales with the augmentation flag") {
  SeedEnvGuard guard;
  TmpOut out("cli_timeconst_test.csv");
  const std::string base = "dist = exponential\nnlist = 2,3\nreplicates = 4\nseed = 27\n";
  TableDoc plain;
  CHECK(run_command(cfg_from("time-constant", base, out.path), &plain) == ExitCode::Ok);
  CHECK(plain.columns == std::vector<std::string>{"n", "mean", "se"});
  REQUIRE(plain.rows.size() == 2);

  TableDoc aug;
  CHECK(run_command(cfg_from("time-constant", base + "augmented = true\n", out.path), &aug) ==
        ExitCode::Ok);
  CHECK(aug.columns ==
        std::vector<std::string>{"n", "mean", "se", "mean_raised", "se_raised"});
  REQUIRE(aug.rows.size() == 2);
  for (const auto& row : aug.rows) CHECK(row[3] >= row[1]);

  // Raising needs a usable lo/hi split, which a single atom cannot give.
  const RunConfig bad = cfg_from(
      "time-constant", "dist = table\nvalues = 2\nprobs = 1\naugmented = true\n", out.path);
  CHECK_THROWS_AS(run_command(bad, nullptr), ConfigFailure);
}

TEST_CASE("run_command rejects a command it does not know") {
  SeedEnvGuard guard;
  RunConfig cfg;
  cfg.command = "bogus";
  cfg.output = "cli_bogus_test.csv";
  CHECK_THROWS_AS(run_command(cfg, nullptr), ConfigFailure);
}

TEST_CASE("command line entry maps failures to exit codes") {
  SeedEnvGuard guard;
  TmpOut out("cli_main_test.csv");
  CHECK(call_cli({"fpplab", "validate", "--dist", "exponential", "--output", out.path}) == 0);
  // Missing law: resolution reports it and the run never starts.
  CHECK(call_cli({"fpplab", "validate", "--output", out.path}) == 3);
  // Unknown command name.
  CHECK(call_cli({"fpplab", "frobnicate", "--dist", "exponential", "--output", out.path}) == 3);
  // Unwritable output directory surfaces as a runtime failure.
  CHECK(call_cli({"fpplab", "validate", "--dist", "exponential", "--output",
                  "no_such_dir_xyz/out.csv"}) == 4);
  // No arguments at all is a parse error.
  CHECK(call_cli({"fpplab"}) == 3);
}

}  // TEST_SUITE
