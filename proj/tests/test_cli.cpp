#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "cvdistill/cli.hpp"
#include "cvdistill/config.hpp"
#include "cvdistill/tomography.hpp"

using namespace cvdistill;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cvdistill");
  std::ostringstream out, err;
  const int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("cvdistill_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const json& j) {
  const auto p = scratch() / name;
  std::ofstream(p) << j.dump();
  return p;
}

json canonical_json() { return json::parse(canonical_config_text(), nullptr, true, true); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cols.push_back(c);
    rows.push_back(cols);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("embedded canonical config matches the shipped file") {
  CHECK(canonical_config_text() == slurp(CVDISTILL_CANONICAL_JSON_PATH));
  const auto c = parse_config(canonical_config_text());
  CHECK(c.var_sq_db == -3.1);
  CHECK(c.var_anti_db == 27.0);
  CHECK(c.gamma == 0.5);
  CHECK(c.tap_R == 0.1104);
  CHECK(c.displacement_x == 1.8875);
  CHECK(c.displacement_p == 60.0);
  CHECK(c.detector_eta == 1.0);
}

TEST_CASE("config validation names the field") {
  auto j = canonical_json();
  j["gamma"] = 1.5;
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("gamma"), ConfigError);
  j = canonical_json();
  j["colour"] = 1;
  try {
    config_from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "colour");
  }
  j = canonical_json();
  j.erase("tap_R");
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("tap_R"), ConfigError);
  j = canonical_json();
  j["keep_side"] = "sideways";
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("keep_side"), ConfigError);
  j = canonical_json();
  j["var_anti_db"] = 1.0;
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("var_anti_db"), ConfigError);
  j = canonical_json();
  j["displacement"] = {{"magnitude", 2.0}, {"angle_deg", 90.0}};
  const auto polar = config_from_json(j);
  CHECK(polar.displacement_x == 0.0);
  CHECK(polar.displacement_p == 2.0);
  j["displacement"] = {{"x", 1.0}, {"angle_deg", 90.0}};
  CHECK_THROWS_AS(config_from_json(j), ConfigError);
  CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);

  const auto round = config_from_json(config_to_json(parse_config(canonical_config_text())));
  CHECK(config_to_json(round) == config_to_json(parse_config(canonical_config_text())));
}

TEST_CASE("exit codes") {
  CHECK(run({}).status == kExitInvalid);
  CHECK(run({"frobnicate"}).status == kExitInvalid);
  const auto help = run({"--help"});
  CHECK(help.status == kExitOk);
  CHECK(help.out.find("analyze") != std::string::npos);
  CHECK(run({"analyze", (scratch() / "missing.json").string()}).status == kExitIo);
  auto j = canonical_json();
  j["tap_R"] = 2.0;
  const auto bad = run({"analyze", write_config("bad.json", j).string()});
  CHECK(bad.status == kExitInvalid);
  CHECK(bad.err.find("tap_R") != std::string::npos);
  const auto cfg = write_config("ok.json", canonical_json()).string();
  CHECK(run({"analyze", cfg, "--bogus"}).status == kExitInvalid);
  CHECK(run({"sweep-threshold", cfg, "--out", "/proc/forbidden/out.csv"}).status == kExitIo);
}

TEST_CASE("analyze without selection") {
  auto j = canonical_json();
  j["threshold"] = -1e6;
  const auto r = run({"analyze", write_config("nosel.json", j).string()});
  REQUIRE(r.status == kExitOk);
  const auto out = json::parse(r.out);
  CHECK(out["result"]["distilled_variance_snu"].get<double>() == doctest::Approx(1.3384).epsilon(1e-4));
  CHECK(out["result"]["distilled_variance_db"].get<double>() == doctest::Approx(1.27).epsilon(0.005));
  CHECK(out["result"]["success_probability"].get<double>() == 1.0);
  CHECK(out["method"] == "mixture-filter");
}

TEST_CASE("analyze falls back to the correlated path") {
  auto j = canonical_json();
  j["tap_angle_deg"] = 60.0;
  const auto r = run({"analyze", write_config("tilted.json", j).string()});
  REQUIRE(r.status == kExitOk);
  CHECK(json::parse(r.out)["method"] == "truncated-bivariate");
}

TEST_CASE("simulate is deterministic") {
  auto j = canonical_json();
  j["samples"] = 100000;
  const auto cfg = write_config("sim.json", j).string();
  const auto a = run({"simulate", cfg, "--resamples", "50"});
  const auto b = run({"simulate", cfg, "--resamples", "50"});
  REQUIRE(a.status == kExitOk);
  CHECK(a.out == b.out);
  const auto out = json::parse(a.out);
  CHECK(out["result"]["standard_error_snu"].get<double>() > 0.0);
  CHECK(out["result"].contains("standard_error_db"));
  CHECK(out["samples"] == 100000);
}

TEST_CASE("simulate record feeds ingest") {
  auto j = canonical_json();
  j["samples"] = 20000;
  const auto cfg = write_config("rec.json", j).string();
  const auto rec = (scratch() / "rec.csv").string();
  const auto sim = run({"simulate", cfg, "--stderr", "moment", "--record", rec});
  REQUIRE(sim.status == kExitOk);
  const auto res = (scratch() / "ingest.json").string();
  const auto ing = run({"ingest", rec, "--threshold", "25", "--stderr", "moment", "--out", res});
  REQUIRE(ing.status == kExitOk);
  const auto a = json::parse(sim.out)["result"];
  const auto b = json::parse(slurp(res))["result"];
  CHECK(a == b);
  CHECK(run({"ingest", (scratch() / "nope.csv").string(), "--threshold", "1"}).status == kExitIo);
  std::ofstream(scratch() / "broken.csv") << "# format: cvdistill-record v1\nbogus\n";
  const auto broken = run({"ingest", (scratch() / "broken.csv").string(), "--threshold", "1"});
  CHECK(broken.status == kExitInvalid);
  CHECK(broken.err.find("line 2") != std::string::npos);
}

TEST_CASE("threshold sweep output") {
  const auto cfg = write_config("sweep.json", canonical_json()).string();
  const auto out = scratch() / "sweep.csv";
  REQUIRE(run({"sweep-threshold", cfg, "--min", "-10", "--max", "40", "--steps", "11", "--out", out.string()}).status ==
          kExitOk);
  const auto first = slurp(out);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 12);
  const auto var = column(rows[0], "variance_snu");
  CHECK(column(rows[0], "variance_db") == var + 1);
  for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][var]) <= std::stod(rows[i - 1][var]));
  REQUIRE(run({"sweep-threshold", cfg, "--min", "-10", "--max", "40", "--steps", "11", "--out", out.string()}).status ==
          kExitOk);
  CHECK(slurp(out) == first);
}

TEST_CASE("angle sweep output") {
  const auto cfg = write_config("angle.json", canonical_json()).string();
  const auto out = scratch() / "angle.csv";
  REQUIRE(run({"sweep-angle", cfg, "--threshold", "1.3", "--relative", "--steps", "7", "--out", out.string()}).status ==
          kExitOk);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0][0] == "tap_angle_deg");
  CHECK(rows[7][0] == "180");
}

TEST_CASE("tomography command") {
  auto j = canonical_json();
  j["var_anti_db"] = 10.0;
  j["displacement"] = {{"x", 1.8875}, {"p", 8.475}};
  const auto cfg = write_config("tomo.json", j).string();
  const auto out = scratch() / "w.csv";
  REQUIRE(run({"tomo", cfg, "--analytic", "--grid-points", "31", "--out", out.string()}).status == kExitOk);
  std::ifstream in(out);
  const auto g = read_wigner_csv(in);
  CHECK(g.nx() == 31);
  const auto r = run({"tomo", cfg, "--angles", "32", "--per-angle", "20000", "--grid-points", "41", "--out", out.string()});
  REQUIRE(r.status == kExitOk);
  CHECK(json::parse(r.out)["distance_to_analytic"]["peak_ratio"].get<double>() < 0.5);
}

TEST_CASE("reproduce figure data") {
  const auto dir = scratch() / "figs";
  SUBCASE("fig 3 trends") {
    REQUIRE(run({"reproduce", "--fig", "3", "--out", dir.string(), "--samples", "200000"}).status == kExitOk);
    const auto rows = read_csv(dir / "fig3.csv");
    const auto scale = column(rows[0], "displacement_scale");
    const auto var = column(rows[0], "variance_snu");
    const auto prob = column(rows[0], "success_probability");
    const auto mc = column(rows[0], "mc_success_fraction");
    std::size_t checked = 0;
    for (std::size_t i = 2; i < rows.size(); ++i) {
      if (rows[i][scale] != rows[i - 1][scale]) continue;
      CHECK(std::stod(rows[i][var]) <= std::stod(rows[i - 1][var]));
      CHECK(std::stod(rows[i][prob]) < std::stod(rows[i - 1][prob]));
      CHECK(std::stod(rows[i][mc]) <= std::stod(rows[i - 1][mc]));
      ++checked;
    }
    CHECK(checked == 60);
    CHECK(fs::exists(dir / "fig3_summary.json"));
  }
  SUBCASE("fig 2 and 4") {
    REQUIRE(run({"reproduce", "--fig", "2", "--out", dir.string(), "--samples", "100000"}).status == kExitOk);
    CHECK(read_csv(dir / "fig2_tap.csv").size() == 201);
    CHECK(read_csv(dir / "fig2_signal.csv").size() == 201);
    REQUIRE(run({"reproduce", "--fig", "4", "--out", dir.string()}).status == kExitOk);
    CHECK(read_csv(dir / "fig4.csv").size() == 1 + 2 * 91);
  }
  SUBCASE("fig 5") {
    const auto r = run({"reproduce", "--fig", "5", "--out", dir.string(), "--angles", "16", "--per-angle", "20000"});
    REQUIRE(r.status == kExitOk);
    CHECK(fs::exists(dir / "fig5_distilled_reconstructed.csv"));
  }
  CHECK(run({"reproduce", "--fig", "6", "--out", dir.string()}).status == kExitInvalid);
}
