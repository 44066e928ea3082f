#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rh/commands.hpp"

using namespace rh;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = std::string(RH_SOURCE_DIR) + "/configs/";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "rhcli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempFile {
 public:
  explicit TempFile(const std::string& name, const std::string& text = "")
      : path_((fs::temp_directory_path() / ("rh_test_" + std::to_string(::getpid()) + "_" + name)).string()) {
    if (!text.empty()) std::ofstream(path_) << text;
  }
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }
  std::string read() const {
    std::ifstream in(path_);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

 private:
  std::string path_;
};

std::string problem(double omega, const std::string& extra = "") {
  return "[problem]\nT = 1\nomega = " + std::to_string(omega) + "\nh = \"1 - " + std::to_string(omega) +
         "*v\"\n" + extra;
}

std::vector<std::vector<double>> csv_rows(const std::string& text, std::string* header) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config(
      "# comment\n[problem]\nT = 2\nomega = 0.25 ; trailing\nh = \"u + v\"\n\n[strip]\na = 0.3\n"
      "[certify]\ncone = strictly-positive\nradii = \"1:index1, 4:I0\"\n[solver]\nnodes = 51\nrule = trapezoid\n");
  CHECK(cfg.T == 2.0);
  CHECK(cfg.omega == 0.25);
  CHECK(cfg.g == "1");
  CHECK(*cfg.a == 0.3);
  CHECK(cfg.cone == ConeVariant::StrictlyPositive);
  REQUIRE(cfg.radii.size() == 2);
  CHECK(cfg.radii[1].rho == 4.0);
  CHECK(cfg.radii[1].kind == ConditionKind::Index0);
  CHECK(cfg.solver.nodes == 51);
  CHECK(cfg.solver.rule == NystromRule::Trapezoid);
  CHECK(cfg.line_of("strip.a") == 8);
}

TEST_CASE("config errors carry line numbers") {
  const std::vector<std::pair<std::string, int>> cases{
      {"[problem]\nT = 1\nomega = 1\nbogus = 3\n", 4},
      {"[problem]\nT = 1\nomega = 1\n[nowhere]\n", 4},
      {"[problem]\nT = 1\nT = 2\nomega = 1\n", 3},
      {"[problem]\nT = 1\nomega = x\n", 3},
      {"[problem]\nT = 1\nomega = 1\nh = 1+u\n", 4},
      {"[problem]\nT = 1\nomega = 1\nh = \"1+*u\"\n", 4},
      {"[problem]\nT = 1\nomega = 0\n", 3},
      {"[problem]\nT = 1\nomega = 1\n[strip]\na = 0.7\n", 5},
      {"[problem]\nT = 1\nomega = 1\n[solver]\nnodes = 40\n", 5},
      {"[problem]\nT = 1\nomega = 1\n[certify]\nradii = \"1:index2\"\n", 5},
      {"T = 1\n", 1},
  };
  for (const auto& [text, line] : cases) {
    CAPTURE(text);
    try {
      parse_config(text);
      FAIL("expected a config error");
    } catch (const ConfigError& e) {
      CHECK(e.line() == line);
    }
  }
  CHECK_THROWS_AS(parse_config("[problem]\nT = 1\n"), ConfigError);
}

TEST_CASE("radii parsing") {
  const auto r = parse_radii("1:index1, 2:index0,0.5:I1");
  REQUIRE(r.size() == 3);
  CHECK(r[0].kind == ConditionKind::Index1);
  CHECK(r[2].rho == 0.5);
  CHECK_THROWS(parse_radii("1"));
  CHECK_THROWS(parse_radii("-1:index1"));
}

TEST_CASE("kernel command") {
  TempFile small("small.ini", problem(0.5));
  TempFile big("big.ini", problem(1.5));
  TempFile csv("k.csv");
  REQUIRE(cli({"kernel", "--config", small.path(), "--grid", "101", "--out", csv.path()}).code == 0);
  std::string header;
  auto rows = csv_rows(csv.read(), &header);
  CHECK(header == "t,s,k");
  CHECK(rows.size() == 101u * 101u);
  bool all_positive = true;
  for (const auto& r : rows) all_positive = all_positive && r[2] > 0;
  CHECK(all_positive);

  REQUIRE(cli({"kernel", "--config", big.path(), "--grid", "101", "--out", csv.path()}).code == 0);
  rows = csv_rows(csv.read(), &header);
  bool pos = false, neg = false;
  for (const auto& r : rows) {
    pos = pos || r[2] > 0;
    neg = neg || r[2] < 0;
  }
  CHECK(pos);
  CHECK(neg);

  const auto one = cli({"kernel", "--config", big.path(), "--grid", "1"});
  CHECK(one.code == 0);
  rows = csv_rows(one.out, &header);
  CHECK(header == "t,s,k");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0][0] == 0.0);
  CHECK(rows[0][1] == 0.0);

  CHECK(cli({"kernel", "--config", big.path(), "--out", "/nonexistent-dir/k.csv"}).code == kExitUsage);
}

TEST_CASE("bounds command") {
  auto r = cli({"bounds", "--config", kConfigs + "example.ini", "--no-timestamp"});
  REQUIRE(r.code == 0);
  auto j = Json::parse(r.out);
  CHECK(std::abs(j["c"].get<double>() - 0.000353538) < 1e-8);
  CHECK(j.contains("beta"));
  CHECK(j.contains("config_hash"));
  CHECK(j["threshold_source"] == "closed-form");
  CHECK(j["envelope_table"].size() == 41);
  CHECK_FALSE(j["discrepancies"].empty());

  r = cli({"bounds", "--config", kConfigs + "small_zeta.ini", "--no-timestamp"});
  REQUIRE(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["m"].get<double>() == 0.5);
  CHECK_FALSE(j.contains("beta"));

  TempFile bad("badstrip.ini", problem(1.5, "[strip]\na = 0.4\n"));
  r = cli({"bounds", "--config", bad.path()});
  CHECK(r.code == kExitConfig);
  const auto e = Json::parse(r.err);
  CHECK(e["error"]["kind"] == "config");
  CHECK(e["error"]["line"] == 6);
  CHECK(e["error"]["message"].get<std::string>().find("a") != std::string::npos);
}

TEST_CASE("certify command") {
  auto r = cli({"certify", "--config", kConfigs + "example.ini", "--no-timestamp"});
  REQUIRE(r.code == 0);
  auto j = Json::parse(r.out);
  CHECK(j["ladder"] == "S2");
  CHECK(j["solution_count"] == 1);
  CHECK(j["thresholds"]["source"] == "manual");
  CHECK(j["conditions"][0]["f_bound"].get<double>() == 11.325);
  CHECK(j.contains("config_hash"));

  r = cli({"certify", "--config", kConfigs + "example.ini", "--threshold-source", "oracle", "--no-timestamp"});
  CHECK(r.code == kExitEmptyCertificate);
  j = Json::parse(r.out);
  CHECK(j["solution_count"] == 0);
  CHECK(j["thresholds"]["source"] == "oracle");
  bool m_mismatch = false;
  for (const auto& d : j["discrepancies"]) m_mismatch = m_mismatch || (d["quantity"] == "m" && d["note"] == "does not match");
  CHECK(m_mismatch);

  r = cli({"certify", "--config", kConfigs + "small_zeta.ini", "--no-timestamp"});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["ladder"] == "S1");

  TempFile neg("negweight.ini", problem(0.5, "g = \"s\"\n[strip]\na = 0.25\n[certify]\nradii = \"1:index1\"\n"));
  r = cli({"certify", "--config", neg.path()});
  CHECK(r.code == kExitHypothesis);
  CHECK(Json::parse(r.err)["error"]["kind"] == "hypothesis");
}

TEST_CASE("runs are deterministic") {
  const auto a = cli({"certify", "--config", kConfigs + "example.ini", "--no-timestamp"});
  const auto b = cli({"certify", "--config", kConfigs + "example.ini", "--no-timestamp"});
  CHECK(a.out == b.out);
  const auto c = cli({"certify", "--config", kConfigs + "example.ini"});
  CHECK(c.out.find("generated_at") != std::string::npos);
  CHECK(a.out.find("generated_at") == std::string::npos);
}

TEST_CASE("solve command") {
  TempFile cfg("one.ini", problem(1.5, "[strip]\na = 0.48\n[solver]\nnodes = 401\n"));
  TempFile csv("u.csv");
  const auto r = cli({"solve", "--config", cfg.path(), "--out", csv.path(), "--no-timestamp"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(j["status"] == "converged");
  CHECK(j["verification_passed"] == true);
  std::string header;
  const auto rows = csv_rows(csv.read(), &header);
  CHECK(header == "t,u");
  REQUIRE(rows.size() == 401);
  double err = 0;
  for (const auto& row : rows) err = std::max(err, std::abs(row[1] - 1 / 1.5));
  CHECK(err < 1e-6);

  const auto ex = cli({"solve", "--config", kConfigs + "example.ini", "--nodes", "101", "--no-timestamp"});
  CHECK(ex.code == kExitNoConvergence);
  CHECK(Json::parse(ex.out)["status"] != "converged");
}

TEST_CASE("usage errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"bounds"}).code == kExitUsage);
  CHECK(cli({"frobnicate", "--config", "x"}).code == kExitUsage);
  CHECK(cli({"bounds", "--config", "/nonexistent.ini"}).code == kExitConfig);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
