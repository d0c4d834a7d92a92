#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "superopt/io.hpp"
#include "support.hpp"

using namespace superopt;
using namespace test_support;
namespace fs = std::filesystem;

namespace {

const char* kDiag = R"({"m": 2, "n": 2, "coeffs": [{"k": -1, "re": [[1, 0], [0, 0.5]], "im": [[0, 0], [0, 0]]}]})";

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / ("superopt_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SUPEROPT_CLI) + " " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("parse_problem examples") {
  const ProblemSpec a = parse_problem(R"({"m": 1, "n": 1, "coeffs": [{"k": -1, "re": [[1]], "im": [[0]]}]})");
  CHECK(a.m == 1);
  CHECK(a.n == 1);
  REQUIRE(a.coeffs.size() == 1);
  CHECK(a.coeffs[0].first == -1);
  CHECK(coeff_diff(a.symbol(), scalar({{-1, 1.0}})) == 0.0);

  try {
    parse_problem(R"({"m": 2, "n": 2, "coeffs": [{"k": 0, "re": [[1, 0]]}]})");
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
    CHECK(std::string(e.what()).find("coeffs[0].re") != std::string::npos);
  }
  try {
    parse_problem(R"({"m": 1, "n": 1, "coeffs": [{"k": 1, "re": [[1]]}, {"k": 1, "re": [[2]]}]})");
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Schema);
    CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
  }
  try {
    parse_problem("{\"m\": 1,\n \"n\": 1 \"coeffs\": []}");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_problem(R"({"m": 0, "n": 1, "coeffs": []})"), Error);
  CHECK_THROWS_AS(parse_problem(R"({"m": 1, "n": 1, "coeffs": [], "options": {"grid": 100}})"), Error);
  CHECK_THROWS_AS(parse_problem(R"({"m": 1, "n": 1, "coeffs": [], "options": {"colour": 1}})"), Error);
}

TEST_CASE("problem file round trip") {
  ProblemSpec s;
  s.m = 2;
  s.n = 3;
  std::mt19937_64 rng(71);
  const MatFun f = random_matfun(rng, 2, 3, -2, 1);
  for (const auto& [k, c] : f.coeffs()) s.coeffs.emplace_back(k, c);
  s.options.seed = 9;
  s.options.grid = 2048;
  s.options.multiplicity_tol = 3e-9;
  s.expect = Json::parse(R"({"superoptimal_values": [1.5, 0.25], "tol": 1e-6})");
  const std::string text = dump_json(problem_to_json(s));
  const ProblemSpec t = parse_problem(text);
  CHECK(t.m == s.m);
  CHECK(t.n == s.n);
  REQUIRE(t.coeffs.size() == s.coeffs.size());
  for (size_t i = 0; i < s.coeffs.size(); ++i) {
    CHECK(t.coeffs[i].first == s.coeffs[i].first);
    CHECK(t.coeffs[i].second == s.coeffs[i].second);  // bit-exact
  }
  CHECK(t.options.seed == 9);
  CHECK(t.options.grid == 2048);
  CHECK(t.options.multiplicity_tol == 3e-9);
  CHECK(t.expect == s.expect);
  CHECK(dump_json(problem_to_json(t)) == text);
}

TEST_CASE("report round trip is bit-exact") {
  VerificationReport r;
  r.add(make_record("a", 1.0 / 3.0, 1e-7));
  r.add(make_record("b", 0.1 + 0.2, 1e-9, "details \"quoted\""));
  CheckRecord na = make_record("c", 0.0, 1e-9, "premise not met");
  na.applicable = false;
  r.add(na);
  r.add(make_record("d", std::numeric_limits<double>::quiet_NaN(), 1.0));
  const std::string text = dump_json(report_to_json(r));
  const VerificationReport back = report_from_json(Json::parse(text));
  REQUIRE(back.checks.size() == r.checks.size());
  CHECK(back.overall == r.overall);
  CHECK(back.checks[0].defect == r.checks[0].defect);
  CHECK(back.checks[1].defect == r.checks[1].defect);
  CHECK(back.checks[1].details == r.checks[1].details);
  CHECK_FALSE(back.checks[2].applicable);
  CHECK(std::isnan(back.checks[3].defect));
  CHECK(dump_json(report_to_json(back)) == text);
}

TEST_CASE("numbers use 17 significant digits") {
  Json j;
  j["x"] = 0.1;
  j["y"] = 1.0;
  const std::string s = dump_json(j);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("1.0") != std::string::npos);
}

TEST_CASE("cli commands and exit codes") {
  const fs::path dir = scratch_dir();
  const fs::path diag = write_file(dir, "diag.json", kDiag);

  const fs::path rep = dir / "superopt.json";
  REQUIRE(run_cli("superopt " + diag.string() + " --report " + rep.string()) == 0);
  const Json r = Json::parse(read_file(rep));
  CHECK(r["superoptimal_values"].size() == 2);
  CHECK(std::abs(r["superoptimal_values"][0].get<double>() - 1.0) < 1e-10);
  CHECK(std::abs(r["superoptimal_values"][1].get<double>() - 0.5) < 1e-10);
  for (const auto& e : r["F_coeffs"])
    for (const char* part : {"re", "im"})
      for (const auto& row : e[part])
        for (const auto& x : row) CHECK(std::abs(x.get<double>()) < 1e-9);

  // Determinism: identical runs give byte-identical reports.
  const fs::path rep2 = dir / "superopt2.json";
  REQUIRE(run_cli("superopt " + diag.string() + " --seed 5 --report " + rep2.string()) == 0);
  const fs::path rep3 = dir / "superopt3.json";
  REQUIRE(run_cli("superopt " + diag.string() + " --seed 5 --report " + rep3.string()) == 0);
  CHECK(read_file(rep2) == read_file(rep3));

  const fs::path wh = write_file(
      dir, "wh.json",
      R"({"m": 2, "n": 2, "coeffs": [{"k": -1, "re": [[1, 0], [0, 0]]}, {"k": 2, "re": [[0, 0], [0, 1]]}]})");
  const fs::path whr = dir / "wh_report.json";
  REQUIRE(run_cli("wh-indices " + wh.string() + " --report " + whr.string()) == 0);
  CHECK(Json::parse(read_file(whr))["indices"] == Json::parse("[-1, 2]"));

  const fs::path ver = dir / "verify.json";
  CHECK(run_cli("verify " + diag.string() + " --report " + ver.string()) == 0);
  CHECK(Json::parse(read_file(ver))["overall"].get<bool>());

  // A fixture whose recorded expectation is wrong fails verification and names the check.
  const fs::path bad = write_file(
      dir, "bad.json",
      R"({"m": 2, "n": 2, "coeffs": [{"k": -1, "re": [[1, 0], [0, 0.5]]}],
          "options": {"expect": {"superoptimal_values": [1, 0.501]}}})");
  const fs::path badr = dir / "bad_report.json";
  CHECK(run_cli("verify " + bad.string() + " --report " + badr.string()) == 2);
  bool named = false;
  const Json bad_report = Json::parse(read_file(badr));
  for (const auto& c : bad_report["checks"])
    if (!c["passed"].get<bool>()) named = named || c["name"] == "expected_superoptimal_values";
  CHECK(named);

  const fs::path broken = write_file(dir, "broken.json", "{\"m\": 1,");
  CHECK(run_cli("nehari " + broken.string() + " --report " + (dir / "x.json").string()) == 3);
  CHECK(run_cli("wh-indices " + diag.string() + " --report " + (dir / "y.json").string()) == 3);
  CHECK(run_cli("bogus " + diag.string()) == 3);

  // Ambiguous multiplicity: two Hankel values closer than the tolerance window.
  const fs::path amb = write_file(
      dir, "amb.json",
      R"({"m": 2, "n": 2, "coeffs": [{"k": -1, "re": [[1, 0], [0, 0.999999988]]}]})");
  CHECK(run_cli("superopt " + amb.string() + " --report " + (dir / "z.json").string()) == 4);

  fs::remove_all(dir);
}

TEST_CASE("cli batch mode isolates outputs") {
  const fs::path dir = scratch_dir() / "batch";
  fs::create_directories(dir);
  write_file(dir, "a.json", kDiag);
  write_file(dir, "b.json", R"({"m": 1, "n": 1, "coeffs": [{"k": -2, "re": [[1]]}]})");
  const fs::path out = dir.parent_path() / "out";
  CHECK(run_cli("superopt --batch " + dir.string() + " --report " + out.string() + " > /dev/null") == 0);
  CHECK(fs::exists(out / "a.report.json"));
  CHECK(fs::exists(out / "b.report.json"));
  const Json b = Json::parse(read_file(out / "b.report.json"));
  CHECK(b["superoptimal_values"] == Json::parse("[1.0]"));
  fs::remove_all(dir.parent_path());
}
