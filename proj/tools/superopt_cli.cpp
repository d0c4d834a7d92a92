// Command-line front end: reads a problem file, runs one pipeline command and
// writes a JSON report.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "superopt/io.hpp"

namespace fs = std::filesystem;
using namespace superopt;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 2, kBadInput = 3, kNumerical = 4 };

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput:
    case ErrorKind::Parse:
    case ErrorKind::Schema:
    case ErrorKind::Bandwidth:
    case ErrorKind::NotUnitary:
    case ErrorKind::NotInner:
    case ErrorKind::NotNonnegative:
    case ErrorKind::ZeroInput:
    case ErrorKind::AlreadyAnalytic:
      return kBadInput;
    default:
      return kNumerical;
  }
}

struct Overrides {
  std::optional<int> grid;
  std::optional<double> tol;
  std::optional<unsigned long long> seed;
  bool timings = false;
};

struct Outcome {
  Json report;
  int code = kOk;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void add_checks(Json& report, const std::vector<CheckRecord>& checks, int& code) {
  if (checks.empty()) return;
  VerificationReport rep;
  for (const auto& c : checks) rep.add(c);
  const Json j = report_to_json(rep);
  report["checks"] = j["checks"];
  report["overall"] = j["overall"];
  if (!rep.overall) code = kVerifyFailed;
}

Outcome run_file(const std::string& command, const std::string& path, const Overrides& ov) {
  Outcome out;
  Json& rep = out.report;
  rep["command"] = command;
  rep["input"] = fs::path(path).filename().string();
  Json timings;
  try {
    auto t0 = Clock::now();
    ProblemSpec spec = parse_problem_file(path);
    if (ov.grid) {
      if (*ov.grid != 0 && !is_power_of_two(*ov.grid)) {
        throw Error(ErrorKind::Schema, "--grid: must be 0 or a power of two");
      }
      spec.options.grid = *ov.grid;
    }
    if (ov.tol) spec.options.multiplicity_tol = *ov.tol;
    if (ov.seed) spec.options.seed = *ov.seed;
    const MatFun phi = spec.symbol();
    rep["m"] = spec.m;
    rep["n"] = spec.n;
    rep["seed"] = spec.options.seed;
    timings["parse"] = ms_since(t0);

    t0 = Clock::now();
    std::vector<CheckRecord> checks;
    if (command == "nehari") {
      rep.update(nehari_to_json(nehari_best_approx(phi, spec.options)));
    } else if (command == "superopt" || command == "factorize" || command == "verify") {
      const CanonicalFactorization cf = canonical_factorize(phi, spec.options);
      rep.update(factorization_to_json(cf, command == "factorize"));
      timings["pipeline"] = ms_since(t0);
      if (command == "verify") {
        t0 = Clock::now();
        checks = verify_factorization(phi, cf, spec.options).checks;
        timings["verify"] = ms_since(t0);
      }
      for (auto& c : expectation_checks(spec.expect, &cf, nullptr)) checks.push_back(c);
    } else if (command == "wh-indices") {
      const WienerHopfIndices wh = wh_indices(phi);
      rep.update(wh_to_json(wh));
      checks = expectation_checks(spec.expect, nullptr, &wh);
    } else if (command == "classify") {
      rep.update(classification_to_json(classify_unitary(phi)));
      if (phi.rows() == 1 && phi.cols() == 1) {
        rep["badly_approximable"] = is_badly_approximable_scalar(phi);
      }
    } else {
      throw Error(ErrorKind::InvalidInput, "unknown command " + command);
    }
    if (!timings.contains("pipeline")) timings["pipeline"] = ms_since(t0);
    add_checks(rep, checks, out.code);
    if (out.code == kVerifyFailed) {
      for (const auto& c : rep["checks"])
        if (!c["passed"].get<bool>()) std::cerr << "check failed: " << c["name"].get<std::string>() << "\n";
    }
  } catch (const Error& e) {
    out.code = exit_code_for(e.kind());
    Json err;
    err["kind"] = error_kind_name(e.kind());
    err["message"] = e.what();
    rep["error"] = err;
    std::cerr << path << ": " << error_kind_name(e.kind()) << ": " << e.what() << "\n";
  }
  if (ov.timings) rep["timings_ms"] = timings;
  return out;
}

void emit(const Json& j, const std::string& report_path) {
  const std::string text = dump_json(j);
  if (report_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(report_path);
  if (!f) throw Error(ErrorKind::InvalidInput, "cannot write " + report_path);
  f << text;
}

int run_batch(const std::string& command, const std::string& dir, const std::string& out_dir,
              const Overrides& ov) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (e.is_regular_file() && e.path().extension() == ".json" &&
        name.find(".report.") == std::string::npos) {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  const fs::path target = out_dir.empty() ? fs::path(dir) : fs::path(out_dir);
  fs::create_directories(target);

  std::vector<std::future<std::pair<fs::path, int>>> jobs;
  for (const auto& p : files) {
    jobs.push_back(std::async(std::launch::async, [&, p] {
      Outcome o = run_file(command, p.string(), ov);
      const fs::path dest = target / (p.stem().string() + ".report.json");
      emit(o.report, dest.string());
      return std::make_pair(dest, o.code);
    }));
  }
  Json summary;
  summary["command"] = command;
  Json entries = Json::array();
  int worst = kOk;
  for (size_t i = 0; i < jobs.size(); ++i) {
    const auto [dest, code] = jobs[i].get();
    Json e;
    e["input"] = files[i].filename().string();
    e["report"] = dest.string();
    e["exit_code"] = code;
    entries.push_back(e);
    worst = std::max(worst, code);
  }
  summary["files"] = entries;
  std::cout << dump_json(summary);
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superoptimal analytic approximation of matrix functions on the circle"};
  std::string command, input, report, batch;
  Overrides ov;
  int grid = 0;
  double tolv = 0.0;
  unsigned long long seed = 0;

  app.add_option("command", command, "nehari | superopt | factorize | verify | wh-indices | classify")
      ->required()
      ->check(CLI::IsMember({"nehari", "superopt", "factorize", "verify", "wh-indices", "classify"}));
  app.add_option("input", input, "problem file (JSON)");
  auto* g = app.add_option("--grid", grid, "grid size override (power of two)");
  auto* t = app.add_option("--tol", tolv, "multiplicity tolerance override")->check(CLI::PositiveNumber);
  auto* s = app.add_option("--seed", seed, "seed for randomized internal bases (0 = deterministic)");
  app.add_option("--report", report, "write the report here (a directory in batch mode)");
  app.add_option("--batch", batch, "process every .json file in this directory")->check(CLI::ExistingDirectory);
  app.add_flag("--timings", ov.timings, "include wall-clock timings in the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kBadInput;
  }
  if (g->count()) ov.grid = grid;
  if (t->count()) ov.tol = tolv;
  if (s->count()) ov.seed = seed;

  try {
    if (!batch.empty()) return run_batch(command, batch, report, ov);
    if (input.empty()) {
      std::cerr << "an input file or --batch is required\n";
      return kBadInput;
    }
    const Outcome o = run_file(command, input, ov);
    emit(o.report, report);
    return o.code;
  } catch (const Error& e) {
    std::cerr << error_kind_name(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
}
