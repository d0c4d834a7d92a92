#include "superopt/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace superopt {

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::Schema, what); }

const Json& field(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema(where + ": missing field '" + key + "'");
  return *it;
}

long long integer(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) schema(where + ": expected an integer");
  return v.get<long long>();
}

double number(const Json& v, const std::string& where) {
  if (!v.is_number()) schema(where + ": expected a number");
  return v.get<double>();
}

void only_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) schema(where + ": unknown field '" + it.key() + "'");
  }
}

RVector real_rows(const Json& v, Index rows, Index cols, const std::string& where) {
  if (!v.is_array() || static_cast<Index>(v.size()) != rows) {
    schema(where + ": expected " + std::to_string(rows) + " rows");
  }
  RVector out(rows * cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = v[static_cast<size_t>(i)];
    const std::string rw = where + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      schema(rw + ": expected " + std::to_string(cols) + " columns");
    }
    for (Index j = 0; j < cols; ++j) {
      out(i * cols + j) = number(row[static_cast<size_t>(j)], rw + "[" + std::to_string(j) + "]");
    }
  }
  return out;
}

CMatrix complex_matrix(const Json& entry, Index m, Index n, const std::string& where) {
  const RVector re = real_rows(field(entry, "re", where), m, n, where + ".re");
  RVector im = RVector::Zero(m * n);
  if (entry.contains("im")) im = real_rows(entry["im"], m, n, where + ".im");
  CMatrix out(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = Complex(re(i * n + j), im(i * n + j));
  return out;
}

Json real_part_json(const CMatrix& c, bool imag) {
  Json rows = Json::array();
  for (Index i = 0; i < c.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < c.cols(); ++j) row.push_back(imag ? c(i, j).imag() : c(i, j).real());
    rows.push_back(row);
  }
  return rows;
}

Json coeff_entry(int k, const CMatrix& c) {
  Json e;
  e["k"] = k;
  e["re"] = real_part_json(c, false);
  e["im"] = real_part_json(c, true);
  return e;
}

void validate_expect(const Json& e) {
  if (!e.is_object()) schema("options.expect: expected an object");
  only_keys(e, {"superoptimal_values", "multiplicities", "index_sums", "indices", "tol"},
            "options.expect");
  for (const char* key : {"superoptimal_values", "multiplicities", "index_sums", "indices"}) {
    if (!e.contains(key)) continue;
    const Json& a = e[key];
    const std::string w = std::string("options.expect.") + key;
    if (!a.is_array()) schema(w + ": expected an array");
    for (size_t i = 0; i < a.size(); ++i) number(a[i], w + "[" + std::to_string(i) + "]");
  }
  if (e.contains("tol") && !(number(e["tol"], "options.expect.tol") > 0.0)) {
    schema("options.expect.tol: must be positive");
  }
}

Options parse_options(const Json& o, Json& expect) {
  Options out;
  if (!o.is_object()) schema("options: expected an object");
  only_keys(o, {"grid", "tol", "seed", "k_trunc", "max_levels", "expect"}, "options");
  if (o.contains("grid")) {
    const long long g = integer(o["grid"], "options.grid");
    if (g != 0 && !is_power_of_two(static_cast<int>(g))) {
      schema("options.grid: must be 0 or a power of two");
    }
    out.grid = static_cast<int>(g);
  }
  if (o.contains("tol")) {
    out.multiplicity_tol = number(o["tol"], "options.tol");
    if (!(out.multiplicity_tol > 0.0)) schema("options.tol: must be positive");
  }
  if (o.contains("seed")) {
    const long long s = integer(o["seed"], "options.seed");
    if (s < 0) schema("options.seed: must be nonnegative");
    out.seed = static_cast<unsigned long long>(s);
  }
  if (o.contains("k_trunc")) {
    out.k_trunc = static_cast<int>(integer(o["k_trunc"], "options.k_trunc"));
    if (out.k_trunc < 8) schema("options.k_trunc: must be at least 8");
  }
  if (o.contains("max_levels")) {
    out.max_levels = static_cast<int>(integer(o["max_levels"], "options.max_levels"));
    if (out.max_levels < -1) schema("options.max_levels: must be -1 or nonnegative");
  }
  if (o.contains("expect")) {
    validate_expect(o["expect"]);
    expect = o["expect"];
  }
  return out;
}

double to_double(const Json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-Infinity") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return v.get<double>();
}

Json from_double(double x) {
  if (std::isnan(x)) return "NaN";
  if (std::isinf(x)) return x > 0 ? "Infinity" : "-Infinity";
  return x;
}

bool flat(const Json& a) {
  for (const auto& x : a)
    if (x.is_structured()) return false;
  return true;
}

void write(std::ostringstream& os, const Json& j, int depth) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (!std::isfinite(x)) {
        os << Json(from_double(x)).dump();
        break;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", x);
      std::string s = buf;
      if (s.find_first_of(".e") == std::string::npos) s += ".0";
      os << s;
      break;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
      } else if (flat(j)) {
        os << "[";
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write(os, j[i], depth + 1);
        }
        os << "]";
      } else {
        os << "[\n";
        for (size_t i = 0; i < j.size(); ++i) {
          os << pad;
          write(os, j[i], depth + 1);
          os << (i + 1 < j.size() ? ",\n" : "\n");
        }
        os << close << "]";
      }
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        break;
      }
      os << "{\n";
      size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        os << pad << Json(it.key()).dump() << ": ";
        write(os, it.value(), depth + 1);
        os << (i + 1 < j.size() ? ",\n" : "\n");
      }
      os << close << "}";
      break;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

ProblemSpec parse_problem(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // The message carries line and column.
    throw Error(ErrorKind::Parse, e.what());
  }
  if (!j.is_object()) schema("top level: expected an object");
  only_keys(j, {"m", "n", "coeffs", "options", "name", "description"}, "top level");
  ProblemSpec spec;
  const long long m = integer(field(j, "m", "top level"), "m");
  const long long n = integer(field(j, "n", "top level"), "n");
  if (m <= 0 || n <= 0) schema("m, n: must be positive");
  spec.m = m;
  spec.n = n;
  const Json& cs = field(j, "coeffs", "top level");
  if (!cs.is_array()) schema("coeffs: expected an array");
  std::set<long long> seen;
  for (size_t i = 0; i < cs.size(); ++i) {
    const std::string w = "coeffs[" + std::to_string(i) + "]";
    if (!cs[i].is_object()) schema(w + ": expected an object");
    only_keys(cs[i], {"k", "re", "im"}, w);
    const long long k = integer(field(cs[i], "k", w), w + ".k");
    if (!seen.insert(k).second) schema(w + ".k: duplicate degree " + std::to_string(k));
    spec.coeffs.emplace_back(static_cast<int>(k), complex_matrix(cs[i], spec.m, spec.n, w));
  }
  if (j.contains("options")) spec.options = parse_options(j["options"], spec.expect);
  return spec;
}

ProblemSpec parse_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidInput, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

Json problem_to_json(const ProblemSpec& spec) {
  Json j;
  j["m"] = spec.m;
  j["n"] = spec.n;
  Json cs = Json::array();
  for (const auto& [k, c] : spec.coeffs) cs.push_back(coeff_entry(k, c));
  j["coeffs"] = cs;
  Json o;
  o["grid"] = spec.options.grid;
  o["tol"] = spec.options.multiplicity_tol;
  o["seed"] = spec.options.seed;
  o["k_trunc"] = spec.options.k_trunc;
  o["max_levels"] = spec.options.max_levels;
  if (!spec.expect.is_null()) o["expect"] = spec.expect;
  j["options"] = o;
  return j;
}

Json coeffs_to_json(const MatFun& f) {
  Json out = Json::array();
  for (const auto& [k, c] : f.coeffs()) out.push_back(coeff_entry(k, c));
  return out;
}

MatFun coeffs_from_json(const Json& j, Index m, Index n) {
  if (!j.is_array()) schema("coefficients: expected an array");
  std::vector<std::pair<int, CMatrix>> entries;
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string w = "coefficients[" + std::to_string(i) + "]";
    entries.emplace_back(static_cast<int>(integer(field(j[i], "k", w), w + ".k")),
                         complex_matrix(j[i], m, n, w));
  }
  return MatFun::from_coeffs(m, n, entries);
}

Json check_to_json(const CheckRecord& c) {
  Json j;
  j["name"] = c.name;
  j["defect"] = from_double(c.defect);
  j["tol"] = from_double(c.tol);
  j["passed"] = c.passed;
  j["applicable"] = c.applicable;
  j["details"] = c.details;
  return j;
}

Json report_to_json(const VerificationReport& r) {
  Json j;
  j["overall"] = r.overall;
  Json cs = Json::array();
  for (const auto& c : r.checks) cs.push_back(check_to_json(c));
  j["checks"] = cs;
  return j;
}

VerificationReport report_from_json(const Json& j) {
  VerificationReport r;
  for (const auto& c : field(j, "checks", "report")) {
    CheckRecord rec;
    rec.name = c.at("name").get<std::string>();
    rec.defect = to_double(c.at("defect"));
    rec.tol = to_double(c.at("tol"));
    rec.passed = c.at("passed").get<bool>();
    rec.applicable = c.value("applicable", true);
    rec.details = c.value("details", std::string());
    r.add(rec);
  }
  if (j.contains("overall") && j["overall"].get<bool>() != r.overall) {
    schema("report: overall flag disagrees with the checks");
  }
  return r;
}

Json factorization_to_json(const CanonicalFactorization& cf, bool with_factors) {
  Json j;
  j["superoptimal_values"] = cf.svals.values;
  j["multiplicities"] = cf.svals.multiplicities;
  j["distinct_values"] = cf.svals.iota;
  j["complete"] = !cf.residual.has_value();
  if (cf.residual) j["residual_hankel_norm"] = cf.residual_hankel_norm;
  j["grid"] = cf.grid;
  Json blocks = Json::array();
  for (const auto& b : cf.blocks) {
    Json e;
    e["sigma"] = b.sigma;
    e["r"] = b.r;
    e["dimension"] = b.pair_v.v.rows();
    e["index_sum"] = b.index_sum;
    if (with_factors) {
      e["U_coeffs"] = coeffs_to_json(b.U);
      e["V_coeffs"] = coeffs_to_json(b.pair_v.v);
      e["W_coeffs"] = coeffs_to_json(b.pair_w.v);
    }
    blocks.push_back(e);
  }
  j["blocks"] = blocks;
  j["F_coeffs"] = coeffs_to_json(cf.best_approx);
  return j;
}

Json nehari_to_json(const NehariResult& r) {
  Json j;
  j["sigma"] = r.sigma;
  j["F_coeffs"] = coeffs_to_json(r.F);
  j["error_coeffs"] = coeffs_to_json(r.error);
  return j;
}

Json wh_to_json(const WienerHopfIndices& w) {
  Json j;
  j["indices"] = w.indices;
  j["negative_count"] = w.negative_count;
  return j;
}

Json classification_to_json(const VeryBadlyApproximable& c) {
  Json j;
  j["very_badly_approximable"] = c.value();
  j["indices_negative"] = c.indices_negative;
  j["dense_range"] = c.dense_range;
  j["trivial_kernel"] = c.trivial_kernel;
  j["smallest_section_value"] = c.smallest_section_value;
  return j;
}

std::vector<CheckRecord> expectation_checks(const Json& expect, const CanonicalFactorization* cf,
                                            const WienerHopfIndices* wh) {
  std::vector<CheckRecord> out;
  if (expect.is_null()) return out;
  const double tol = expect.value("tol", 1e-8);
  auto compare = [&](const char* key, const std::vector<double>& got, double t) {
    const std::vector<double> want = expect[key].get<std::vector<double>>();
    double d = want.size() == got.size() ? 0.0 : std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < std::min(want.size(), got.size()); ++i)
      d = std::max(d, std::abs(want[i] - got[i]));
    out.push_back(make_record(std::string("expected_") + key, d, t));
  };
  if (cf && expect.contains("superoptimal_values")) {
    compare("superoptimal_values", cf->svals.values, tol);
  }
  if (cf && expect.contains("multiplicities")) {
    std::vector<double> got(cf->svals.multiplicities.begin(), cf->svals.multiplicities.end());
    compare("multiplicities", got, 0.0);
  }
  if (cf && expect.contains("index_sums")) {
    std::vector<double> got;
    for (const auto& b : cf->blocks) got.push_back(b.index_sum);
    compare("index_sums", got, 0.0);
  }
  if (wh && expect.contains("indices")) {
    compare("indices", std::vector<double>(wh->indices.begin(), wh->indices.end()), 0.0);
  }
  return out;
}

std::string dump_json(const Json& j) {
  std::ostringstream os;
  write(os, j, 0);
  os << "\n";
  return os.str();
}

}  // namespace superopt
