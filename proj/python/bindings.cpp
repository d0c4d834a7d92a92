// Python extension. Symbols cross the boundary as {k: complex matrix};
// structured results come back as JSON text that the package decodes.

#include <map>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "superopt/hankel_toeplitz.hpp"
#include "superopt/io.hpp"

namespace py = pybind11;
using namespace superopt;

namespace {

using CoeffDict = std::map<int, CMatrix>;

MatFun symbol_from(const CoeffDict& coeffs, Index m, Index n) {
  if (coeffs.empty() && (m <= 0 || n <= 0)) {
    throw Error(ErrorKind::InvalidInput, "empty coefficient map needs explicit m and n");
  }
  if (m <= 0) m = coeffs.begin()->second.rows();
  if (n <= 0) n = coeffs.begin()->second.cols();
  std::vector<std::pair<int, CMatrix>> entries;
  for (const auto& [k, c] : coeffs) {
    if (c.rows() != m || c.cols() != n) {
      throw Error(ErrorKind::InvalidInput, "coefficient " + std::to_string(k) + " has the wrong shape");
    }
    entries.emplace_back(k, c);
  }
  return MatFun::from_coeffs(m, n, entries);
}

Options options_from(int grid, double tol, unsigned long long seed, int k_trunc, int max_levels) {
  Options o;
  o.grid = grid;
  o.multiplicity_tol = tol;
  o.seed = seed;
  o.k_trunc = k_trunc;
  o.max_levels = max_levels;
  return o;
}

// Keyword arguments shared by the pipeline entry points.
#define PIPELINE_ARGS                                                                        \
  py::arg("coeffs"), py::kw_only(), py::arg("m") = 0, py::arg("n") = 0, py::arg("grid") = 0, \
      py::arg("tol") = tol::multiplicity, py::arg("seed") = 0ULL, py::arg("k_trunc") = 64,   \
      py::arg("max_levels") = -1

}  // namespace

PYBIND11_MODULE(_superopt, mod) {
  mod.doc() = "Superoptimal analytic approximation of matrix functions on the unit circle";

  static py::exception<Error> exc(mod, "SuperoptError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& cls = exc;
      py::object err = cls(error_kind_name(e.kind()), e.what(), e.defect());
      PyErr_SetObject(exc.ptr(), err.ptr());
    }
  });

  mod.def(
      "nehari",
      [](const CoeffDict& c, Index m, Index n, int grid, double tol, unsigned long long seed,
         int k_trunc, int max_levels) {
        const MatFun phi = symbol_from(c, m, n);
        return dump_json(
            nehari_to_json(nehari_best_approx(phi, options_from(grid, tol, seed, k_trunc, max_levels))));
      },
      PIPELINE_ARGS);

  mod.def(
      "factorize",
      [](const CoeffDict& c, Index m, Index n, int grid, double tol, unsigned long long seed,
         int k_trunc, int max_levels, bool with_factors) {
        const MatFun phi = symbol_from(c, m, n);
        const auto cf = canonical_factorize(phi, options_from(grid, tol, seed, k_trunc, max_levels));
        return dump_json(factorization_to_json(cf, with_factors));
      },
      PIPELINE_ARGS, py::arg("with_factors") = false);

  mod.def(
      "verify",
      [](const CoeffDict& c, Index m, Index n, int grid, double tol, unsigned long long seed,
         int k_trunc, int max_levels) {
        const MatFun phi = symbol_from(c, m, n);
        const Options o = options_from(grid, tol, seed, k_trunc, max_levels);
        return dump_json(report_to_json(verify_factorization(phi, canonical_factorize(phi, o), o)));
      },
      PIPELINE_ARGS);

  mod.def(
      "wh_indices",
      [](const CoeffDict& c, Index m, Index n) {
        return dump_json(wh_to_json(wh_indices(symbol_from(c, m, n))));
      },
      py::arg("coeffs"), py::kw_only(), py::arg("m") = 0, py::arg("n") = 0);

  mod.def(
      "classify",
      [](const CoeffDict& c, Index m, Index n) {
        return dump_json(classification_to_json(classify_unitary(symbol_from(c, m, n))));
      },
      py::arg("coeffs"), py::kw_only(), py::arg("m") = 0, py::arg("n") = 0);

  mod.def(
      "hankel_singular_values",
      [](const CoeffDict& c, Index m, Index n) { return hankel_singular_values(symbol_from(c, m, n)); },
      py::arg("coeffs"), py::kw_only(), py::arg("m") = 0, py::arg("n") = 0);

  mod.def(
      "toeplitz_index", [](const CoeffDict& c, Index m, Index n) { return toeplitz_index(symbol_from(c, m, n)); },
      py::arg("coeffs"), py::kw_only(), py::arg("m") = 0, py::arg("n") = 0);

  // Problem files: returns (m, n, {k: matrix}, options-as-dict JSON text).
  mod.def("parse_problem", [](const std::string& text) {
    const ProblemSpec s = parse_problem(text);
    CoeffDict out(s.coeffs.begin(), s.coeffs.end());
    return py::make_tuple(s.m, s.n, out, dump_json(problem_to_json(s)));
  });
}
