#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace superopt {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Values of a matrix function at the N-th roots of unity.
using Grid = std::vector<CMatrix>;

enum class ErrorKind {
  InvalidInput,
  Bandwidth,
  DegenerateSymbol,
  TruncationInstability,
  Truncation,
  NotUnitary,
  NotInner,
  NotNonnegative,
  ZeroInput,
  CompletionFailure,
  AlreadyAnalytic,
  DegenerateMaximizer,
  AmbiguousMultiplicity,
  InternalConsistency,
  Inconsistency,
  Parse,
  Schema,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double defect = 0.0)
      : std::runtime_error(what), kind_(kind), defect_(defect) {}

  ErrorKind kind() const { return kind_; }
  double defect() const { return defect_; }

 private:
  ErrorKind kind_;
  double defect_;
};

namespace tol {
inline constexpr double prune = 1e-12;
inline constexpr double truncation_budget = 1e-9;
inline constexpr double rank = 1e-10;
inline constexpr double multiplicity = 1e-8;
inline constexpr double unitary = 1e-8;
inline constexpr double analytic_F = 1e-9;
inline constexpr double off_diagonal = 1e-7;
inline constexpr double reconstruction = 1e-7;
inline constexpr double division_guard = 1e-6;
}  // namespace tol

// Knobs shared by the factorization pipeline.
struct Options {
  int grid = 0;              // 0 picks the working grid from the bandwidth
  int k_trunc = 64;          // band kept for rational intermediates
  int degree_extra = 48;     // degree headroom for subspace computations
  double multiplicity_tol = tol::multiplicity;
  double zero_tol = 1e-9;    // relative Hankel norm treated as exhausted
  unsigned long long seed = 0;  // 0 keeps internal bases deterministic
  int max_levels = -1;       // -1 runs the recursion to completion
};

}  // namespace superopt
