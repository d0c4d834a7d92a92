#pragma once

#include <vector>

#include "superopt/laurent.hpp"

namespace superopt {

// Orthonormal basis of span{z^k g : g a generator, degree <= D} inside the
// stacked coefficient space of polynomials of degree <= D in C^n.
struct SubspaceBasis {
  Index ambient_dim = 0;
  int degree_cap = 0;
  std::vector<MatFun> generators;
  CMatrix orthonormal_cols;
};

// An r-balanced unitary-valued function v = (upsilon, conj(theta)).
struct BalancedPair {
  MatFun upsilon;  // n x r, inner and co-outer
  MatFun theta;    // n x (n-r), inner and co-outer
  MatFun v;        // n x n
  Index r = 0;

  Index n() const { return upsilon.rows(); }
};

struct InnerOuter {
  MatFun theta;  // n x 1 inner
  MatFun h;      // scalar outer
};

MatFun fejer_riesz_outer(const MatFun& t, double tol = 1e-10);
InnerOuter column_inner_outer(const MatFun& f, double tol = 1e-10, int band = 64);

SubspaceBasis minimal_z_invariant_subspace(const std::vector<MatFun>& generators, int degree_cap);
// Orthonormal basis of M minus zM assembled as an inner function, in
// echelon gauge. expected_rank < 0 lets the eigenvalue gap decide.
MatFun wandering_basis(const SubspaceBasis& M, Index expected_rank = -1);

BalancedPair make_balanced_pair(const MatFun& upsilon, const MatFun& theta);
BalancedPair balanced_completion(const MatFun& upsilon, double tol = tol::unitary,
                                 int degree_extra = 48);
bool is_co_outer(const MatFun& f, double tol = tol::rank);

// Beurling-Lax inner function of the smallest z-invariant subspace holding
// the generators. The degree cap grows until the result is converged.
MatFun inner_from_generators(const std::vector<MatFun>& generators, Index n,
                             Index expected_rank = -1, int degree_extra = 48);

// Divides a polynomial column by (z - a) for every zero a in the open disc
// shared by all entries, so the column it generates has no scalar inner factor.
MatFun strip_common_zeros(const MatFun& f, double tol = 1e-8);

}  // namespace superopt
