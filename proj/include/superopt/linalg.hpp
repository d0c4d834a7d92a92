#pragma once

#include <random>

#include "superopt/laurent.hpp"

namespace superopt {

// Unitary W such that Q*W is in column echelon form with respect to the row
// order: each column has a real positive pivot and zeros above it. Fixes the
// right-unitary freedom of an orthonormal basis deterministically.
CMatrix echelon_gauge(const CMatrix& Q, double pivot_tol = 1e-6);

// Polar factor of M: the unitary closest to M in Frobenius norm.
CMatrix polar_unitary(const CMatrix& M);

struct DenseSvd {
  RVector values;  // nonincreasing
  CMatrix left;    // full U when requested
  CMatrix right;   // full V when requested
};
// SVD with a divide-and-conquer fast path. Falls back to one-sided Jacobi when
// the fast path returns non-finite output or fails to reproduce the matrix,
// which happens for heavily repeated singular values.
DenseSvd dense_svd(const CMatrix& a, bool want_left, bool want_right);

// Haar-distributed unitary from a seeded generator.
CMatrix random_unitary(std::mt19937_64& rng, Index n);
CMatrix random_gaussian(std::mt19937_64& rng, Index rows, Index cols);

// Stacks coefficients 0..D of an analytic function: block d of the result
// holds the degree-d coefficient.
CMatrix stack_coefficients(const MatFun& f, int D);
// Inverse of stack_coefficients for a stacked block column with block height n.
MatFun unstack_coefficients(const CMatrix& stacked, Index n);

// Multiplies a function by a scalar phase so its lowest-degree nonzero
// coefficient has a real positive first nonzero entry.
MatFun phase_canonical(const MatFun& f);

}  // namespace superopt
