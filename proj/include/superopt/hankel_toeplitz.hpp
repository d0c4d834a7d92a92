#pragma once

#include <memory>
#include <string>
#include <vector>

#include "superopt/laurent.hpp"

namespace superopt {

enum class OperatorKind { Hankel, Toeplitz };

struct SingularTriples {
  RVector values;  // nonincreasing
  CMatrix left;
  CMatrix right;
};

/**
 * Finite block section of a Hankel or Toeplitz operator.
 *
 * The domain is polynomials of degree < trunc, the codomain keeps
 * codomain_trunc blocks. Hankel block (i, j) is the coefficient -(i+j+1) of
 * the symbol, Toeplitz block (i, j) the coefficient i-j.
 */
class BlockOperatorMatrix {
 public:
  BlockOperatorMatrix(OperatorKind kind, MatFun symbol, int trunc, int codomain_trunc);

  OperatorKind kind() const { return kind_; }
  const MatFun& symbol() const { return symbol_; }
  int trunc() const { return trunc_; }
  int codomain_trunc() const { return codomain_trunc_; }
  const CMatrix& dense() const { return dense_; }

  // Cached on first use.
  const SingularTriples& triples() const;

 private:
  struct Cache;

  OperatorKind kind_;
  MatFun symbol_;
  int trunc_;
  int codomain_trunc_;
  CMatrix dense_;
  std::shared_ptr<Cache> cache_;
};

BlockOperatorMatrix hankel_truncation(const MatFun& symbol);
BlockOperatorMatrix hankel_truncation(const MatFun& symbol, int trunc);
BlockOperatorMatrix toeplitz_truncation(const MatFun& symbol, int trunc);
// Rectangular section whose codomain holds the whole product P+(symbol f)
// for polynomial f of degree < trunc.
BlockOperatorMatrix toeplitz_section(const MatFun& symbol, int trunc);

SingularTriples singular_triples(const BlockOperatorMatrix& op);
double operator_norm(const BlockOperatorMatrix& op);
RVector hankel_singular_values(const MatFun& symbol);

struct EssentialNormNote {
  double value = 0.0;
  std::string note;
};
EssentialNormNote essential_norm_note(const MatFun& symbol);

// Column vectors of block height n read as polynomial vector functions.
MatFun polynomial_vector(const CVector& stacked, Index n);

// Drops outer coefficients whose summed norm stays below eps; the dropped
// mass is added to the truncation residual.
MatFun trim_tail(const MatFun& f, double eps = 1e-13);

struct KernelResult {
  std::vector<MatFun> basis;  // orthonormal in H^2, echelon gauge
  int trunc = 0;              // section size at which the dimension settled
};

// Stabilized numerical kernel of a Toeplitz operator. Sections grow by 2
// from op.trunc() until the dimension is unchanged twice in a row.
KernelResult kernel_basis(const BlockOperatorMatrix& op, double tol = tol::rank);
// Kernel of the single rectangular section of size trunc, without the
// stabilization loop. Used for operators with infinite-dimensional kernels.
std::vector<MatFun> section_kernel_basis(const MatFun& symbol, int trunc, double tol = tol::rank);
int kernel_dimension(const MatFun& symbol, double tol = tol::rank);

// dim Ker T_symbol - dim Ker T_symbol*, for unitary-valued square symbols.
int toeplitz_index(const MatFun& symbol, double tol = tol::rank);

}  // namespace superopt
