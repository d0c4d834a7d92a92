#include "superopt/hankel_toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "superopt/linalg.hpp"

namespace superopt {

struct BlockOperatorMatrix::Cache {
  std::once_flag once;
  SingularTriples triples;
};

BlockOperatorMatrix::BlockOperatorMatrix(OperatorKind kind, MatFun symbol, int trunc,
                                         int codomain_trunc)
    : kind_(kind),
      symbol_(std::move(symbol)),
      trunc_(trunc),
      codomain_trunc_(codomain_trunc),
      cache_(std::make_shared<Cache>()) {
  const Index m = symbol_.rows();
  const Index n = symbol_.cols();
  dense_ = CMatrix::Zero(m * codomain_trunc_, n * trunc_);
  for (const auto& [k, c] : symbol_.coeffs()) {
    if (kind_ == OperatorKind::Hankel) {
      // block (i, j) holds coefficient -(i + j + 1)
      const int s = -k - 1;
      if (s < 0) continue;
      for (int i = 0; i < codomain_trunc_; ++i) {
        const int j = s - i;
        if (j < 0) break;
        if (j < trunc_) dense_.block(i * m, j * n, m, n) = c;
      }
    } else {
      for (int j = 0; j < trunc_; ++j) {
        const int i = j + k;
        if (i >= 0 && i < codomain_trunc_) dense_.block(i * m, j * n, m, n) = c;
      }
    }
  }
}

const SingularTriples& BlockOperatorMatrix::triples() const {
  std::call_once(cache_->once, [this] {
    SingularTriples& t = cache_->triples;
    if (dense_.size() == 0) {
      t.values = RVector(0);
      t.left = CMatrix(dense_.rows(), 0);
      t.right = CMatrix(dense_.cols(), 0);
      return;
    }
    DenseSvd svd = dense_svd(dense_, true, true);
    t.values = std::move(svd.values);
    t.left = std::move(svd.left);
    t.right = std::move(svd.right);
  });
  return cache_->triples;
}

BlockOperatorMatrix hankel_truncation(const MatFun& symbol) {
  const int K = std::max(0, -symbol.min_degree());
  return hankel_truncation(symbol, K);
}

BlockOperatorMatrix hankel_truncation(const MatFun& symbol, int trunc) {
  return BlockOperatorMatrix(OperatorKind::Hankel, symbol, trunc, trunc);
}

BlockOperatorMatrix toeplitz_truncation(const MatFun& symbol, int trunc) {
  if (trunc < symbol.band()) {
    throw Error(ErrorKind::Bandwidth, "Toeplitz truncation " + std::to_string(trunc) +
                                          " below symbol bandwidth " +
                                          std::to_string(symbol.band()));
  }
  return BlockOperatorMatrix(OperatorKind::Toeplitz, symbol, trunc, trunc);
}

BlockOperatorMatrix toeplitz_section(const MatFun& symbol, int trunc) {
  const int up = std::max(0, symbol.max_degree());
  return BlockOperatorMatrix(OperatorKind::Toeplitz, symbol, trunc, trunc + up);
}

SingularTriples singular_triples(const BlockOperatorMatrix& op) { return op.triples(); }

double operator_norm(const BlockOperatorMatrix& op) {
  const auto& t = op.triples();
  return t.values.size() == 0 ? 0.0 : t.values(0);
}

RVector hankel_singular_values(const MatFun& symbol) {
  const BlockOperatorMatrix h = hankel_truncation(symbol);
  if (h.dense().size() == 0) return RVector(0);
  return dense_svd(h.dense(), false, false).values;
}

EssentialNormNote essential_norm_note(const MatFun& symbol) {
  EssentialNormNote out;
  out.value = 0.0;
  out.note = "symbol is a trigonometric polynomial of band " + std::to_string(symbol.band()) +
             ", hence continuous; its Hankel operator has finite rank and essential norm 0";
  return out;
}

MatFun polynomial_vector(const CVector& stacked, Index n) {
  return unstack_coefficients(CMatrix(stacked), n);
}

MatFun trim_tail(const MatFun& f, double eps) {
  MatFun::CoeffMap coeffs = f.coeffs();
  double dropped = 0.0;
  while (!coeffs.empty()) {
    auto lo = coeffs.begin();
    auto hi = std::prev(coeffs.end());
    const double nlo = lo->second.norm();
    const double nhi = hi->second.norm();
    auto victim = nlo <= nhi ? lo : hi;
    const double nv = std::min(nlo, nhi);
    if (dropped + nv > eps) break;
    dropped += nv;
    coeffs.erase(victim);
  }
  return MatFun::from_map(f.rows(), f.cols(), std::move(coeffs),
                          f.truncation_residual() + dropped);
}

namespace {

struct SectionKernel {
  CMatrix vectors;  // stacked coefficient columns
  double threshold = 0.0;
};

SectionKernel section_kernel(const MatFun& symbol, int trunc, double tol) {
  const BlockOperatorMatrix op = toeplitz_section(symbol, trunc);
  const CMatrix& a = op.dense();
  SectionKernel out;
  const Index cols = a.cols();
  if (cols == 0) {
    out.vectors = CMatrix(0, 0);
    return out;
  }
  if (a.rows() == 0) {
    out.vectors = CMatrix::Identity(cols, cols);
    return out;
  }
  const DenseSvd svd = dense_svd(a, false, true);
  const RVector& s = svd.values;
  const double smax = s.size() ? s(0) : 0.0;
  out.threshold = std::max({tol * smax, tol::rank, 100.0 * symbol.truncation_residual()});
  Index rank = 0;
  while (rank < s.size() && s(rank) >= out.threshold) ++rank;
  out.vectors = svd.right.rightCols(cols - rank);
  return out;
}

std::vector<MatFun> to_functions(const CMatrix& vectors, Index n) {
  std::vector<MatFun> out;
  if (vectors.cols() == 0) return out;
  const CMatrix gauged = vectors * echelon_gauge(vectors);
  for (Index j = 0; j < gauged.cols(); ++j) out.push_back(polynomial_vector(gauged.col(j), n));
  return out;
}

}  // namespace

KernelResult kernel_basis(const BlockOperatorMatrix& op, double tol) {
  if (op.kind() != OperatorKind::Toeplitz) {
    throw Error(ErrorKind::InvalidInput, "kernel_basis expects a Toeplitz section");
  }
  const MatFun symbol = trim_tail(op.symbol());
  const int K = symbol.band();
  const int start = std::max(op.trunc(), 1);
  const int cap = std::max(start + 4, K + 64);
  std::vector<int> dims;
  std::vector<CMatrix> vecs;
  for (int T = start; T <= cap + 4; T += 2) {
    SectionKernel sk = section_kernel(symbol, T, tol);
    dims.push_back(static_cast<int>(sk.vectors.cols()));
    vecs.push_back(std::move(sk.vectors));
    const size_t s = dims.size();
    if (s >= 3 && dims[s - 1] == dims[s - 2] && dims[s - 2] == dims[s - 3]) {
      KernelResult out;
      out.trunc = T - 4;
      out.basis = to_functions(vecs[s - 3], symbol.cols());
      return out;
    }
  }
  throw Error(ErrorKind::TruncationInstability,
              "kernel dimension did not stabilize up to section " + std::to_string(cap));
}

std::vector<MatFun> section_kernel_basis(const MatFun& symbol, int trunc, double tol) {
  return to_functions(section_kernel(symbol, trunc, tol).vectors, symbol.cols());
}

int kernel_dimension(const MatFun& symbol, double tol) {
  const MatFun s = trim_tail(symbol);
  return static_cast<int>(kernel_basis(toeplitz_section(s, s.band() + 8), tol).basis.size());
}

int toeplitz_index(const MatFun& symbol, double tol) {
  if (symbol.rows() != symbol.cols()) {
    throw Error(ErrorKind::InvalidInput, "Toeplitz index needs a square symbol");
  }
  const double defect = unitarity_defect(symbol.samples(default_grid_size(symbol.band())));
  if (defect > tol::unitary) {
    throw Error(ErrorKind::NotUnitary, "symbol is not unitary-valued", defect);
  }
  return kernel_dimension(symbol, tol) - kernel_dimension(symbol.adjoint(), tol);
}

}  // namespace superopt
