#include "superopt/linalg.hpp"

#include <cmath>

namespace superopt {

CMatrix echelon_gauge(const CMatrix& Q, double pivot_tol) {
  const Index d = Q.cols();
  CMatrix W(d, 0);
  for (Index i = 0; i < Q.rows() && W.cols() < d; ++i) {
    CVector r = Q.row(i).adjoint();
    if (W.cols() > 0) {
      // Two passes of Gram-Schmidt keep W orthonormal to rounding.
      r -= W * (W.adjoint() * r);
      r -= W * (W.adjoint() * r);
    }
    const double nr = r.norm();
    if (nr > pivot_tol) {
      W.conservativeResize(d, W.cols() + 1);
      W.col(W.cols() - 1) = r / nr;
    }
  }
  if (W.cols() < d) {
    // Rank-deficient rows: complete with an orthonormal complement.
    Eigen::HouseholderQR<CMatrix> qr(W);
    CMatrix full = qr.householderQ() * CMatrix::Identity(d, d);
    CMatrix rest = full.rightCols(d - W.cols());
    W.conservativeResize(d, d);
    W.rightCols(rest.cols()) = rest;
  }
  return W;
}

namespace {

template <class Svd>
DenseSvd unpack(const Svd& svd, bool want_left, bool want_right) {
  DenseSvd out;
  out.values = svd.singularValues();
  if (want_left) out.left = svd.matrixU();
  if (want_right) out.right = svd.matrixV();
  return out;
}

bool plausible(const CMatrix& a, const DenseSvd& d) {
  if (!d.values.allFinite() || !d.left.allFinite() || !d.right.allFinite()) return false;
  const double fro = a.norm();
  const double tol = 1e-10 * std::max(fro, 1e-300);
  if (std::abs(d.values.norm() - fro) > tol) return false;
  if (d.left.size() && d.right.size()) {
    const Index k = d.values.size();
    const CMatrix r = a * d.right.leftCols(k) - d.left.leftCols(k) * d.values.asDiagonal();
    if (r.norm() > tol) return false;
  }
  return true;
}

}  // namespace

DenseSvd dense_svd(const CMatrix& a, bool want_left, bool want_right) {
  const unsigned flags =
      (want_left ? unsigned(Eigen::ComputeFullU) : 0u) | (want_right ? unsigned(Eigen::ComputeFullV) : 0u);
  DenseSvd out = unpack(Eigen::BDCSVD<CMatrix>(a, flags), want_left, want_right);
  if (plausible(a, out)) return out;
  return unpack(Eigen::JacobiSVD<CMatrix>(a, flags), want_left, want_right);
}

CMatrix polar_unitary(const CMatrix& M) {
  Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

CMatrix random_gaussian(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      out(i, j) = Complex(re, im);
    }
  return out;
}

CMatrix random_unitary(std::mt19937_64& rng, Index n) {
  CMatrix g = random_gaussian(rng, n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

CMatrix stack_coefficients(const MatFun& f, int D) {
  const Index n = f.rows();
  CMatrix out = CMatrix::Zero(n * (D + 1), f.cols());
  for (const auto& [k, c] : f.coeffs()) {
    if (k < 0 || k > D) continue;
    out.block(k * n, 0, n, f.cols()) = c;
  }
  return out;
}

MatFun unstack_coefficients(const CMatrix& stacked, Index n) {
  std::vector<std::pair<int, CMatrix>> entries;
  const Index blocks = stacked.rows() / n;
  for (Index k = 0; k < blocks; ++k) {
    entries.emplace_back(static_cast<int>(k), stacked.block(k * n, 0, n, stacked.cols()));
  }
  return MatFun::from_coeffs(n, stacked.cols(), entries);
}

MatFun phase_canonical(const MatFun& f) {
  for (const auto& [k, c] : f.coeffs()) {
    for (Index j = 0; j < c.cols(); ++j)
      for (Index i = 0; i < c.rows(); ++i)
        if (std::abs(c(i, j)) >= tol::prune) {
          const Complex z = c(i, j);
          return f.scaled(std::conj(z) / std::abs(z));
        }
  }
  return f;
}

}  // namespace superopt
