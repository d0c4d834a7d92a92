#pragma once

#include <cmath>
#include <functional>
#include <initializer_list>
#include <random>
#include <vector>

#include <unsupported/Eigen/Polynomials>

#include "superopt/laurent.hpp"

namespace test_support {

using superopt::CMatrix;
using superopt::Complex;
using superopt::Index;
using superopt::MatFun;

inline const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

inline CMatrix mat(std::initializer_list<std::initializer_list<Complex>> rows) {
  const Index m = static_cast<Index>(rows.size());
  const Index n = static_cast<Index>(rows.begin()->size());
  CMatrix out(m, n);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (const auto& v : row) out(i, j++) = v;
    ++i;
  }
  return out;
}

inline CMatrix one(Complex v) { return CMatrix::Constant(1, 1, v); }

// Scalar Laurent polynomial from (degree, coefficient) pairs.
inline MatFun scalar(std::initializer_list<std::pair<int, Complex>> terms) {
  std::vector<std::pair<int, CMatrix>> entries;
  for (const auto& [k, c] : terms) entries.emplace_back(k, one(c));
  return MatFun::from_coeffs(1, 1, entries);
}

inline MatFun diag2(const MatFun& a, const MatFun& b) {
  MatFun::CoeffMap out;
  for (const auto& [k, c] : a.coeffs()) {
    auto& slot = out.try_emplace(k, CMatrix::Zero(2, 2)).first->second;
    slot(0, 0) = c(0, 0);
  }
  for (const auto& [k, c] : b.coeffs()) {
    auto& slot = out.try_emplace(k, CMatrix::Zero(2, 2)).first->second;
    slot(1, 1) = c(0, 0);
  }
  return MatFun::from_map(2, 2, out);
}

inline CMatrix rotation(double angle) {
  return mat({{std::cos(angle), -std::sin(angle)}, {std::sin(angle), std::cos(angle)}});
}

inline MatFun random_matfun(std::mt19937_64& rng, Index m, Index n, int kmin, int kmax,
                            double scale = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::pair<int, CMatrix>> entries;
  for (int k = kmin; k <= kmax; ++k) {
    CMatrix c(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) c(i, j) = scale * Complex(u(rng), u(rng)) / std::sqrt(2.0);
    entries.emplace_back(k, c);
  }
  return MatFun::from_coeffs(m, n, entries);
}

// Blaschke factor (z - a)/(1 - conj(a) z) sampled and truncated.
inline MatFun blaschke(Complex a, int band = 64) {
  const int N = 1024;
  superopt::Grid g(N);
  for (int l = 0; l < N; ++l) {
    const Complex z = std::polar(1.0, 2.0 * M_PI * l / N);
    g[l] = one((z - a) / (1.0 - std::conj(a) * z));
  }
  return MatFun::from_samples(g, 0, band);
}

inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Largest coefficient difference between two functions.
inline double coeff_diff(const MatFun& a, const MatFun& b) {
  const MatFun diff = a - b;
  double d = 0.0;
  for (const auto& [k, c] : diff.coeffs()) d = std::max(d, c.cwiseAbs().maxCoeff());
  return d;
}

}  // namespace test_support

namespace test_support {

// Polynomial inner column of degree <= d: first column of a product of
// elementary paraunitary factors I - P + zP with random rank-one P.
inline MatFun random_inner_column(std::mt19937_64& rng, Index n, int d, Index cols = 1) {
  std::normal_distribution<double> nd(0.0, 1.0);
  auto rand_vec = [&] {
    superopt::CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = Complex(nd(rng), nd(rng));
    return superopt::CVector(v / v.norm());
  };
  CMatrix g(n, n);
  for (Index j = 0; j < n; ++j) g.col(j) = rand_vec();
  const CMatrix u0 = Eigen::HouseholderQR<CMatrix>(g).householderQ() * CMatrix::Identity(n, n);
  MatFun v = MatFun::constant(u0);
  for (int k = 0; k < d; ++k) {
    const superopt::CVector x = rand_vec();
    const CMatrix p = x * x.adjoint();
    const MatFun factor = MatFun::from_coeffs(n, n, {{0, CMatrix::Identity(n, n) - p}, {1, p}});
    v = superopt::mat_multiply(v, factor);
  }
  return v.block(0, 0, n, cols);
}

// Inner column with an outer entry, hence co-outer. The other entries are
// random polynomials kept below norm one on the circle; the outer entry is the
// spectral factor of what is left. A random constant unitary mixes the rows.
inline MatFun random_co_outer_column(std::mt19937_64& rng, Index n, int d) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> level(0.3, 0.9);
  using superopt::CVector;
  std::vector<CVector> a(n - 1, CVector(d + 1));
  for (auto& e : a)
    for (int k = 0; k <= d; ++k) e(k) = Complex(nd(rng), nd(rng));
  auto eval = [](const CVector& c, Complex z) {
    Complex v = 0.0;
    for (Index k = c.size(); k-- > 0;) v = v * z + c(k);
    return v;
  };
  double sup = 0.0;
  for (int l = 0; l < 512; ++l) {
    const Complex z = std::polar(1.0, 2 * M_PI * l / 512);
    double s2 = 0.0;
    for (const auto& e : a) s2 += std::norm(eval(e, z));
    sup = std::max(sup, std::sqrt(s2));
  }
  const double scale = level(rng) / sup;
  for (auto& e : a) e *= scale;

  // z^d (1 - sum |a_i|^2) as an ordinary polynomial of degree 2d.
  CVector p = CVector::Zero(2 * d + 1);
  p(d) = 1.0;
  for (const auto& e : a)
    for (int k = -d; k <= d; ++k)
      for (int j = std::max(0, -k); j <= d && j + k <= d; ++j) p(k + d) -= e(j + k) * std::conj(e(j));
  CVector h = CVector::Zero(d + 1);
  h(0) = 1.0;
  if (d > 0) {
    Eigen::PolynomialSolver<Complex, Eigen::Dynamic> solver(p);
    std::vector<Complex> roots(solver.roots().data(), solver.roots().data() + 2 * d);
    std::sort(roots.begin(), roots.end(), [](Complex x, Complex y) { return std::abs(x) > std::abs(y); });
    for (int j = 0; j < d; ++j) {
      CVector next = CVector::Zero(d + 1);
      for (int k = 0; k < d; ++k) {
        next(k) -= roots[j] * h(k);
        next(k + 1) += h(k);
      }
      h = next;
    }
  }
  double rest = 1.0;
  for (const auto& e : a) rest -= std::norm(eval(e, 1.0));
  h *= std::sqrt(rest) / std::abs(eval(h, 1.0));

  CMatrix c = CMatrix::Zero(n, d + 1);
  for (Index i = 0; i + 1 < n; ++i) c.row(i) = a[i].transpose();
  c.row(n - 1) = h.transpose();
  CMatrix g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = Complex(nd(rng), nd(rng));
  const CMatrix u = Eigen::HouseholderQR<CMatrix>(g).householderQ() * CMatrix::Identity(n, n);
  std::vector<std::pair<int, CMatrix>> entries;
  for (int k = 0; k <= d; ++k) entries.emplace_back(k, u * c.col(k));
  return MatFun::from_coeffs(n, 1, entries);
}

// Sampled determinant of the submatrix with the given rows and columns.
inline MatFun minor_function(const MatFun& v, const std::vector<Index>& rows,
                             const std::vector<Index>& cols, int N = 1024) {
  const superopt::Grid& g = v.samples(N);
  superopt::Grid out(N);
  for (int l = 0; l < N; ++l) {
    CMatrix sub(rows.size(), cols.size());
    for (size_t i = 0; i < rows.size(); ++i)
      for (size_t j = 0; j < cols.size(); ++j) sub(i, j) = g[l](rows[i], cols[j]);
    out[l] = one(sub.determinant());
  }
  return MatFun::from_samples(out, N / 4 - 1);
}

inline std::vector<std::vector<Index>> subsets(Index n, Index k) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> cur;
  std::function<void(Index)> rec = [&](Index start) {
    if (static_cast<Index>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (Index i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

}  // namespace test_support
