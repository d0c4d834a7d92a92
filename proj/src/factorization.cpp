#include "superopt/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <unsupported/Eigen/Polynomials>

#include "superopt/hankel_toeplitz.hpp"
#include "superopt/linalg.hpp"

namespace superopt {

namespace {

constexpr double kGramZero = 1e-8;
constexpr double kConverged = 1e-11;
constexpr int kDegreeStep = 16;
constexpr int kDegreeReach = 400;

// Orthonormal columns spanning {Q^* e_j} projections, rescaled to an
// orthonormal basis of the wandering subspace and gauge-fixed.
CMatrix wandering_from_projections(const CMatrix& Y, const CMatrix& gram, Index keep) {
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
  const Index n = gram.rows();
  const RVector& lam = eig.eigenvalues();  // ascending
  CMatrix basis = Y * eig.eigenvectors().rightCols(keep);
  for (Index j = 0; j < keep; ++j) basis.col(j) /= std::sqrt(lam(n - keep + j));
  if (keep == 0) return basis;
  return basis * echelon_gauge(basis);
}

Index gram_rank(const RVector& lam) {
  Index r = 0;
  for (Index i = 0; i < lam.size(); ++i)
    if (lam(i) > kGramZero) ++r;
  return r;
}

struct Converged {
  MatFun f;
  double diff = 0.0;
};

// Recomputes at growing degree caps until consecutive results agree.
Converged converge(const std::function<MatFun(int)>& compute, int D0) {
  MatFun prev = compute(D0);
  double diff = 0.0;
  for (int D = D0 + kDegreeStep; D <= D0 + kDegreeReach; D += kDegreeStep) {
    MatFun next = compute(D);
    if (next.cols() != prev.cols()) {
      prev = next;
      diff = std::numeric_limits<double>::infinity();
      continue;
    }
    diff = 0.0;
    const MatFun delta = next - prev;
    for (const auto& [k, c] : delta.coeffs()) diff += c.norm();
    if (diff <= kConverged) return {next, diff};
    prev = next;
  }
  if (diff <= tol::truncation_budget) return {prev, diff};
  throw Error(ErrorKind::Truncation,
              "subspace computation did not converge in the degree cap", diff);
}

}  // namespace

MatFun fejer_riesz_outer(const MatFun& t, double tol) {
  if (t.rows() != 1 || t.cols() != 1) {
    throw Error(ErrorKind::InvalidInput, "Fejer-Riesz needs a scalar function");
  }
  if (t.is_zero()) throw Error(ErrorKind::ZeroInput, "Fejer-Riesz of the zero function");
  const Grid& g = t.samples(default_grid_size(t.band()));
  double tmax = 0.0, tmin = std::numeric_limits<double>::infinity();
  for (const auto& x : g) {
    tmax = std::max(tmax, x(0, 0).real());
    tmin = std::min(tmin, x(0, 0).real());
  }
  if (tmin < -tol * std::max(1.0, tmax)) {
    throw Error(ErrorKind::NotNonnegative, "weight is negative on the circle", -tmin);
  }
  // Hermitian part of the coefficients: t_{-k} = conj(t_k).
  int K = 0;
  for (const auto& [k, c] : t.coeffs())
    if (std::abs(c(0, 0)) > 1e-14 * tmax) K = std::max(K, std::abs(k));
  auto sym = [&](int k) {
    return 0.5 * (t.coeff(k)(0, 0) + std::conj(t.coeff(-k)(0, 0)));
  };
  if (K == 0) {
    const double c0 = std::sqrt(std::max(0.0, sym(0).real()));
    return MatFun::constant(CMatrix::Constant(1, 1, c0));
  }
  Eigen::VectorXcd poly(2 * K + 1);
  for (int j = 0; j <= 2 * K; ++j) poly(j) = sym(j - K);
  Eigen::PolynomialSolver<Complex, Eigen::Dynamic> solver(poly);
  const auto& roots = solver.roots();

  std::vector<Complex> outer, boundary;
  for (Index i = 0; i < roots.size(); ++i) {
    const double r = std::abs(roots(i));
    if (r > 1.0 + 1e-6) {
      outer.push_back(roots(i));
    } else if (r >= 1.0 - 1e-6) {
      boundary.push_back(roots(i));
    }
  }
  // Even-order zeros on the circle: one root per pair goes to the outer factor.
  std::vector<bool> used(boundary.size(), false);
  for (size_t i = 0; i < boundary.size(); ++i) {
    if (used[i]) continue;
    std::vector<size_t> cluster{i};
    used[i] = true;
    for (size_t j = i + 1; j < boundary.size(); ++j)
      if (!used[j] && std::abs(boundary[j] - boundary[i]) < 1e-3) {
        cluster.push_back(j);
        used[j] = true;
      }
    if (cluster.size() % 2 != 0) {
      throw Error(ErrorKind::NotNonnegative, "odd-order zero of the weight on the circle");
    }
    Complex mean = 0.0;
    for (size_t j : cluster) mean += boundary[j];
    mean /= static_cast<double>(cluster.size());
    mean /= std::abs(mean);
    for (size_t j = 0; j < cluster.size() / 2; ++j) outer.push_back(mean);
  }
  if (static_cast<int>(outer.size()) != K) {
    // Fall back to the K roots of largest modulus.
    std::vector<Complex> all(roots.data(), roots.data() + roots.size());
    std::sort(all.begin(), all.end(),
              [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
    outer.assign(all.begin(), all.begin() + K);
  }

  std::vector<Complex> h{1.0};
  for (Complex a : outer) {
    std::vector<Complex> next(h.size() + 1, 0.0);
    for (size_t j = 0; j < h.size(); ++j) {
      next[j] -= a * h[j];
      next[j + 1] += h[j];
    }
    h = std::move(next);
  }
  // Scale so that |h|^2 matches t in mean, then make h(0) real positive.
  double th = 0.0, hh = 0.0;
  const int N = static_cast<int>(g.size());
  for (int l = 0; l < N; ++l) {
    const Complex z = std::polar(1.0, 2.0 * M_PI * l / N);
    Complex v = 0.0;
    for (size_t j = h.size(); j-- > 0;) v = v * z + h[j];
    th += g[l](0, 0).real();
    hh += std::norm(v);
  }
  Complex scale = std::sqrt(th / hh);
  if (std::abs(h[0]) > 0) scale *= std::conj(h[0]) / std::abs(h[0]);
  std::vector<std::pair<int, CMatrix>> entries;
  for (size_t j = 0; j < h.size(); ++j)
    entries.emplace_back(static_cast<int>(j), CMatrix::Constant(1, 1, scale * h[j]));
  return MatFun::from_coeffs(1, 1, entries);
}

InnerOuter column_inner_outer(const MatFun& f, double tol, int band) {
  if (f.cols() != 1) throw Error(ErrorKind::InvalidInput, "column_inner_outer needs a column");
  if (f.is_zero()) throw Error(ErrorKind::ZeroInput, "column_inner_outer of the zero function");
  if (analyticity_defect(f) > tol) {
    throw Error(ErrorKind::InvalidInput, "column is not analytic", analyticity_defect(f));
  }
  const MatFun t = mat_multiply(f.adjoint(), f);
  const MatFun h = fejer_riesz_outer(t, tol);
  const int N = default_grid_size(std::max(band, f.band()));
  const Grid& fs = f.samples(N);
  const Grid& hs = h.samples(N);
  Grid q(N);
  for (int l = 0; l < N; ++l) q[l] = fs[l] / hs[l](0, 0);
  MatFun theta = MatFun::from_samples(q, 0, band);
  if (theta.truncation_residual() > tol::truncation_budget) {
    throw Error(ErrorKind::Truncation, "inner factor does not fit the band",
                theta.truncation_residual());
  }
  return {theta, h};
}

SubspaceBasis minimal_z_invariant_subspace(const std::vector<MatFun>& generators, int degree_cap) {
  if (generators.empty()) throw Error(ErrorKind::InvalidInput, "no generators");
  SubspaceBasis M;
  M.ambient_dim = generators.front().rows();
  M.degree_cap = degree_cap;
  M.generators = generators;
  const Index n = M.ambient_dim;
  std::vector<CMatrix> cols;
  for (const auto& g : generators) {
    if (g.rows() != n || g.cols() != 1) {
      throw Error(ErrorKind::InvalidInput, "generators must be columns of equal height");
    }
    const int d = std::max(0, g.max_degree());
    if (d > degree_cap) {
      throw Error(ErrorKind::InvalidInput, "degree cap below generator degree");
    }
    const CMatrix s = stack_coefficients(g, degree_cap);
    for (int k = 0; k + d <= degree_cap; ++k) {
      CMatrix shifted = CMatrix::Zero(s.rows(), 1);
      shifted.bottomRows(s.rows() - k * n) = s.topRows(s.rows() - k * n);
      cols.push_back(shifted);
    }
  }
  CMatrix A(n * (degree_cap + 1), static_cast<Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) A.col(static_cast<Index>(j)) = cols[j];
  // Shifted copies repeat singular values heavily, which divide-and-conquer SVD
  // handles poorly; a pivoted QR is exact enough for a range basis.
  Eigen::ColPivHouseholderQR<CMatrix> qr(A);
  qr.setThreshold(1e-10);
  const Index rank = qr.rank();
  M.orthonormal_cols = qr.householderQ() * CMatrix::Identity(A.rows(), rank);
  return M;
}

MatFun wandering_basis(const SubspaceBasis& M, Index expected_rank) {
  const Index n = M.ambient_dim;
  const CMatrix& Q = M.orthonormal_cols;
  const CMatrix top = Q.topRows(n);
  const CMatrix Y = Q * top.adjoint();
  const CMatrix gram = top * top.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
  const Index r = gram_rank(eig.eigenvalues());
  if (expected_rank >= 0 && r != expected_rank) {
    throw Error(ErrorKind::TruncationInstability,
                "wandering subspace has dimension " + std::to_string(r) + ", expected " +
                    std::to_string(expected_rank));
  }
  return unstack_coefficients(wandering_from_projections(Y, gram, r), n);
}

MatFun inner_from_generators(const std::vector<MatFun>& generators, Index n, Index expected_rank,
                             int degree_extra) {
  int maxdeg = 0;
  for (const auto& g : generators) maxdeg = std::max(maxdeg, g.max_degree());
  auto compute = [&](int D) {
    return wandering_basis(minimal_z_invariant_subspace(generators, D), expected_rank);
  };
  Converged c = converge(compute, maxdeg + degree_extra);
  if (c.f.rows() != n) throw Error(ErrorKind::InvalidInput, "generator height mismatch");
  return trim_tail(c.f.with_residual(c.diff));
}

BalancedPair make_balanced_pair(const MatFun& upsilon, const MatFun& theta) {
  BalancedPair p;
  p.upsilon = upsilon;
  p.theta = theta;
  p.r = upsilon.cols();
  p.v = theta.cols() == 0 ? upsilon : hstack(upsilon, theta.conj());
  return p;
}

BalancedPair balanced_completion(const MatFun& upsilon, double tol, int degree_extra) {
  const Index n = upsilon.rows();
  const Index r = upsilon.cols();
  if (n == 0 || r == 0 || r > n) {
    throw Error(ErrorKind::InvalidInput, "balanced completion needs 0 < r <= n");
  }
  const int N = default_grid_size(upsilon.band());
  const double defect = std::max(unitarity_defect(upsilon.samples(N)), analyticity_defect(upsilon));
  if (defect > tol) throw Error(ErrorKind::NotInner, "column block is not inner", defect);
  if (r == n) return make_balanced_pair(upsilon, MatFun(n, 0));

  const MatFun ubar = trim_tail(upsilon).conj();
  auto compute = [&](int D) {
    // Range of T applied with conj(upsilon) is the orthogonal complement of Ker T_{upsilon^t}.
    const CMatrix A = toeplitz_truncation(ubar, D + 1).dense();
    Eigen::HouseholderQR<CMatrix> qr(A);
    const CMatrix Q1 = qr.householderQ() * CMatrix::Identity(A.rows(), A.cols());
    const CMatrix top = Q1.topRows(n);
    CMatrix Y = -Q1 * top.adjoint();
    Y.topRows(n) += CMatrix::Identity(n, n);
    const CMatrix gram = CMatrix::Identity(n, n) - top * top.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
    const RVector& lam = eig.eigenvalues();
    if (lam(r) <= kGramZero || lam(r - 1) > 1e-6) {
      throw Error(ErrorKind::CompletionFailure,
                  "kernel of the transposed block does not have the expected size", lam(r));
    }
    return unstack_coefficients(wandering_from_projections(Y, gram, n - r), n);
  };
  Converged c = converge(compute, ubar.band() + degree_extra);
  return make_balanced_pair(upsilon, trim_tail(c.f.with_residual(c.diff)));
}

bool is_co_outer(const MatFun& f, double tol) {
  const MatFun s = trim_tail(f).conj();
  return kernel_basis(toeplitz_section(s, s.band() + 8), tol).basis.empty();
}

MatFun strip_common_zeros(const MatFun& f, double tol) {
  if (f.cols() != 1) throw Error(ErrorKind::InvalidInput, "strip_common_zeros needs a column");
  if (f.is_zero()) return f;
  if (f.min_degree() < 0) throw Error(ErrorKind::InvalidInput, "column is not a polynomial");
  const Index n = f.rows();
  int d = f.max_degree();
  std::vector<CVector> ent(n, CVector::Zero(d + 1));
  for (const auto& [k, c] : f.coeffs())
    for (Index i = 0; i < n; ++i) ent[i](k) = c(i, 0);

  for (;;) {
    Index lead = 0;
    for (Index i = 1; i < n; ++i)
      if (ent[i].norm() > ent[lead].norm()) lead = i;
    const CVector& p = ent[lead];
    int deg = d;
    while (deg > 0 && std::abs(p(deg)) <= 1e-13 * p.norm()) --deg;
    if (deg == 0) break;
    Eigen::PolynomialSolver<Complex, Eigen::Dynamic> solver(CVector(p.head(deg + 1)));
    const auto& roots = solver.roots();

    // Residual of every entry at a relative to the Cauchy-Schwarz bound.
    auto shared = [&](Complex a) {
      double powers = 0.0;
      for (int k = 0; k <= d; ++k) powers += std::pow(std::abs(a), 2 * k);
      double worst = 0.0;
      for (const auto& e : ent) {
        Complex v = 0.0;
        for (int k = d; k >= 0; --k) v = v * a + e(k);
        const double scale = e.norm() * std::sqrt(powers);
        if (scale > 0.0) worst = std::max(worst, std::abs(v) / scale);
      }
      return worst <= tol;
    };
    Index pick = -1;
    for (Index j = 0; j < roots.size() && pick < 0; ++j)
      if (std::abs(roots(j)) < 1.0 - 1e-6 && shared(roots(j))) pick = j;
    if (pick < 0) break;

    const Complex a = roots(pick);
    for (auto& e : ent) {
      CVector q = CVector::Zero(d);
      Complex carry = 0.0;
      for (int k = d; k >= 1; --k) {
        carry = e(k) + a * carry;
        q(k - 1) = carry;
      }
      e = q;
    }
    --d;
    if (d == 0) break;
  }

  std::vector<std::pair<int, CMatrix>> entries;
  for (int k = 0; k <= d; ++k) {
    CMatrix c(n, 1);
    for (Index i = 0; i < n; ++i) c(i, 0) = ent[i](k);
    entries.emplace_back(k, c);
  }
  return MatFun::from_coeffs(n, 1, entries);
}

}  // namespace superopt
