#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "superopt/common.hpp"

namespace superopt {

/**
 * Matrix-valued Laurent polynomial on the unit circle.
 *
 * Coefficients are the ground truth. Grid samples at the N-th roots of unity
 * are computed on demand and cached per N; the cache is shared between copies
 * and filled at most once per grid size, so a MatFun can be read from several
 * threads.
 *
 * Functions that are only known through samples (rational intermediates) are
 * stored as band-limited truncations together with the summed norm of the
 * discarded coefficients, which bounds the sup-norm truncation error.
 */
class MatFun {
 public:
  using CoeffMap = std::map<int, CMatrix>;

  MatFun() : MatFun(0, 0) {}
  MatFun(Index rows, Index cols);

  // Merges repeated k by summation and prunes negligible coefficients.
  static MatFun from_coeffs(Index rows, Index cols,
                            const std::vector<std::pair<int, CMatrix>>& entries);
  static MatFun from_map(Index rows, Index cols, CoeffMap coeffs, double residual = 0.0);
  static MatFun constant(const CMatrix& c);
  static MatFun monomial(int k, const CMatrix& c);
  static MatFun identity(Index n);
  static MatFun zero(Index rows, Index cols) { return MatFun(rows, cols); }

  // Keeps |k| <= band (or the given degree window) from a sampled function.
  static MatFun from_samples(const Grid& samples, int band);
  static MatFun from_samples(const Grid& samples, int lo, int hi);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }
  bool is_zero() const { return coeffs_.empty(); }

  const CoeffMap& coeffs() const { return coeffs_; }
  CMatrix coeff(int k) const;
  int band() const;
  int min_degree() const;
  int max_degree() const;
  double truncation_residual() const { return residual_; }

  const Grid& samples(int N) const;
  CMatrix at(Complex z) const;

  MatFun adjoint() const;
  MatFun transpose() const;
  MatFun conj() const;
  MatFun analytic_part() const;
  MatFun antianalytic_part() const;
  MatFun shifted(int s) const;
  MatFun scaled(Complex c) const;
  MatFun block(Index r0, Index c0, Index nr, Index nc) const;
  MatFun with_residual(double residual) const;

  MatFun operator+(const MatFun& other) const;
  MatFun operator-(const MatFun& other) const;

 private:
  struct GridCache;

  Index rows_;
  Index cols_;
  CoeffMap coeffs_;
  double residual_ = 0.0;
  std::shared_ptr<GridCache> cache_;
};

struct PointSvd {
  RVector s;
  CMatrix u;
  CMatrix v;
};

MatFun from_coeffs(Index m, Index n, const std::vector<std::pair<int, CMatrix>>& entries);
Grid evaluate_grid(const MatFun& f, int N);
MatFun::CoeffMap fourier_coeffs(const Grid& samples, int band);
MatFun mat_multiply(const MatFun& f, const MatFun& g);
MatFun hstack(const MatFun& a, const MatFun& b);
MatFun vstack(const MatFun& a, const MatFun& b);
MatFun adjoint(const MatFun& f);
MatFun transpose(const MatFun& f);
MatFun conj(const MatFun& f);
std::vector<PointSvd> pointwise_svd(const MatFun& f, int N);
int winding_number(const MatFun& u, int N);
double analyticity_defect(const MatFun& f);
double coanalyticity_defect(const MatFun& f);

bool is_power_of_two(int N);
int next_power_of_two(int x);
int default_grid_size(int band);

// Largest pointwise spectral norm over the grid.
double sup_norm(const Grid& g);
double sup_norm(const MatFun& f, int N);
// Largest pointwise spectral norm of f*f - I (or f f* - I when wide).
double unitarity_defect(const Grid& g);
// Summed Frobenius norm of Fourier coefficients of the samples outside [lo, hi].
double tail_norm(const Grid& samples, int lo, int hi);

// Pointwise grid arithmetic.
Grid grid_multiply(const Grid& a, const Grid& b);
Grid grid_adjoint(const Grid& a);
Grid grid_transpose(const Grid& a);
Grid grid_conj(const Grid& a);
Grid grid_add(const Grid& a, const Grid& b, Complex scale_b = 1.0);
Grid grid_scale(const Grid& a, Complex s);
double grid_max_diff(const Grid& a, const Grid& b);

}  // namespace superopt
