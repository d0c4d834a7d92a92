#include "superopt/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace superopt {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::Bandwidth: return "bandwidth";
    case ErrorKind::DegenerateSymbol: return "degenerate-symbol";
    case ErrorKind::TruncationInstability: return "truncation-instability";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::NotUnitary: return "not-unitary";
    case ErrorKind::NotInner: return "not-inner";
    case ErrorKind::NotNonnegative: return "not-nonnegative";
    case ErrorKind::ZeroInput: return "zero-input";
    case ErrorKind::CompletionFailure: return "completion-failure";
    case ErrorKind::AlreadyAnalytic: return "already-analytic";
    case ErrorKind::DegenerateMaximizer: return "degenerate-maximizer";
    case ErrorKind::AmbiguousMultiplicity: return "ambiguous-multiplicity";
    case ErrorKind::InternalConsistency: return "internal-consistency";
    case ErrorKind::Inconsistency: return "inconsistency";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Schema: return "schema";
  }
  return "unknown";
}

struct MatFun::GridCache {
  std::mutex mu;
  std::map<int, std::shared_ptr<const Grid>> grids;
};

namespace {

void prune(MatFun::CoeffMap& coeffs) {
  for (auto it = coeffs.begin(); it != coeffs.end();) {
    if (it->second.size() == 0 || it->second.cwiseAbs().maxCoeff() < tol::prune) {
      it = coeffs.erase(it);
    } else {
      ++it;
    }
  }
}

int wrap(int k, int N) { return ((k % N) + N) % N; }

// Fourier coefficients of every entry, indexed by k mod N.
std::vector<CMatrix> all_coefficients(const Grid& samples) {
  const int N = static_cast<int>(samples.size());
  const Index m = samples.front().rows();
  const Index n = samples.front().cols();
  std::vector<CMatrix> out(N, CMatrix::Zero(m, n));
  Eigen::FFT<double> fft;
  std::vector<Complex> in(N), spec(N);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      for (int l = 0; l < N; ++l) in[l] = samples[l](i, j);
      fft.fwd(spec, in);
      for (int l = 0; l < N; ++l) out[l](i, j) = spec[l] / static_cast<double>(N);
    }
  }
  return out;
}

}  // namespace

MatFun::MatFun(Index rows, Index cols)
    : rows_(rows), cols_(cols), cache_(std::make_shared<GridCache>()) {}

MatFun MatFun::from_coeffs(Index rows, Index cols,
                           const std::vector<std::pair<int, CMatrix>>& entries) {
  MatFun f(rows, cols);
  for (const auto& [k, c] : entries) {
    if (c.rows() != rows || c.cols() != cols) {
      throw Error(ErrorKind::InvalidInput, "coefficient " + std::to_string(k) + " has shape " +
                                               std::to_string(c.rows()) + "x" +
                                               std::to_string(c.cols()) + ", expected " +
                                               std::to_string(rows) + "x" + std::to_string(cols));
    }
    auto it = f.coeffs_.find(k);
    if (it == f.coeffs_.end()) {
      f.coeffs_.emplace(k, c);
    } else {
      it->second += c;
    }
  }
  prune(f.coeffs_);
  return f;
}

MatFun MatFun::from_map(Index rows, Index cols, CoeffMap coeffs, double residual) {
  MatFun f(rows, cols);
  for (const auto& [k, c] : coeffs) {
    if (c.rows() != rows || c.cols() != cols) {
      throw Error(ErrorKind::InvalidInput, "coefficient shape mismatch at k=" + std::to_string(k));
    }
  }
  f.coeffs_ = std::move(coeffs);
  prune(f.coeffs_);
  f.residual_ = residual;
  return f;
}

MatFun MatFun::constant(const CMatrix& c) { return from_coeffs(c.rows(), c.cols(), {{0, c}}); }

MatFun MatFun::monomial(int k, const CMatrix& c) {
  return from_coeffs(c.rows(), c.cols(), {{k, c}});
}

MatFun MatFun::identity(Index n) { return constant(CMatrix::Identity(n, n)); }

MatFun MatFun::from_samples(const Grid& samples, int band) {
  return from_samples(samples, -band, band);
}

MatFun MatFun::from_samples(const Grid& samples, int lo, int hi) {
  if (samples.empty()) throw Error(ErrorKind::InvalidInput, "no samples");
  const int N = static_cast<int>(samples.size());
  const int band = std::max(std::abs(lo), std::abs(hi));
  if (N < 4 * (band + 1)) {
    throw Error(ErrorKind::Bandwidth, "grid of " + std::to_string(N) + " points too small for band " +
                                          std::to_string(band));
  }
  const auto all = all_coefficients(samples);
  MatFun f(samples.front().rows(), samples.front().cols());
  double residual = 0.0;
  for (int k = -N / 2; k < N / 2; ++k) {
    const CMatrix& c = all[wrap(k, N)];
    if (k >= lo && k <= hi) {
      if (c.size() > 0 && c.cwiseAbs().maxCoeff() >= tol::prune) {
        f.coeffs_.emplace(k, c);
      } else if (c.size() > 0) {
        residual += c.norm();
      }
    } else if (c.size() > 0) {
      residual += c.norm();
    }
  }
  f.residual_ = residual;
  return f;
}

CMatrix MatFun::coeff(int k) const {
  auto it = coeffs_.find(k);
  if (it == coeffs_.end()) return CMatrix::Zero(rows_, cols_);
  return it->second;
}

int MatFun::band() const {
  if (coeffs_.empty()) return 0;
  return std::max(std::abs(coeffs_.begin()->first), std::abs(coeffs_.rbegin()->first));
}

int MatFun::min_degree() const { return coeffs_.empty() ? 0 : coeffs_.begin()->first; }
int MatFun::max_degree() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

const Grid& MatFun::samples(int N) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto it = cache_->grids.find(N);
  if (it != cache_->grids.end()) return *it->second;
  if (!is_power_of_two(N)) {
    throw Error(ErrorKind::Bandwidth, "grid size " + std::to_string(N) + " is not a power of two");
  }
  // Synthesis is exact as soon as distinct degrees do not alias.
  if (N < 2 * band() + 1) {
    throw Error(ErrorKind::Bandwidth, "grid of " + std::to_string(N) + " points too small for band " +
                                          std::to_string(band()));
  }
  auto grid = std::make_shared<Grid>(N, CMatrix::Zero(rows_, cols_));
  if (!coeffs_.empty() && rows_ > 0 && cols_ > 0) {
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);
    std::vector<Complex> spec(N), out(N);
    for (Index i = 0; i < rows_; ++i) {
      for (Index j = 0; j < cols_; ++j) {
        std::fill(spec.begin(), spec.end(), Complex(0.0));
        for (const auto& [k, c] : coeffs_) spec[wrap(k, N)] += c(i, j);
        fft.inv(out, spec);
        for (int l = 0; l < N; ++l) (*grid)[l](i, j) = out[l];
      }
    }
  }
  auto [pos, inserted] = cache_->grids.emplace(N, std::move(grid));
  return *pos->second;
}

CMatrix MatFun::at(Complex z) const {
  CMatrix out = CMatrix::Zero(rows_, cols_);
  for (const auto& [k, c] : coeffs_) out += std::pow(z, k) * c;
  return out;
}

MatFun MatFun::adjoint() const {
  MatFun f(cols_, rows_);
  for (const auto& [k, c] : coeffs_) f.coeffs_.emplace(-k, c.adjoint());
  f.residual_ = residual_;
  return f;
}

MatFun MatFun::transpose() const {
  MatFun f(cols_, rows_);
  for (const auto& [k, c] : coeffs_) f.coeffs_.emplace(k, c.transpose());
  f.residual_ = residual_;
  return f;
}

MatFun MatFun::conj() const {
  MatFun f(rows_, cols_);
  for (const auto& [k, c] : coeffs_) f.coeffs_.emplace(-k, c.conjugate());
  f.residual_ = residual_;
  return f;
}

MatFun MatFun::analytic_part() const {
  MatFun f(rows_, cols_);
  for (const auto& [k, c] : coeffs_)
    if (k >= 0) f.coeffs_.emplace(k, c);
  f.residual_ = residual_;
  return f;
}

MatFun MatFun::antianalytic_part() const {
  MatFun f(rows_, cols_);
  for (const auto& [k, c] : coeffs_)
    if (k < 0) f.coeffs_.emplace(k, c);
  f.residual_ = residual_;
  return f;
}

MatFun MatFun::shifted(int s) const {
  MatFun f(rows_, cols_);
  for (const auto& [k, c] : coeffs_) f.coeffs_.emplace(k + s, c);
  f.residual_ = residual_;
  return f;
}

MatFun MatFun::scaled(Complex s) const {
  MatFun f(rows_, cols_);
  for (const auto& [k, c] : coeffs_) f.coeffs_.emplace(k, s * c);
  prune(f.coeffs_);
  f.residual_ = std::abs(s) * residual_;
  return f;
}

MatFun MatFun::block(Index r0, Index c0, Index nr, Index nc) const {
  if (r0 < 0 || c0 < 0 || r0 + nr > rows_ || c0 + nc > cols_) {
    throw Error(ErrorKind::InvalidInput, "block out of range");
  }
  MatFun f(nr, nc);
  for (const auto& [k, c] : coeffs_) f.coeffs_.emplace(k, c.block(r0, c0, nr, nc));
  prune(f.coeffs_);
  f.residual_ = residual_;
  return f;
}

MatFun MatFun::with_residual(double residual) const {
  MatFun f = *this;
  f.residual_ = residual;
  return f;
}

MatFun MatFun::operator+(const MatFun& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw Error(ErrorKind::InvalidInput, "sum of differently shaped functions");
  }
  MatFun f(rows_, cols_);
  f.coeffs_ = coeffs_;
  for (const auto& [k, c] : other.coeffs_) {
    auto it = f.coeffs_.find(k);
    if (it == f.coeffs_.end()) {
      f.coeffs_.emplace(k, c);
    } else {
      it->second += c;
    }
  }
  prune(f.coeffs_);
  f.residual_ = residual_ + other.residual_;
  return f;
}

MatFun MatFun::operator-(const MatFun& other) const { return *this + other.scaled(-1.0); }

MatFun from_coeffs(Index m, Index n, const std::vector<std::pair<int, CMatrix>>& entries) {
  return MatFun::from_coeffs(m, n, entries);
}

Grid evaluate_grid(const MatFun& f, int N) { return f.samples(N); }

MatFun::CoeffMap fourier_coeffs(const Grid& samples, int band) {
  if (samples.empty()) throw Error(ErrorKind::InvalidInput, "no samples");
  const int N = static_cast<int>(samples.size());
  if (N < 4 * (band + 1)) {
    throw Error(ErrorKind::Bandwidth, "band " + std::to_string(band) + " too large for " +
                                          std::to_string(N) + " samples");
  }
  return MatFun::from_samples(samples, band).coeffs();
}

MatFun mat_multiply(const MatFun& f, const MatFun& g) {
  if (f.cols() != g.rows()) {
    throw Error(ErrorKind::InvalidInput, "inner dimensions differ in product");
  }
  // Exact convolution of the coefficient sequences.
  MatFun::CoeffMap out;
  for (const auto& [a, ca] : f.coeffs()) {
    for (const auto& [b, cb] : g.coeffs()) {
      auto it = out.find(a + b);
      if (it == out.end()) {
        out.emplace(a + b, ca * cb);
      } else {
        it->second.noalias() += ca * cb;
      }
    }
  }
  double residual = 0.0;
  if (f.truncation_residual() > 0.0 || g.truncation_residual() > 0.0) {
    const int N = default_grid_size(std::max(f.band(), g.band()));
    residual = f.truncation_residual() * sup_norm(g, N) +
               g.truncation_residual() * sup_norm(f, N) +
               f.truncation_residual() * g.truncation_residual();
  }
  return MatFun::from_map(f.rows(), g.cols(), std::move(out), residual);
}

MatFun hstack(const MatFun& a, const MatFun& b) {
  if (a.rows() != b.rows()) throw Error(ErrorKind::InvalidInput, "hstack row mismatch");
  MatFun::CoeffMap out;
  auto slot = [&](int k) -> CMatrix& {
    auto it = out.find(k);
    if (it == out.end()) it = out.emplace(k, CMatrix::Zero(a.rows(), a.cols() + b.cols())).first;
    return it->second;
  };
  for (const auto& [k, c] : a.coeffs()) slot(k).leftCols(a.cols()) = c;
  for (const auto& [k, c] : b.coeffs()) slot(k).rightCols(b.cols()) = c;
  return MatFun::from_map(a.rows(), a.cols() + b.cols(), std::move(out),
                          a.truncation_residual() + b.truncation_residual());
}

MatFun vstack(const MatFun& a, const MatFun& b) {
  return hstack(a.transpose(), b.transpose()).transpose();
}

MatFun adjoint(const MatFun& f) { return f.adjoint(); }
MatFun transpose(const MatFun& f) { return f.transpose(); }
MatFun conj(const MatFun& f) { return f.conj(); }

std::vector<PointSvd> pointwise_svd(const MatFun& f, int N) {
  const Grid& g = f.samples(N);
  std::vector<PointSvd> out;
  out.reserve(g.size());
  for (const auto& x : g) {
    Eigen::JacobiSVD<CMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.push_back({svd.singularValues(), svd.matrixU(), svd.matrixV()});
  }
  return out;
}

int winding_number(const MatFun& u, int N) {
  if (u.rows() != 1 || u.cols() != 1) {
    throw Error(ErrorKind::InvalidInput, "winding number needs a scalar function");
  }
  int grid = std::max(N, default_grid_size(u.band()));
  while (true) {
    const Grid& g = u.samples(grid);
    double vmax = 0.0, vmin = std::numeric_limits<double>::infinity();
    for (const auto& x : g) {
      vmax = std::max(vmax, std::abs(x(0, 0)));
      vmin = std::min(vmin, std::abs(x(0, 0)));
    }
    if (vmax == 0.0 || vmin <= 1e-10 * vmax) {
      throw Error(ErrorKind::DegenerateSymbol, "scalar symbol vanishes on the circle", vmin);
    }
    double total = 0.0, worst = 0.0;
    for (int l = 0; l < grid; ++l) {
      const double step = std::arg(g[(l + 1) % grid](0, 0) / g[l](0, 0));
      worst = std::max(worst, std::abs(step));
      total += step;
    }
    if (worst < std::numbers::pi / 2 || grid >= (1 << 16)) {
      return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
    }
    grid *= 2;
  }
}

double analyticity_defect(const MatFun& f) {
  double d = 0.0;
  for (const auto& [k, c] : f.coeffs())
    if (k < 0) d = std::max(d, c.cwiseAbs().maxCoeff());
  return d;
}

double coanalyticity_defect(const MatFun& f) {
  double d = 0.0;
  for (const auto& [k, c] : f.coeffs())
    if (k > 0) d = std::max(d, c.cwiseAbs().maxCoeff());
  return d;
}

bool is_power_of_two(int N) { return N > 0 && (N & (N - 1)) == 0; }

int next_power_of_two(int x) {
  int p = 1;
  while (p < x) p *= 2;
  return p;
}

int default_grid_size(int band) { return std::max(64, next_power_of_two(8 * (band + 1))); }

double sup_norm(const Grid& g) {
  double out = 0.0;
  for (const auto& x : g) {
    if (x.size() == 0) continue;
    out = std::max(out, Eigen::JacobiSVD<CMatrix>(x).singularValues()(0));
  }
  return out;
}

double sup_norm(const MatFun& f, int N) {
  if (f.empty()) return 0.0;
  return sup_norm(f.samples(N));
}

double unitarity_defect(const Grid& g) {
  double out = 0.0;
  for (const auto& x : g) {
    if (x.size() == 0) continue;
    CMatrix gram = x.rows() >= x.cols() ? CMatrix(x.adjoint() * x) : CMatrix(x * x.adjoint());
    gram -= CMatrix::Identity(gram.rows(), gram.cols());
    out = std::max(out, Eigen::JacobiSVD<CMatrix>(gram).singularValues()(0));
  }
  return out;
}

double tail_norm(const Grid& samples, int lo, int hi) {
  if (samples.empty() || samples.front().size() == 0) return 0.0;
  const int N = static_cast<int>(samples.size());
  const auto all = all_coefficients(samples);
  double out = 0.0;
  for (int k = -N / 2; k < N / 2; ++k)
    if (k < lo || k > hi) out += all[wrap(k, N)].norm();
  return out;
}

Grid grid_multiply(const Grid& a, const Grid& b) {
  Grid out(a.size());
  for (size_t l = 0; l < a.size(); ++l) out[l] = a[l] * b[l];
  return out;
}

Grid grid_adjoint(const Grid& a) {
  Grid out(a.size());
  for (size_t l = 0; l < a.size(); ++l) out[l] = a[l].adjoint();
  return out;
}

Grid grid_transpose(const Grid& a) {
  Grid out(a.size());
  for (size_t l = 0; l < a.size(); ++l) out[l] = a[l].transpose();
  return out;
}

Grid grid_conj(const Grid& a) {
  Grid out(a.size());
  for (size_t l = 0; l < a.size(); ++l) out[l] = a[l].conjugate();
  return out;
}

Grid grid_add(const Grid& a, const Grid& b, Complex scale_b) {
  Grid out(a.size());
  for (size_t l = 0; l < a.size(); ++l) out[l] = a[l] + scale_b * b[l];
  return out;
}

Grid grid_scale(const Grid& a, Complex s) {
  Grid out(a.size());
  for (size_t l = 0; l < a.size(); ++l) out[l] = s * a[l];
  return out;
}

double grid_max_diff(const Grid& a, const Grid& b) {
  double out = 0.0;
  for (size_t l = 0; l < a.size(); ++l) {
    if (a[l].size() == 0) continue;
    out = std::max(out, Eigen::JacobiSVD<CMatrix>(a[l] - b[l]).singularValues()(0));
  }
  return out;
}

}  // namespace superopt
