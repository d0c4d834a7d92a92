#include "superopt/canonical.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "superopt/hankel_toeplitz.hpp"
#include "superopt/linalg.hpp"

namespace superopt {

namespace {

// Ratio of the smallest to the largest pointwise singular value of the
// maximizer matrix below which the division is refused.
constexpr double kDivisionGuard = tol::division_guard;
// Relative singular value cut for the generic pointwise rank.
constexpr double kPointRank = 1e-7;

MatFun band_limited(const Grid& g, int k0) {
  const int N = static_cast<int>(g.size());
  const int kmax = N / 4 - 1;
  int K = std::min(k0, kmax);
  MatFun f = MatFun::from_samples(g, K);
  while (f.truncation_residual() > tol::truncation_budget && K < kmax) {
    K = std::min(2 * K, kmax);
    f = MatFun::from_samples(g, K);
  }
  return f;
}

MatFun band_limited_checked(const Grid& g, int k0, const char* what) {
  MatFun f = band_limited(g, k0);
  if (f.truncation_residual() > tol::truncation_budget) {
    throw Error(ErrorKind::Truncation, std::string(what) + " does not fit the working grid",
                f.truncation_residual());
  }
  return f;
}

Grid zero_grid(int N, Index rows, Index cols) {
  return Grid(static_cast<size_t>(N), CMatrix::Zero(rows, cols));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double top_hankel_value(const MatFun& phi) {
  const RVector s = hankel_singular_values(phi);
  return s.size() ? s(0) : 0.0;
}

Index count_top(const RVector& s, double rel) {
  Index p = 0;
  while (p < s.size() && s(p) >= s(0) * (1.0 - rel)) ++p;
  return p;
}

Index generic_rank(const std::vector<MatFun>& cols) {
  const Index n = cols.front().rows();
  Index best = 0;
  for (int j = 0; j < 5; ++j) {
    const Complex z = std::polar(0.6, 0.7 + 1.3 * j);
    CMatrix a(n, static_cast<Index>(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i) a.col(static_cast<Index>(i)) = cols[i].at(z);
    Eigen::JacobiSVD<CMatrix> svd(a);
    const RVector& s = svd.singularValues();
    Index r = 0;
    while (r < s.size() && s(r) > kPointRank * s(0)) ++r;
    best = std::max(best, r);
  }
  return best;
}

// Everything one level of the reduction produces.
struct Core {
  double sigma = 0.0;
  Index p = 0;
  Index r = 0;
  MatFun U;
  BalancedPair pv;
  BalancedPair pw;
  MatFun psi_minus;
  double lsq_residual = 0.0;
  std::vector<MatFun> f;
  std::vector<MatFun> w;
  Grid top;  // sigma conj(Omega) U Upsilon^*
};

// Antianalytic X of degrees -L..-1 with P_-(Xi X Theta^t) = P_- R.
MatFun solve_lower(const Grid& R, const MatFun& xi, const MatFun& theta, int L0, double& resid) {
  const Index m = xi.rows(), n = theta.rows();
  const Index a = xi.cols(), b = theta.cols();
  const int N = static_cast<int>(R.size());
  const auto rc = MatFun::from_samples(R, -(N / 4 - 1), N / 4 - 1);
  int L = std::min(L0, N / 4 - 1);
  auto lower_tail = [&](int cut) {
    double t = rc.truncation_residual();
    for (const auto& [k, c] : rc.coeffs())
      if (k < -cut) t += c.norm();
    return t;
  };
  while (lower_tail(L) > tol::truncation_budget && L < N / 4 - 1) L = std::min(2 * L, N / 4 - 1);

  const Index q = a * b;
  std::vector<CMatrix> S(static_cast<size_t>(L), CMatrix::Zero(m * n, q));
  for (const auto& [i, ci] : xi.coeffs())
    for (const auto& [j, cj] : theta.coeffs())
      if (i >= 0 && j >= 0 && i + j < L) S[static_cast<size_t>(i + j)] += kron(cj, ci);

  CMatrix A = CMatrix::Zero(L * m * n, L * q);
  CVector rhs = CVector::Zero(L * m * n);
  for (int row = 0; row < L; ++row) {
    const int k = row - L;
    const CMatrix rk = rc.coeff(k);
    rhs.segment(row * m * n, m * n) = Eigen::Map<const CVector>(rk.data(), m * n);
    for (int col = 0; col <= row; ++col)
      A.block(row * m * n, col * q, m * n, q) = S[static_cast<size_t>(row - col)];
  }
  Eigen::ColPivHouseholderQR<CMatrix> qr(A);
  const CVector x = qr.solve(rhs);
  resid = (A * x - rhs).norm() / std::max(1.0, rhs.norm());
  std::vector<std::pair<int, CMatrix>> entries;
  for (int col = 0; col < L; ++col) {
    const CVector seg = x.segment(col * q, q);
    entries.emplace_back(col - L, Eigen::Map<const CMatrix>(seg.data(), a, b));
  }
  return trim_tail(MatFun::from_coeffs(a, b, entries));
}

Core step_core(const MatFun& phi, const Options& opts, int N, bool thematic,
               std::mt19937_64* rng) {
  const Index m = phi.rows(), n = phi.cols();
  const BlockOperatorMatrix h = hankel_truncation(phi);
  if (h.dense().size() == 0) throw Error(ErrorKind::AlreadyAnalytic, "symbol is analytic");
  const DenseSvd svd = dense_svd(h.dense(), true, true);
  const RVector& s = svd.values;
  Core c;
  c.sigma = s(0);
  if (!(c.sigma > 0.0)) throw Error(ErrorKind::AlreadyAnalytic, "Hankel operator vanishes");

  const double tol = opts.multiplicity_tol;
  c.p = count_top(s, tol);
  if (count_top(s, tol / 2) != c.p || count_top(s, 2 * tol) != c.p) {
    throw Error(ErrorKind::AmbiguousMultiplicity,
                "top Hankel singular value has no clear gap", s(0) - s(std::min(c.p, s.size() - 1)));
  }
  const Index used = thematic ? 1 : c.p;
  CMatrix V = svd.right.leftCols(used);
  CMatrix Ul = svd.left.leftCols(used);
  if (thematic) {
    Index imax;
    V.col(0).cwiseAbs().maxCoeff(&imax);
    const Complex ph = std::conj(V(imax, 0)) / std::abs(V(imax, 0));
    V *= ph;
    Ul *= ph;
  } else if (rng) {
    const CMatrix mix = random_unitary(*rng, used);
    V = V * mix;
    Ul = Ul * mix;
  }
  for (Index i = 0; i < used; ++i) {
    c.f.push_back(polynomial_vector(V.col(i), n));
    c.w.push_back(polynomial_vector(Ul.col(i).conjugate(), m));
  }
  if (thematic) {
    // A single maximizer may carry a scalar inner factor; the column it spans must not.
    c.f[0] = strip_common_zeros(c.f[0]);
    c.w[0] = strip_common_zeros(c.w[0]);
  }
  c.r = thematic ? 1 : generic_rank(c.f);
  if (!thematic && generic_rank(c.w) != c.r) {
    throw Error(ErrorKind::InternalConsistency,
                "maximizing vectors of the symbol and its transpose span different ranks");
  }

  // A square inner co-outer function is a constant unitary.
  const MatFun ups =
      c.r == n ? MatFun::identity(n) : inner_from_generators(c.f, n, c.r, opts.degree_extra);
  const MatFun omg =
      c.r == m ? MatFun::identity(m) : inner_from_generators(c.w, m, c.r, opts.degree_extra);
  c.pv = balanced_completion(ups, tol::unitary, opts.degree_extra);
  c.pw = balanced_completion(omg, tol::unitary, opts.degree_extra);
  if (rng) {
    auto rotate = [&](const BalancedPair& p) {
      const MatFun u = mat_multiply(p.upsilon, MatFun::constant(random_unitary(*rng, p.r)));
      const Index k = p.theta.cols();
      const MatFun t = k ? mat_multiply(p.theta, MatFun::constant(random_unitary(*rng, k))) : p.theta;
      return make_balanced_pair(u, t);
    };
    c.pv = rotate(c.pv);
    c.pw = rotate(c.pw);
  }

  // U = Omega^t G H^+ with G = H_phi applied to the maximizers, H = Upsilon^* f.
  MatFun::CoeffMap gcoef;
  for (Index d = 0; d < Ul.rows() / m; ++d) gcoef[-(static_cast<int>(d) + 1)] = Ul.middleRows(d * m, m);
  const MatFun gfun = MatFun::from_map(m, used, gcoef);
  MatFun::CoeffMap fcoef;
  for (Index d = 0; d < V.rows() / n; ++d) fcoef[static_cast<int>(d)] = V.middleRows(d * n, n);
  const MatFun ffun = MatFun::from_map(n, used, fcoef);

  const Grid& gs = gfun.samples(N);
  const Grid& fs = ffun.samples(N);
  const Grid& us = c.pv.upsilon.samples(N);
  const Grid& os = c.pw.upsilon.samples(N);
  Grid Ug(static_cast<size_t>(N));
  double smin = std::numeric_limits<double>::infinity(), smax = 0.0;
  for (int l = 0; l < N; ++l) {
    const CMatrix H = us[l].adjoint() * fs[l];
    Eigen::JacobiSVD<CMatrix> hs(H);
    smax = std::max(smax, hs.singularValues()(0));
    smin = std::min(smin, hs.singularValues()(c.r - 1));
    const CMatrix hh = H * H.adjoint();
    const CMatrix pinv = H.adjoint() * hh.ldlt().solve(CMatrix::Identity(c.r, c.r));
    Ug[l] = os[l].transpose() * gs[l] * pinv;
  }
  if (smin < kDivisionGuard * smax) {
    throw Error(ErrorKind::DegenerateMaximizer,
                "maximizing vectors nearly vanish on the circle", smin / smax);
  }
  c.U = band_limited_checked(Ug, opts.k_trunc, "unitary block");
  const Grid& ub = c.U.samples(N);
  const double udef = unitarity_defect(ub);
  if (udef > tol::unitary) {
    throw Error(ErrorKind::InternalConsistency, "block U is not unitary-valued", udef);
  }

  const Grid& ps = phi.samples(N);
  c.top.resize(static_cast<size_t>(N));
  Grid R(static_cast<size_t>(N));
  for (int l = 0; l < N; ++l) {
    c.top[l] = c.sigma * os[l].conjugate() * ub[l] * us[l].adjoint();
    R[l] = ps[l] - c.top[l];
  }
  if (m > c.r && n > c.r) {
    c.psi_minus = solve_lower(R, c.pw.theta, c.pv.theta, opts.k_trunc, c.lsq_residual);
  } else {
    c.psi_minus = MatFun(m - c.r, n - c.r);
  }
  return c;
}

struct Runner {
  Options opts;
  int N = 0;
  double t0 = 0.0;
  std::mt19937_64 rng;
  bool randomize = false;
  bool thematic_first = false;
  CanonicalFactorization* cf = nullptr;
  Grid lower_error;

  Grid descend(const MatFun& phi, int level) {
    const Index m = phi.rows(), n = phi.cols();
    cf->level_symbols.push_back(phi);
    if (m == 0 || n == 0) return zero_grid(N, m, n);
    const double sigma = top_hankel_value(phi);
    if (level == 0) t0 = sigma;
    if (sigma == 0.0 || (level > 0 && sigma < opts.zero_tol * t0)) return zero_grid(N, m, n);
    if (opts.max_levels >= 0 && level >= opts.max_levels) {
      cf->residual = phi;
      cf->residual_hankel_norm = sigma;
      return phi.samples(N);
    }
    Core c = step_core(phi, opts, N, thematic_first && level == 0, randomize ? &rng : nullptr);
    if (!cf->blocks.empty()) {
      const double prev = cf->blocks.back().sigma;
      const bool after_thematic = thematic_first && level == 1;
      const double cap = after_thematic ? prev * (1.0 + opts.multiplicity_tol)
                                        : prev * (1.0 - opts.multiplicity_tol);
      if (c.sigma > cap) {
        throw Error(ErrorKind::InternalConsistency,
                    "superoptimal values are not decreasing", c.sigma - prev);
      }
    }
    FactorBlock b;
    b.sigma = c.sigma;
    b.r = c.r;
    b.U = c.U;
    b.pair_v = c.pv;
    b.pair_w = c.pw;
    b.index_sum = toeplitz_index(c.U);
    cf->blocks.push_back(b);
    cf->lsq_residual = std::max(cf->lsq_residual, c.lsq_residual);
    const Core& cc = c;

    const Grid lower = descend(cc.psi_minus, level + 1);
    if (level == 0) lower_error = lower;
    Grid E = cc.top;
    if (m > cc.r && n > cc.r) {
      const Grid& xs = cc.pw.theta.samples(N);
      const Grid& ts = cc.pv.theta.samples(N);
      for (int l = 0; l < N; ++l) E[l] += xs[l] * lower[l] * ts[l].transpose();
    }
    return E;
  }
};

}  // namespace

int working_grid(const MatFun& phi, const Options& opts) {
  if (opts.grid > 0) {
    if (!is_power_of_two(opts.grid)) {
      throw Error(ErrorKind::InvalidInput, "grid size must be a power of two");
    }
    if (opts.grid < 4 * (phi.band() + 1) || opts.grid < 4 * (opts.k_trunc + 1)) {
      throw Error(ErrorKind::Bandwidth, "grid too small for the symbol bandwidth");
    }
    return opts.grid;
  }
  return std::max({1024, default_grid_size(phi.band()), next_power_of_two(4 * (opts.k_trunc + 1))});
}

SuperoptValues values_from_blocks(const std::vector<FactorBlock>& blocks, Index min_dim,
                                  bool complete) {
  SuperoptValues v;
  Index total = 0;
  for (const auto& b : blocks) {
    for (Index i = 0; i < b.r; ++i) v.values.push_back(b.sigma);
    total += b.r;
    v.multiplicities.push_back(total);
  }
  if (complete)
    while (static_cast<Index>(v.values.size()) < min_dim) v.values.push_back(0.0);
  v.iota = static_cast<Index>(blocks.size());
  return v;
}

namespace {

struct Run {
  CanonicalFactorization cf;
  Grid lower_error;
};

Run run_on_grid(const MatFun& phi, const Options& opts, bool thematic_first, int N) {
  Run out;
  CanonicalFactorization& cf = out.cf;
  cf.m = phi.rows();
  cf.n = phi.cols();
  cf.grid = N;
  Runner rn;
  rn.opts = opts;
  rn.N = cf.grid;
  rn.rng.seed(opts.seed);
  rn.randomize = opts.seed != 0;
  rn.thematic_first = thematic_first;
  rn.cf = &cf;
  const Grid E = rn.descend(phi, 0);
  out.lower_error = rn.lower_error;

  if (cf.blocks.empty() && !cf.residual) {
    cf.best_approx = phi;
    cf.svals = values_from_blocks(cf.blocks, std::min(cf.m, cf.n), true);
    return out;
  }
  const Grid& ps = phi.samples(cf.grid);
  Grid Fg(ps.size());
  for (size_t l = 0; l < ps.size(); ++l) Fg[l] = ps[l] - E[l];
  cf.best_approx = band_limited_checked(Fg, std::max(opts.k_trunc, phi.band()), "best approximation");
  const double defect = analyticity_defect(cf.best_approx);
  if (defect > tol::analytic_F) {
    throw Error(ErrorKind::InternalConsistency, "best approximation is not analytic", defect);
  }
  cf.svals = values_from_blocks(cf.blocks, std::min(cf.m, cf.n), !cf.residual);
  return out;
}

constexpr int kLargestGrid = 16384;

Run run(const MatFun& phi, const Options& opts, bool thematic_first) {
  if (phi.empty()) throw Error(ErrorKind::InvalidInput, "empty symbol");
  int N = working_grid(phi, opts);
  for (;;) {
    try {
      return run_on_grid(phi, opts, thematic_first, N);
    } catch (const Error& e) {
      // Slowly decaying rational intermediates need a finer grid.
      if (e.kind() != ErrorKind::Truncation || opts.grid > 0 || N >= kLargestGrid) throw;
      N *= 2;
    }
  }
}

StepResult step_from_run(const MatFun& phi, const Options& opts, bool thematic) {
  Options o = opts;
  o.max_levels = -1;
  Run r = run(phi, o, thematic);
  if (r.cf.blocks.empty()) throw Error(ErrorKind::AlreadyAnalytic, "symbol is analytic");
  const FactorBlock& b = r.cf.blocks.front();
  StepResult s;
  s.sigma = b.sigma;
  s.r = b.r;
  s.U = b.U;
  s.pair_v = b.pair_v;
  s.pair_w = b.pair_w;
  s.F = r.cf.best_approx;
  s.psi_minus = r.cf.level_symbols.at(1);
  const Index a = s.psi_minus.rows(), c = s.psi_minus.cols();
  s.psi = (a == 0 || c == 0) ? MatFun(a, c)
                             : band_limited_checked(r.lower_error, o.k_trunc, "lower residual");
  // Maximizers of the top level, recomputed without the randomization.
  const BlockOperatorMatrix h = hankel_truncation(phi);
  const SingularTriples t = singular_triples(h);
  s.p = count_top(t.values, o.multiplicity_tol);
  for (Index i = 0; i < s.p; ++i) {
    s.maximizers.push_back(polynomial_vector(t.right.col(i), phi.cols()));
    s.co_maximizers.push_back(polynomial_vector(t.left.col(i).conjugate(), phi.rows()));
  }
  return s;
}

}  // namespace

StepResult canonical_step(const MatFun& phi, const Options& opts) {
  return step_from_run(phi, opts, false);
}

StepResult thematic_step(const MatFun& phi, const Options& opts) {
  return step_from_run(phi, opts, true);
}

ThematicRoute thematic_route(const MatFun& phi, Index steps, const Options& opts) {
  ThematicRoute out;
  MatFun cur = trim_tail(phi, 0.0);
  const int N = working_grid(cur, opts);
  for (Index j = 0; j < steps; ++j) {
    if (cur.rows() == 0 || cur.cols() == 0) {
      throw Error(ErrorKind::InvalidInput, "thematic route ran out of dimensions");
    }
    Core c = step_core(cur, opts, N, true, nullptr);
    StepResult s;
    s.sigma = c.sigma;
    s.p = c.p;
    s.r = 1;
    s.U = c.U;
    s.pair_v = c.pv;
    s.pair_w = c.pw;
    s.psi_minus = c.psi_minus;
    s.maximizers = c.f;
    s.co_maximizers = c.w;
    out.indices.push_back(toeplitz_index(c.U));
    out.theta_product =
        j == 0 ? c.pv.theta : trim_tail(mat_multiply(out.theta_product, c.pv.theta));
    out.xi_product = j == 0 ? c.pw.theta : trim_tail(mat_multiply(out.xi_product, c.pw.theta));
    cur = c.psi_minus;
    out.steps.push_back(std::move(s));
  }
  out.delta = cur;
  return out;
}

CanonicalFactorization canonical_factorize(const MatFun& phi, const Options& opts) {
  return run(phi, opts, false).cf;
}

NehariResult nehari_best_approx(const MatFun& phi_in, const Options& opts) {
  const MatFun phi = trim_tail(phi_in, 0.0);
  const BlockOperatorMatrix h = hankel_truncation(phi);
  if (h.dense().size() == 0) throw Error(ErrorKind::AlreadyAnalytic, "symbol is analytic");
  NehariResult out;
  if (phi.rows() != 1 || phi.cols() != 1) {
    const CanonicalFactorization cf = canonical_factorize(phi, opts);
    if (cf.blocks.empty()) throw Error(ErrorKind::AlreadyAnalytic, "symbol is analytic");
    out.sigma = cf.blocks.front().sigma;
    out.F = cf.best_approx;
    out.error = phi - cf.best_approx;
    return out;
  }
  const SingularTriples t = singular_triples(h);
  out.sigma = t.values(0);
  if (!(out.sigma > 0.0)) throw Error(ErrorKind::AlreadyAnalytic, "Hankel operator vanishes");
  const int N = working_grid(phi, opts);
  const MatFun f = polynomial_vector(t.right.col(0), 1);
  MatFun::CoeffMap gc;
  for (Index d = 0; d < t.left.rows(); ++d)
    gc[-(static_cast<int>(d) + 1)] = CMatrix::Constant(1, 1, out.sigma * t.left(d, 0));
  const MatFun g = MatFun::from_map(1, 1, gc);
  const Grid& fs = f.samples(N);
  const Grid& gs = g.samples(N);
  double fmin = std::numeric_limits<double>::infinity(), fmax = 0.0;
  for (const auto& x : fs) {
    fmin = std::min(fmin, std::abs(x(0, 0)));
    fmax = std::max(fmax, std::abs(x(0, 0)));
  }
  if (fmin < kDivisionGuard * fmax) {
    throw Error(ErrorKind::DegenerateMaximizer, "maximizing vector nearly vanishes on the circle",
                fmin / fmax);
  }
  Grid e(static_cast<size_t>(N)), Fg(static_cast<size_t>(N));
  const Grid& ps = phi.samples(N);
  double mod = 0.0;
  for (int l = 0; l < N; ++l) {
    e[l] = gs[l] / fs[l](0, 0);
    Fg[l] = ps[l] - e[l];
    mod = std::max(mod, std::abs(std::abs(e[l](0, 0)) - out.sigma));
  }
  if (mod > tol::reconstruction) {
    throw Error(ErrorKind::InternalConsistency, "error function does not have constant modulus", mod);
  }
  out.error = band_limited_checked(e, opts.k_trunc, "error function");
  out.F = band_limited_checked(Fg, std::max(opts.k_trunc, phi.band()), "best approximation");
  const double defect = analyticity_defect(out.F);
  if (defect > tol::analytic_F) {
    throw Error(ErrorKind::InternalConsistency, "best approximation is not analytic", defect);
  }
  return out;
}

Grid reconstruct_grid(const CanonicalFactorization& cf, int N) {
  // Innermost first: start with the residual (or nothing) in the corner.
  Index mm = cf.m, nn = cf.n;
  for (const auto& b : cf.blocks) {
    mm -= b.r;
    nn -= b.r;
  }
  if (mm < 0 || nn < 0) throw Error(ErrorKind::InvalidInput, "block sizes exceed the dimensions");
  Grid E = zero_grid(N, mm, nn);
  if (cf.residual) {
    if (cf.residual->rows() != mm || cf.residual->cols() != nn) {
      throw Error(ErrorKind::InvalidInput, "residual has the wrong shape");
    }
    E = cf.residual->samples(N);
  }
  for (size_t j = cf.blocks.size(); j-- > 0;) {
    const FactorBlock& b = cf.blocks[j];
    const Index m = mm + b.r, n = nn + b.r;
    if (b.pair_w.v.rows() != m || b.pair_v.v.rows() != n || b.U.rows() != b.r) {
      throw Error(ErrorKind::InvalidInput, "factor dimensions are inconsistent");
    }
    const Grid& us = b.U.samples(N);
    const Grid& ws = b.pair_w.v.samples(N);
    const Grid& vs = b.pair_v.v.samples(N);
    Grid next(static_cast<size_t>(N));
    for (int l = 0; l < N; ++l) {
      CMatrix d = CMatrix::Zero(m, n);
      d.topLeftCorner(b.r, b.r) = b.sigma * us[l];
      d.bottomRightCorner(mm, nn) = E[l];
      next[l] = ws[l].conjugate() * d * vs[l].adjoint();
    }
    E = std::move(next);
    mm = m;
    nn = n;
  }
  if (!cf.best_approx.empty()) {
    if (cf.best_approx.rows() != cf.m || cf.best_approx.cols() != cf.n) {
      throw Error(ErrorKind::InvalidInput, "best approximation has the wrong shape");
    }
    const Grid& fs = cf.best_approx.samples(N);
    for (int l = 0; l < N; ++l) E[l] += fs[l];
  }
  return E;
}

MatFun reconstruct(const CanonicalFactorization& cf, Index m, Index n) {
  if (cf.m != m || cf.n != n) throw Error(ErrorKind::InvalidInput, "dimension mismatch");
  const int N = cf.grid > 0 ? cf.grid : 1024;
  return MatFun::from_samples(reconstruct_grid(cf, N), N / 4 - 1);
}

}  // namespace superopt
