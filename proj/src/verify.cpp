#include "superopt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "superopt/hankel_toeplitz.hpp"
#include "superopt/linalg.hpp"

namespace superopt {

namespace {

constexpr double kErrorSvTol = 1e-7;
constexpr double kBalancedTol = 1e-7;
constexpr double kInterlaceTol = 1e-9;
constexpr double kInvertMargin = 1e-6;
constexpr double kSymmetryTol = 1e-7;
constexpr double kCompositionTol = 1e-9;
constexpr double kAlignTol = 1e-6;
constexpr double kConverseTol = 1e-7;
constexpr double kConverseValueWeight = 10.0;  // 1e-8 on values against 1e-7 on F
constexpr int kSampledSubsets = 200;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

int grid_for(std::initializer_list<int> bands, int floor_n) {
  int b = 0;
  for (int x : bands) b = std::max(b, x);
  return std::max(floor_n, default_grid_size(b));
}

double hankel_norm(const MatFun& f) {
  if (f.empty()) return 0.0;
  const RVector s = hankel_singular_values(f);
  return s.size() ? s(0) : 0.0;
}

// Row subsets of {0..n-1} of size k; all of them for n <= 4, else a sample.
std::vector<std::vector<Index>> row_subsets(Index n, Index k, std::mt19937_64& rng) {
  std::vector<std::vector<Index>> out;
  if (k == 0 || k > n) return out;
  if (n <= 4) {
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + k, true);
    do {
      std::vector<Index> s;
      for (Index i = 0; i < n; ++i)
        if (pick[i]) s.push_back(i);
      out.push_back(s);
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return out;
  }
  std::vector<Index> all(n);
  std::iota(all.begin(), all.end(), 0);
  for (int t = 0; t < kSampledSubsets; ++t) {
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<Index> s(all.begin(), all.begin() + k);
    std::sort(s.begin(), s.end());
    out.push_back(s);
  }
  return out;
}

// Largest coefficient of the minor on the wrong side of zero.
double minor_defect(const Grid& vs, const std::vector<Index>& rows, Index c0, Index k,
                    bool analytic) {
  const int N = static_cast<int>(vs.size());
  Grid d(N, CMatrix(1, 1));
  for (int l = 0; l < N; ++l) {
    CMatrix sub(k, k);
    for (Index i = 0; i < k; ++i) sub.row(i) = vs[l].block(rows[i], c0, 1, k);
    d[l](0, 0) = sub.determinant();
  }
  const MatFun f = MatFun::from_samples(d, N / 4 - 1);
  return analytic ? analyticity_defect(f) : coanalyticity_defect(f);
}

Grid transform(const Grid& g, const CMatrix& left, const CMatrix& right) {
  Grid out(g.size());
  for (size_t l = 0; l < g.size(); ++l) out[l] = left * g[l] * right;
  return out;
}

int max_band(const CanonicalFactorization& cf) {
  int b = cf.best_approx.band();
  for (const auto& blk : cf.blocks) {
    b = std::max({b, blk.U.band(), blk.pair_v.v.band(), blk.pair_w.v.band()});
  }
  for (const auto& s : cf.level_symbols) b = std::max(b, s.band());
  return b;
}

}  // namespace

void VerificationReport::add(CheckRecord rec) {
  overall = overall && rec.passed;
  checks.push_back(std::move(rec));
}

const CheckRecord* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

CheckRecord make_record(std::string name, double defect, double tol, std::string details) {
  CheckRecord r;
  r.name = std::move(name);
  r.defect = defect;
  r.tol = tol;
  r.passed = defect <= tol;  // false for NaN
  r.details = std::move(details);
  return r;
}

ConstantFit fit_constant_unitary(const Grid& a, const Grid& b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::InvalidInput, "constant fit needs two grids of equal size");
  }
  CMatrix cross = CMatrix::Zero(a[0].cols(), b[0].cols());
  for (size_t l = 0; l < a.size(); ++l) cross += a[l].adjoint() * b[l];
  ConstantFit out;
  out.Q = cross.size() ? polar_unitary(cross) : cross;
  for (size_t l = 0; l < a.size(); ++l) {
    const CMatrix diff = a[l] * out.Q - b[l];
    if (diff.size()) out.residual = std::max(out.residual, dense_svd(diff, false, false).values(0));
  }
  return out;
}

CheckRecord check_error_singular_values(const MatFun& phi, const CanonicalFactorization& cf) {
  const std::string name = "error_singular_values";
  const auto& t = cf.svals.values;
  if (t.empty()) return make_record(name, 0.0, kErrorSvTol, "no superoptimal values");
  const MatFun e = phi - cf.best_approx;
  const int N = grid_for({e.band()}, std::max(512, cf.grid));
  double defect = 0.0;
  for (const auto& p : pointwise_svd(e, N)) {
    for (size_t j = 0; j < t.size() && static_cast<Index>(j) < p.s.size(); ++j) {
      defect = std::max(defect, std::abs(p.s(static_cast<Index>(j)) - t[j]));
    }
  }
  return make_record(name, defect, kErrorSvTol, "grid " + std::to_string(N));
}

CheckRecord check_balanced(const BalancedPair& pair, unsigned long long seed) {
  const std::string name = "balanced";
  const MatFun& v = pair.v;
  const Index n = v.rows(), r = pair.r;
  if (n == 0 || v.cols() != n) {
    return make_record(name, std::numeric_limits<double>::quiet_NaN(), kBalancedTol,
                       "factor is not square");
  }
  const int N = next_power_of_two(std::max(256, 8 * (static_cast<int>(n) * v.band() + 1)));
  const Grid& vs = v.samples(N);
  const double unit = unitarity_defect(vs);

  std::mt19937_64 rng(seed);
  double analytic = 0.0, coanalytic = 0.0;
  for (const auto& rows : row_subsets(n, r, rng))
    analytic = std::max(analytic, minor_defect(vs, rows, 0, r, true));
  for (const auto& rows : row_subsets(n, n - r, rng))
    coanalytic = std::max(coanalytic, minor_defect(vs, rows, r, n - r, false));

  Complex mean = 0.0;
  std::vector<Complex> dets(N);
  for (int l = 0; l < N; ++l) mean += (dets[l] = vs[l].determinant());
  mean /= static_cast<double>(N);
  double det_defect = std::abs(std::abs(mean) - 1.0);
  for (const auto& d : dets) det_defect = std::max(det_defect, std::abs(d - mean));

  const double defect = std::max({unit, analytic, coanalytic, det_defect});
  return make_record(name, defect, kBalancedTol,
                     "unitarity " + fmt(unit) + ", analytic minors " + fmt(analytic) +
                         ", coanalytic minors " + fmt(coanalytic) + ", determinant " +
                         fmt(det_defect));
}

CheckRecord check_index_sum(const CanonicalFactorization& cf,
                            const std::vector<std::vector<int>>& thematic_indices) {
  const std::string name = "index_sum";
  int violations = 0;
  std::ostringstream det;
  for (size_t l = 0; l < cf.blocks.size(); ++l) {
    const FactorBlock& b = cf.blocks[l];
    det << "block " << l << ":";
    try {
      const double ud = unitarity_defect(b.U.samples(grid_for({b.U.band()}, 256)));
      if (ud > tol::unitary) {
        ++violations;
        det << " U not unitary (" << fmt(ud) << ")";
      }
      const int ker = kernel_dimension(b.U);
      const int coker = kernel_dimension(b.U.adjoint());
      const int ind = ker - coker;
      int sum = 0;
      if (l < thematic_indices.size()) {
        for (int k : thematic_indices[l]) sum += k;
      } else {
        ++violations;
        det << " no thematic indices";
      }
      violations += (ind != b.index_sum) + (ind != sum) + (coker != 0);
      det << " ind " << ind << ", recorded " << b.index_sum << ", thematic " << sum
          << ", coker " << coker << ";";
    } catch (const Error& e) {
      ++violations;
      det << " " << e.what() << ";";
    }
  }
  return make_record(name, violations, 0.0, det.str());
}

CheckRecord check_index_sum(const CanonicalFactorization& cf, const Options& opts) {
  std::vector<std::vector<int>> idx;
  for (size_t l = 0; l < cf.blocks.size(); ++l) {
    idx.push_back(thematic_route(cf.level_symbols.at(l), cf.blocks[l].r, opts).indices);
  }
  return check_index_sum(cf, idx);
}

CheckRecord check_interlacing(const CanonicalFactorization& cf) {
  const std::string name = "interlacing";
  double defect = 0.0;
  for (size_t l = 0; l < cf.blocks.size() && l + 1 < cf.level_symbols.size(); ++l) {
    const MatFun& next = cf.level_symbols[l + 1];
    if (next.empty()) continue;
    const RVector above = hankel_singular_values(cf.level_symbols[l]);
    const RVector below = hankel_singular_values(next);
    const Index iota = cf.blocks[l].index_sum;
    for (Index j = 0; j < below.size(); ++j) {
      const double rhs = iota + j < above.size() ? above(iota + j) : 0.0;
      defect = std::max(defect, below(j) - rhs);
    }
  }
  return make_record(name, defect, kInterlaceTol);
}

CheckRecord check_toeplitz_invertibility(const BalancedPair& pair) {
  const double eta = hankel_norm(pair.theta.conj());
  const double eta_p = hankel_norm(pair.upsilon.conj());
  return make_record("toeplitz_invertibility", std::max(eta, eta_p), 1.0 - kInvertMargin,
                     "theta " + fmt(eta) + ", upsilon " + fmt(eta_p));
}

CheckRecord check_hankel_symmetry(const BalancedPair& pair) {
  const double eta = hankel_norm(pair.theta.conj());
  const double eta_p = hankel_norm(pair.upsilon.conj());
  if (pair.theta.empty()) return make_record("hankel_symmetry", 0.0, kSymmetryTol, "r = n");
  return make_record("hankel_symmetry", std::abs(eta - eta_p), kSymmetryTol,
                     "theta " + fmt(eta) + ", upsilon " + fmt(eta_p));
}

CheckRecord check_composition_bound(const MatFun& a, const MatFun& b) {
  const std::string name = "composition_bound";
  if (a.cols() != b.rows()) throw Error(ErrorKind::InvalidInput, "factors do not compose");
  const double s = std::max(hankel_norm(a.conj()), hankel_norm(b.conj()));
  const double lhs = std::pow(hankel_norm(trim_tail(mat_multiply(a, b)).conj()), 2);
  const double bound = 2 * s * s - s * s * s * s;
  const std::string det = "norm^2 " + fmt(lhs) + ", bound " + fmt(bound) + ", s " + fmt(s);
  if (s >= 1.0 - kInvertMargin) {
    CheckRecord rec = make_record(name, 0.0, kCompositionTol, "premise not met: " + det);
    rec.applicable = false;
    return rec;
  }
  return make_record(name, lhs - bound, kCompositionTol, det);
}

CheckRecord check_alignment(const CanonicalFactorization& a, const CanonicalFactorization& b,
                            const CMatrix& left, const CMatrix& right, const std::string& name) {
  if (a.m != b.m || a.n != b.n || left.rows() != a.m || right.rows() != a.n) {
    return make_record(name, 1.0, kAlignTol, "shapes differ");
  }
  if (a.blocks.size() != b.blocks.size()) {
    return make_record(name, 1.0, kAlignTol, "block counts differ");
  }
  const int N = next_power_of_two(
      std::max({a.grid, b.grid, 2 * std::max(max_band(a), max_band(b)) + 2}));
  double defect = 0.0;
  std::ostringstream det;
  auto note = [&](const std::string& what, double x) {
    defect = std::max(defect, x);
    det << what << " " << fmt(x) << "; ";
  };

  note("F", grid_max_diff(transform(a.best_approx.samples(N), left, right),
                          b.best_approx.samples(N)));
  CMatrix L = left, R = right;
  for (size_t l = 0; l < a.blocks.size(); ++l) {
    const FactorBlock& x = a.blocks[l];
    const FactorBlock& y = b.blocks[l];
    if (x.r != y.r) return make_record(name, 1.0, kAlignTol, det.str() + "multiplicities differ");
    det << "level " << l << ": ";
    note("sigma", std::abs(x.sigma - y.sigma));
    const ConstantFit A = fit_constant_unitary(
        transform(x.pair_v.upsilon.samples(N), R.adjoint(), CMatrix::Identity(x.r, x.r)),
        y.pair_v.upsilon.samples(N));
    const ConstantFit C = fit_constant_unitary(
        transform(x.pair_w.upsilon.samples(N), L.conjugate(), CMatrix::Identity(x.r, x.r)),
        y.pair_w.upsilon.samples(N));
    note("upsilon", A.residual);
    note("omega", C.residual);
    note("U", grid_max_diff(transform(x.U.samples(N), C.Q.transpose(), A.Q), y.U.samples(N)));

    const bool has_theta = !x.pair_v.theta.empty();
    const bool has_xi = !x.pair_w.theta.empty();
    if (!has_theta || !has_xi) break;
    const Index kt = x.pair_v.theta.cols(), kx = x.pair_w.theta.cols();
    const ConstantFit B = fit_constant_unitary(
        transform(x.pair_v.theta.samples(N), R.transpose(), CMatrix::Identity(kt, kt)),
        y.pair_v.theta.samples(N));
    const ConstantFit D = fit_constant_unitary(
        transform(x.pair_w.theta.samples(N), L, CMatrix::Identity(kx, kx)),
        y.pair_w.theta.samples(N));
    note("theta", B.residual);
    note("xi", D.residual);
    L = D.Q.adjoint();
    R = B.Q.conjugate();
    if (l + 1 < a.level_symbols.size() && l + 1 < b.level_symbols.size()) {
      const MatFun pa = a.level_symbols[l + 1].antianalytic_part();
      const MatFun pb = b.level_symbols[l + 1].antianalytic_part();
      if (!pa.empty()) note("psi", grid_max_diff(transform(pa.samples(N), L, R), pb.samples(N)));
    }
  }
  return make_record(name, defect, kAlignTol, det.str());
}

CheckRecord check_uniqueness_mod_unitary(const MatFun& phi, unsigned long long seed_a,
                                         unsigned long long seed_b, const Options& opts) {
  Options oa = opts, ob = opts;
  oa.seed = seed_a;
  ob.seed = seed_b;
  const CanonicalFactorization a = canonical_factorize(phi, oa);
  const CanonicalFactorization b = canonical_factorize(phi, ob);
  CheckRecord seeds = check_alignment(a, b, CMatrix::Identity(phi.rows(), phi.rows()),
                                      CMatrix::Identity(phi.cols(), phi.cols()));

  std::mt19937_64 rng(seed_a * 0x9E3779B97F4A7C15ULL + seed_b);
  const CMatrix L = random_unitary(rng, phi.rows());
  const CMatrix R = random_unitary(rng, phi.cols());
  const MatFun conj_phi =
      mat_multiply(mat_multiply(MatFun::constant(L), phi), MatFun::constant(R));
  const CanonicalFactorization c = canonical_factorize(conj_phi, ob);
  CheckRecord rotated = check_alignment(a, c, L, R);

  return make_record("uniqueness_mod_unitary", std::max(seeds.defect, rotated.defect), kAlignTol,
                     "seeds: " + fmt(seeds.defect) + "; conjugated: " + fmt(rotated.defect));
}

CheckRecord check_converse(const CanonicalFactorization& cf, const Options& opts) {
  const std::string name = "converse";
  if (cf.residual) {
    CheckRecord rec = make_record(name, 0.0, kConverseTol, "premise not met: partial factorization");
    rec.applicable = false;
    return rec;
  }
  if (cf.blocks.empty()) return make_record(name, 0.0, kConverseTol, "no blocks");
  CanonicalFactorization bare = cf;
  bare.best_approx = MatFun::zero(cf.m, cf.n);
  const MatFun built = reconstruct(bare, cf.m, cf.n);
  const CanonicalFactorization back = canonical_factorize(built, opts);
  const double fnorm = sup_norm(back.best_approx, grid_for({back.best_approx.band()}, 256));
  double tdiff = back.svals.values.size() == cf.svals.values.size() ? 0.0 : 1.0;
  for (size_t j = 0; j < std::min(back.svals.values.size(), cf.svals.values.size()); ++j) {
    tdiff = std::max(tdiff, std::abs(back.svals.values[j] - cf.svals.values[j]));
  }
  return make_record(name, std::max(fnorm, kConverseValueWeight * tdiff), kConverseTol,
                     "|F| " + fmt(fnorm) + ", values " + fmt(tdiff));
}

CheckRecord check_thematic_consistency(const CanonicalFactorization& cf,
                                       const ThematicRoute& route) {
  const std::string name = "thematic_consistency";
  if (cf.blocks.empty()) return make_record(name, 0.0, kAlignTol, "no blocks");
  const FactorBlock& b = cf.blocks.front();
  if (b.pair_v.theta.empty() || b.pair_w.theta.empty()) {
    return make_record(name, 0.0, kAlignTol, "first block fills a dimension");
  }
  const int N = next_power_of_two(std::max(
      {cf.grid, 2 * std::max({max_band(cf), route.theta_product.band(), route.xi_product.band(),
                              route.delta.band()}) + 2}));
  const ConstantFit B = fit_constant_unitary(b.pair_v.theta.samples(N), route.theta_product.samples(N));
  const ConstantFit D = fit_constant_unitary(b.pair_w.theta.samples(N), route.xi_product.samples(N));
  const MatFun psi = cf.level_symbols.at(1).antianalytic_part();
  const MatFun delta = route.delta.antianalytic_part();
  const double dd =
      grid_max_diff(transform(psi.samples(N), D.Q.adjoint(), B.Q.conjugate()), delta.samples(N));
  return make_record(name, std::max({B.residual, D.residual, dd}), kAlignTol,
                     "theta " + fmt(B.residual) + ", xi " + fmt(D.residual) + ", residual " +
                         fmt(dd));
}

CheckRecord check_thematic_consistency(const MatFun& phi, const CanonicalFactorization& cf,
                                       const Options& opts) {
  if (cf.blocks.empty()) return make_record("thematic_consistency", 0.0, kAlignTol, "no blocks");
  return check_thematic_consistency(cf, thematic_route(phi, cf.blocks.front().r, opts));
}

VerificationReport verify_factorization(const MatFun& phi, const CanonicalFactorization& cf,
                                        const Options& opts) {
  VerificationReport rep;
  auto named = [](CheckRecord rec, const std::string& suffix) {
    rec.name += suffix;
    return rec;
  };
  rep.add(check_error_singular_values(phi, cf));
  for (size_t l = 0; l < cf.blocks.size(); ++l) {
    const std::string sv = "[v" + std::to_string(l) + "]", sw = "[w" + std::to_string(l) + "]";
    const FactorBlock& b = cf.blocks[l];
    rep.add(named(check_balanced(b.pair_v), sv));
    rep.add(named(check_balanced(b.pair_w), sw));
    rep.add(named(check_toeplitz_invertibility(b.pair_v), sv));
    rep.add(named(check_toeplitz_invertibility(b.pair_w), sw));
    rep.add(named(check_hankel_symmetry(b.pair_v), sv));
    rep.add(named(check_hankel_symmetry(b.pair_w), sw));
  }

  std::vector<ThematicRoute> routes;
  std::vector<std::vector<int>> indices;
  for (size_t l = 0; l < cf.blocks.size(); ++l) {
    routes.push_back(thematic_route(cf.level_symbols.at(l), cf.blocks[l].r, opts));
    indices.push_back(routes.back().indices);
  }
  rep.add(check_index_sum(cf, indices));
  rep.add(check_interlacing(cf));
  if (!routes.empty()) {
    const auto& steps = routes.front().steps;
    for (size_t j = 0; j + 1 < steps.size(); ++j) {
      const MatFun& t1 = steps[j].pair_v.theta;
      const MatFun& t2 = steps[j + 1].pair_v.theta;
      if (!t1.empty() && !t2.empty())
        rep.add(named(check_composition_bound(t1, t2), "[" + std::to_string(j) + "]"));
    }
    rep.add(check_thematic_consistency(cf, routes.front()));
  }
  if (!cf.blocks.empty()) {
    rep.add(check_uniqueness_mod_unitary(phi, 1, 2, opts));
    rep.add(check_converse(cf, opts));
  }
  return rep;
}

}  // namespace superopt
