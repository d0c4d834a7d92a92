#include <doctest.h>

#include "superopt/canonical.hpp"
#include "superopt/hankel_toeplitz.hpp"
#include "superopt/linalg.hpp"
#include "support.hpp"

using namespace superopt;
using namespace test_support;

namespace {

const double kS = 1.0 / std::sqrt(2.0);

double grid_gap(const MatFun& f, const std::function<CMatrix(Complex)>& g, int N = 512) {
  const Grid& s = f.samples(N);
  double out = 0.0;
  for (int l = 0; l < N; ++l) out = std::max(out, (s[l] - g(std::polar(1.0, 2 * M_PI * l / N))).norm());
  return out;
}

// Largest deviation of the pointwise singular values of e from t.
double singular_value_spread(const MatFun& e, const std::vector<double>& t, int N = 512) {
  double out = 0.0;
  for (const auto& p : pointwise_svd(e, std::max(N, default_grid_size(e.band()))))
    for (Index j = 0; j < p.s.size(); ++j) {
      const double tj = j < static_cast<Index>(t.size()) ? t[j] : 0.0;
      out = std::max(out, std::abs(p.s(j) - tj));
    }
  return out;
}

double max_coeff(const MatFun& f) {
  double out = 0.0;
  for (const auto& [k, c] : f.coeffs()) out = std::max(out, c.cwiseAbs().maxCoeff());
  return out;
}

MatFun zbar_i2() { return MatFun::from_coeffs(2, 2, {{-1, CMatrix::Identity(2, 2)}}); }
MatFun diag_fixture() { return diag2(scalar({{-1, 1.0}}), scalar({{-1, 0.5}})); }

// Inner co-outer column (1, z)/sqrt 2.
MatFun upsilon_example() {
  return MatFun::from_coeffs(2, 1, {{0, mat({{kS}, {0.0}})}, {1, mat({{0.0}, {kS}})}});
}

}  // namespace

TEST_CASE("nehari_best_approx on scalar fixtures") {
  const auto a = nehari_best_approx(scalar({{-1, 1.0}}));
  CHECK(std::abs(a.sigma - 1.0) < 1e-12);
  CHECK(max_coeff(a.F) < 1e-12);
  CHECK(coeff_diff(a.error, scalar({{-1, 1.0}})) < 1e-12);

  // Closed form of the error for conj(z) + conj(z)^2.
  const auto b = nehari_best_approx(scalar({{-1, 1.0}, {-2, 1.0}}));
  CHECK(std::abs(b.sigma - kGolden) < 1e-10);
  CHECK(grid_gap(b.error, [](Complex z) {
          const Complex zb = std::conj(z);
          return one(kGolden * zb * zb * (kGolden * z + 1.0) / (kGolden + z));
        }) < 1e-7);
  CHECK(analyticity_defect(b.F) < 1e-9);

  const auto c = nehari_best_approx(scalar({{-1, 1.0}, {-2, 0.5}}));
  CHECK(std::abs(c.sigma - (1.0 + std::sqrt(2.0)) / 2.0) < 1e-12);
  for (const auto& x : c.error.samples(512)) CHECK(std::abs(std::abs(x(0, 0)) - c.sigma) < 1e-8);

  CHECK_THROWS_AS(nehari_best_approx(scalar({{0, 1.0}, {2, 1.0}})), Error);
}

TEST_CASE("nehari_best_approx on a diagonal matrix symbol") {
  const auto r = nehari_best_approx(diag_fixture());
  CHECK(std::abs(r.sigma - 1.0) < 1e-12);
  CHECK(max_coeff(r.F) < 1e-9);
}

TEST_CASE("canonical_step on diag(conj z, conj z / 2)") {
  const auto s = canonical_step(diag_fixture());
  CHECK(std::abs(s.sigma - 1.0) < 1e-12);
  CHECK(s.r == 1);
  CHECK(coeff_diff(s.pair_v.upsilon, MatFun::constant(mat({{1.0}, {0.0}}))) < 1e-10);
  CHECK(coeff_diff(s.pair_v.theta, MatFun::constant(mat({{0.0}, {1.0}}))) < 1e-10);
  CHECK(coeff_diff(s.U, scalar({{-1, 1.0}})) < 1e-10);
  CHECK(coeff_diff(s.psi, scalar({{-1, 0.5}})) < 1e-10);
  CHECK(max_coeff(s.F) < 1e-9);
}

TEST_CASE("canonical_step with full multiplicity") {
  const auto s = canonical_step(zbar_i2());
  CHECK(s.r == 2);
  CHECK(s.p == 2);
  CHECK(coeff_diff(s.U, zbar_i2()) < 1e-10);
  CHECK(s.psi.rows() == 0);
  CHECK(s.psi.cols() == 0);
}

TEST_CASE("canonical_step after constant unitary conjugation") {
  const CMatrix R = rotation(M_PI / 4), Q = rotation(-M_PI / 4) * mat({{1.0, 0.0}, {0.0, Complex(0, 1)}});
  const MatFun phi = mat_multiply(mat_multiply(MatFun::constant(R), diag_fixture()), MatFun::constant(Q));
  const auto s = canonical_step(phi);
  CHECK(std::abs(s.sigma - 1.0) < 1e-10);
  CHECK(s.r == 1);
  CHECK(toeplitz_index(s.U) == 1);
  for (const auto& x : s.U.samples(256)) CHECK(std::abs(std::abs(x(0, 0)) - 1.0) < 1e-8);
  CHECK(std::abs(sup_norm(s.psi, 256) - 0.5) < 1e-8);
}

TEST_CASE("thematic_step examples") {
  const auto a = thematic_step(scalar({{-1, 1.0}}));
  CHECK(coeff_diff(a.U, scalar({{-1, 1.0}})) < 1e-10);
  CHECK(coeff_diff(a.pair_v.v, scalar({{0, 1.0}})) < 1e-10);
  CHECK(coeff_diff(a.pair_w.v, scalar({{0, 1.0}})) < 1e-10);

  const auto b = thematic_step(zbar_i2());
  CHECK(b.r == 1);
  CHECK(coeff_diff(b.U, scalar({{-1, 1.0}})) < 1e-10);
  REQUIRE(b.psi_minus.rows() == 1);
  // The residual is conj(z) up to a unimodular constant; one more step peels it.
  CHECK(std::abs(std::abs(b.psi_minus.coeff(-1)(0, 0)) - 1.0) < 1e-10);
  const auto b2 = thematic_step(b.psi_minus);
  CHECK(coeff_diff(b2.U, scalar({{-1, 1.0}})) < 1e-10);

  const auto c = thematic_step(diag_fixture());
  CHECK(coeff_diff(c.U, scalar({{-1, 1.0}})) < 1e-10);
  CHECK(coeff_diff(c.psi, scalar({{-1, 0.5}})) < 1e-10);
}

TEST_CASE("canonical_factorize examples") {
  const auto a = canonical_factorize(diag_fixture());
  REQUIRE(a.blocks.size() == 2);
  CHECK(a.svals.values == std::vector<double>{a.blocks[0].sigma, a.blocks[1].sigma});
  CHECK(std::abs(a.svals.values[0] - 1.0) < 1e-12);
  CHECK(std::abs(a.svals.values[1] - 0.5) < 1e-12);
  CHECK(a.svals.iota == 2);
  CHECK(a.svals.multiplicities == std::vector<Index>{1, 2});
  CHECK(coeff_diff(a.blocks[0].U, scalar({{-1, 1.0}})) < 1e-10);
  CHECK(coeff_diff(a.blocks[1].U, scalar({{-1, 1.0}})) < 1e-10);
  CHECK(max_coeff(a.best_approx) < 1e-9);

  const auto b = canonical_factorize(zbar_i2());
  REQUIRE(b.blocks.size() == 1);
  CHECK(b.svals.iota == 1);
  CHECK(b.blocks[0].r == 2);
  CHECK(b.blocks[0].index_sum == 2);
  CHECK(b.svals.values.size() == 2);

  const MatFun z2 = scalar({{2, 1.0}});
  const auto c = canonical_factorize(z2);
  CHECK(c.blocks.empty());
  CHECK(coeff_diff(c.best_approx, z2) == 0.0);
}

TEST_CASE("reconstruct examples") {
  const MatFun phi = diag_fixture();
  const auto cf = canonical_factorize(phi);
  CHECK(coeff_diff(reconstruct(cf, 2, 2), phi) < 1e-7);

  CanonicalFactorization bare;
  bare.m = bare.n = 1;
  bare.grid = 256;
  FactorBlock blk;
  blk.sigma = 1.0;
  blk.r = 1;
  blk.U = scalar({{-1, 1.0}});
  blk.pair_v = make_balanced_pair(scalar({{0, 1.0}}), MatFun(1, 0));
  blk.pair_w = blk.pair_v;
  bare.blocks.push_back(blk);
  CHECK(coeff_diff(reconstruct(bare, 1, 1), scalar({{-1, 1.0}})) < 1e-12);
  CHECK_THROWS_AS(reconstruct(bare, 2, 1), Error);

  // Non-diagonal fixture from a balanced pair; re-analysis recovers the data.
  CanonicalFactorization fwd;
  fwd.m = fwd.n = 2;
  fwd.grid = 1024;
  FactorBlock b2;
  b2.sigma = 1.0;
  b2.r = 1;
  b2.U = scalar({{-1, 1.0}});
  b2.pair_v = balanced_completion(upsilon_example());
  b2.pair_w = b2.pair_v;
  fwd.blocks.push_back(b2);
  const MatFun built = reconstruct(fwd, 2, 2);
  const auto back = canonical_factorize(built);
  REQUIRE(back.blocks.size() == 1);
  CHECK(std::abs(back.svals.values[0] - 1.0) < 1e-8);
  CHECK(std::abs(back.svals.values[1]) < 1e-8);
  CHECK(max_coeff(back.best_approx) < 1e-7);
}

TEST_CASE("partial factorization keeps a residual") {
  Options o;
  o.max_levels = 1;
  const auto cf = canonical_factorize(diag_fixture(), o);
  REQUIRE(cf.blocks.size() == 1);
  REQUIRE(cf.residual.has_value());
  CHECK(std::abs(cf.residual_hankel_norm - 0.5) < 1e-12);
  CHECK(cf.residual_hankel_norm < cf.blocks[0].sigma);
  CHECK(coeff_diff(reconstruct(cf, 2, 2), diag_fixture()) < 1e-7);
}

TEST_CASE("property: error singular values are constant") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    const Index m = 2 + trial % 2, n = 2 + (trial / 2) % 2;
    const MatFun phi = random_matfun(rng, m, n, -2, 1);
    const auto cf = canonical_factorize(phi);
    CHECK(analyticity_defect(cf.best_approx) < 1e-9);
    CHECK(singular_value_spread(phi - cf.best_approx, cf.svals.values) < 1e-7);
    // Top value is the Hankel norm from a dense SVD.
    const RVector s = Eigen::BDCSVD<CMatrix>(hankel_truncation(phi).dense()).singularValues();
    CHECK(std::abs(cf.svals.values[0] - s(0)) < 1e-10);
    CHECK(coeff_diff(reconstruct(cf, m, n), phi) < 1e-7);
  }
}

TEST_CASE("property: maximizing vectors lie in the range of the inner factor") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 6; ++trial) {
    const MatFun phi = random_matfun(rng, 2, 3, -2, 0);
    const auto s = canonical_step(phi);
    const MatFun& ups = s.pair_v.upsilon;
    for (const auto& f : s.maximizers) {
      const MatFun g = mat_multiply(ups.adjoint(), f).analytic_part();
      CHECK(coeff_diff(mat_multiply(ups, g), f) < 1e-8);
    }
  }
}

TEST_CASE("property: canonical and thematic indices agree") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 6; ++trial) {
    const MatFun phi = random_matfun(rng, 2, 2, -2, 1);
    const auto cf = canonical_factorize(phi);
    const auto route = thematic_route(phi, cf.blocks[0].r);
    int sum = 0;
    for (int k : route.indices) sum += k;
    CHECK(cf.blocks[0].index_sum == sum);
    CHECK(cf.blocks[0].index_sum >= 1);
  }
}

TEST_CASE("property: seeds change bases but not the approximation") {
  Options o;
  o.seed = 7;
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 3; ++trial) {
    const MatFun phi = random_matfun(rng, 2, 2, -2, 0);
    const auto a = canonical_factorize(phi);
    const auto b = canonical_factorize(phi, o);
    CHECK(coeff_diff(a.best_approx, b.best_approx) < 1e-8);
    for (size_t j = 0; j < a.svals.values.size(); ++j)
      CHECK(std::abs(a.svals.values[j] - b.svals.values[j]) < 1e-10);
  }
}
