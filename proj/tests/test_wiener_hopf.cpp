#include <doctest.h>

#include "superopt/canonical.hpp"
#include "superopt/hankel_toeplitz.hpp"
#include "superopt/linalg.hpp"
#include "superopt/wiener_hopf.hpp"
#include "support.hpp"

using namespace superopt;
using namespace test_support;

namespace {

MatFun diag_powers(int a, int b) { return diag2(scalar({{a, 1.0}}), scalar({{b, 1.0}})); }

MatFun conj_by(const CMatrix& a, const MatFun& u, const CMatrix& b) {
  return mat_multiply(mat_multiply(MatFun::constant(a), u), MatFun::constant(b));
}

// Classification through the full pipeline: zero is the superoptimal
// approximation and every superoptimal value equals one.
bool pipeline_very_bad(const MatFun& U) {
  const auto cf = canonical_factorize(U);
  double fmax = 0.0;
  for (const auto& [k, c] : cf.best_approx.coeffs()) fmax = std::max(fmax, c.norm());
  bool ones = true;
  for (double t : cf.svals.values) ones = ones && std::abs(t - 1.0) < 1e-8;
  return fmax < 1e-7 && ones;
}

}  // namespace

TEST_CASE("wh_indices examples") {
  CHECK(wh_indices(diag_powers(-1, 2)).indices == std::vector<int>{-1, 2});
  CHECK(wh_indices(diag_powers(-1, -1)).indices == std::vector<int>{-1, -1});
  CHECK(wh_indices(MatFun::constant(rotation(0.3))).indices == std::vector<int>{0, 0});
  CHECK(wh_indices(diag_powers(-1, 2)).negative_count == 1);
  CHECK_THROWS_AS(wh_indices(scalar({{0, 2.0}})), Error);
}

TEST_CASE("is_badly_approximable_scalar examples") {
  CHECK(is_badly_approximable_scalar(scalar({{-1, 1.0}})));
  CHECK_FALSE(is_badly_approximable_scalar(scalar({{1, 1.0}})));
  CHECK_FALSE(is_badly_approximable_scalar(scalar({{0, 2.0}, {1, 1.0}})));
}

TEST_CASE("is_very_badly_approximable_unitary examples") {
  CHECK(is_very_badly_approximable_unitary(diag_powers(-1, -1)));
  CHECK_FALSE(is_very_badly_approximable_unitary(diag_powers(-1, 1)));
  const MatFun bbar = blaschke(0.5).conj();
  CHECK(is_very_badly_approximable_unitary(bbar));
  CHECK(toeplitz_index(bbar) == 1);
  const auto c = classify_unitary(bbar);
  CHECK(c.dense_range);
  CHECK(c.trivial_kernel);
}

TEST_CASE("property: scalar indices are winding numbers") {
  std::vector<MatFun> fixtures = {scalar({{-2, 1.0}}), scalar({{3, 1.0}}), blaschke(0.4),
                                  blaschke(Complex(0.1, -0.5)).conj(),
                                  mat_multiply(blaschke(0.3), scalar({{-2, 1.0}}))};
  for (const auto& u : fixtures) {
    const int w = winding_number(u, 1024);
    CHECK(wh_indices(u).indices == std::vector<int>{w});
    CHECK(is_badly_approximable_scalar(u) == (w <= -1));
  }
}

TEST_CASE("property: index of the Toeplitz operator is minus the index sum") {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<int> deg(-3, 3);
  for (int trial = 0; trial < 8; ++trial) {
    const int a = deg(rng), b = deg(rng);
    const MatFun u = conj_by(random_unitary(rng, 2), diag_powers(a, b), random_unitary(rng, 2));
    const auto wh = wh_indices(u);
    CHECK(wh.indices == std::vector<int>{std::min(a, b), std::max(a, b)});
    CHECK(toeplitz_index(u) == -(a + b));
  }
}

TEST_CASE("property: negative index count equals the top multiplicity") {
  // Error functions of very badly approximable fixtures are unitary up to sigma.
  std::vector<MatFun> fixtures = {diag_powers(-1, -1), diag_powers(-2, -1),
                                  conj_by(rotation(0.7), diag_powers(-1, -3), rotation(-0.2))};
  for (const auto& u : fixtures) {
    const auto cf = canonical_factorize(u);
    CHECK(wh_indices(u).negative_count == cf.blocks.front().r);
  }
}

TEST_CASE("property: index classification matches the pipeline") {
  std::mt19937_64 rng(52);
  std::vector<MatFun> fixtures = {diag_powers(-1, -1), diag_powers(-1, 1), diag_powers(0, -2),
                                  blaschke(0.5).conj(), scalar({{-2, 1.0}}), scalar({{1, 1.0}})};
  for (int trial = 0; trial < 4; ++trial) {
    const int a = -1 - trial % 2, b = trial - 2;
    fixtures.push_back(conj_by(random_unitary(rng, 2), diag_powers(a, b), random_unitary(rng, 2)));
  }
  for (const auto& u : fixtures) CHECK(is_very_badly_approximable_unitary(u) == pipeline_very_bad(u));
}
