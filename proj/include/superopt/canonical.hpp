#pragma once

#include <optional>
#include <vector>

#include "superopt/factorization.hpp"

namespace superopt {

struct SuperoptValues {
  std::vector<double> values;         // nonincreasing
  std::vector<Index> multiplicities;  // cumulative breakpoints r_1 < r_2 < ...
  Index iota = 0;                     // number of distinct nonzero values
};

// One level of the block diagonalization
//   Phi - F = conj(W) diag(sigma U, Psi) V^*,  V = (Upsilon, conj Theta),
//   W^t = (Omega, conj Xi).
struct FactorBlock {
  double sigma = 0.0;
  Index r = 0;
  MatFun U;             // r x r unitary-valued
  BalancedPair pair_v;  // upsilon = Upsilon, theta = Theta
  BalancedPair pair_w;  // upsilon = Omega, theta = Xi
  int index_sum = 0;    // index of the Toeplitz operator with symbol U
};

struct CanonicalFactorization {
  Index m = 0;
  Index n = 0;
  int grid = 0;
  MatFun best_approx;
  // Factors of deeper blocks live in the lower-right corner of the previous
  // level: block j acts on dimensions reduced by r_0 + ... + r_{j-1}.
  std::vector<FactorBlock> blocks;
  std::optional<MatFun> residual;  // set when stopped by Options::max_levels
  double residual_hankel_norm = 0.0;
  SuperoptValues svals;
  // Antianalytic symbol entering each level. Entry blocks.size() is what is
  // left after the last block (possibly with an empty dimension).
  std::vector<MatFun> level_symbols;
  double lsq_residual = 0.0;  // worst residual of the lower-level solves
};

struct StepResult {
  double sigma = 0.0;
  Index p = 0;  // multiplicity of the top Hankel singular value
  Index r = 0;
  MatFun U;
  BalancedPair pair_v;
  BalancedPair pair_w;
  MatFun psi;        // superoptimal error of the lower-right residual
  MatFun psi_minus;  // antianalytic representative of the residual
  MatFun F;
  std::vector<MatFun> maximizers;     // top right singular vectors as polynomials
  std::vector<MatFun> co_maximizers;  // same for the transposed symbol
};

struct NehariResult {
  double sigma = 0.0;
  MatFun F;
  MatFun error;
};

// Working grid for a symbol: Options::grid when set, else at least 1024.
int working_grid(const MatFun& phi, const Options& opts);

NehariResult nehari_best_approx(const MatFun& phi, const Options& opts = {});
StepResult canonical_step(const MatFun& phi, const Options& opts = {});
// Same as canonical_step with a single maximizing vector, so r = 1.
StepResult thematic_step(const MatFun& phi, const Options& opts = {});

struct ThematicRoute {
  std::vector<StepResult> steps;  // psi is left empty, psi_minus is set
  std::vector<int> indices;       // index of the Toeplitz operator of each u_j
  MatFun theta_product;
  MatFun xi_product;
  MatFun delta;  // antianalytic residual after the last step
};
ThematicRoute thematic_route(const MatFun& phi, Index steps, const Options& opts = {});

CanonicalFactorization canonical_factorize(const MatFun& phi, const Options& opts = {});

// Grid samples of conj(W_0) ... diag(sigma_j U_j, residual) ... V_0^* + F.
Grid reconstruct_grid(const CanonicalFactorization& cf, int N);
MatFun reconstruct(const CanonicalFactorization& cf, Index m, Index n);

SuperoptValues values_from_blocks(const std::vector<FactorBlock>& blocks, Index min_dim,
                                  bool complete);

}  // namespace superopt
