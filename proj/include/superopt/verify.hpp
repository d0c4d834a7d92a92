#pragma once

#include <string>
#include <vector>

#include "superopt/canonical.hpp"

namespace superopt {

struct CheckRecord {
  std::string name;
  double defect = 0.0;
  double tol = 0.0;
  bool passed = false;
  // False when a premise of the tested statement does not hold; such a record
  // passes vacuously and says so in details.
  bool applicable = true;
  std::string details;
};

struct VerificationReport {
  std::vector<CheckRecord> checks;
  bool overall = true;

  void add(CheckRecord rec);
  const CheckRecord* find(const std::string& name) const;
};

// Record with passed = (defect <= tol); NaN defects fail.
CheckRecord make_record(std::string name, double defect, double tol, std::string details = {});

// Unitary Q minimizing sum over the grid of |a(z) Q - b(z)|_F^2, the polar
// factor of sum a^* b. Also reports the largest pointwise spectral residual.
struct ConstantFit {
  CMatrix Q;
  double residual = 0.0;
};
ConstantFit fit_constant_unitary(const Grid& a, const Grid& b);

// Pointwise singular values of phi - F against the superoptimal values.
CheckRecord check_error_singular_values(const MatFun& phi, const CanonicalFactorization& cf);

// Unitarity, analytic maximal minors of the first r columns, coanalytic
// maximal minors of the last n - r columns and constancy of the determinant.
// Row subsets are enumerated for n <= 4 and sampled otherwise.
CheckRecord check_balanced(const BalancedPair& pair, unsigned long long seed = 1);

// Per block: index of T_U equals the sum of the thematic indices of the same
// level, and T_U^* has trivial kernel. Defect counts violations.
CheckRecord check_index_sum(const CanonicalFactorization& cf,
                            const std::vector<std::vector<int>>& thematic_indices);
// Runs the thematic routes itself.
CheckRecord check_index_sum(const CanonicalFactorization& cf, const Options& opts = {});

// s_j of the next level Hankel operator is at most s_{iota+j} of the current
// one, iota being the block index sum.
CheckRecord check_interlacing(const CanonicalFactorization& cf);

// Norms of the Hankel operators with symbols conj(theta) and conj(upsilon)
// must both be below one.
CheckRecord check_toeplitz_invertibility(const BalancedPair& pair);
// The two norms above coincide.
CheckRecord check_hankel_symmetry(const BalancedPair& pair);
// |H_{conj(a b)}|^2 <= 2 s^2 - s^4 for inner a, b with s the larger of the two
// conjugate Hankel norms. Not applicable when s is not below one.
CheckRecord check_composition_bound(const MatFun& a, const MatFun& b);

// Aligns the factors of two factorizations of left * phi * right (b) and phi
// (a) level by level through fitted constant unitaries.
CheckRecord check_alignment(const CanonicalFactorization& a, const CanonicalFactorization& b,
                            const CMatrix& left, const CMatrix& right,
                            const std::string& name = "uniqueness_mod_unitary");
// Two seeded runs plus a run on a randomly conjugated symbol.
CheckRecord check_uniqueness_mod_unitary(const MatFun& phi, unsigned long long seed_a,
                                         unsigned long long seed_b, const Options& opts = {});

// Rebuilds the function from the blocks alone and requires zero to be its
// superoptimal approximation with values sigma_j repeated r_j times. The
// defect is max(|F|_inf, 10 |t - t_blocks|) against 1e-7.
CheckRecord check_converse(const CanonicalFactorization& cf, const Options& opts = {});

// The product of the thematic column completions matches the canonical theta
// (and xi) up to a constant unitary, and the residuals agree accordingly.
CheckRecord check_thematic_consistency(const MatFun& phi, const CanonicalFactorization& cf,
                                       const Options& opts = {});
CheckRecord check_thematic_consistency(const CanonicalFactorization& cf, const ThematicRoute& route);

// All of the above on a factorization of phi.
VerificationReport verify_factorization(const MatFun& phi, const CanonicalFactorization& cf,
                                        const Options& opts = {});

}  // namespace superopt
