#pragma once

#include <vector>

#include "superopt/laurent.hpp"

namespace superopt {

struct WienerHopfIndices {
  std::vector<int> indices;  // nondecreasing
  Index negative_count = 0;
};

// Indices from the kernel dimension profile k -> dim Ker T_{z^k U}, which
// equals sum_j max(0, -d_j - k).
WienerHopfIndices wh_indices(const MatFun& U, double tol = tol::unitary);

bool is_badly_approximable_scalar(const MatFun& phi, double tol = tol::unitary);

struct VeryBadlyApproximable {
  bool indices_negative = false;
  bool dense_range = false;    // range of T_{zU}
  bool trivial_kernel = false;  // kernel of T_{conj(z) U^*}
  double smallest_section_value = 0.0;
  bool value() const { return indices_negative; }
};

// All three criteria are computed and must agree.
VeryBadlyApproximable classify_unitary(const MatFun& U, double tol = tol::unitary);
bool is_very_badly_approximable_unitary(const MatFun& U, double tol = tol::unitary);

}  // namespace superopt
