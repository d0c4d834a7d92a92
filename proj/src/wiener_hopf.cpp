#include "superopt/wiener_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "superopt/hankel_toeplitz.hpp"
#include "superopt/linalg.hpp"

namespace superopt {

namespace {

constexpr double kRangeFloor = 1e-6;

void require_unitary(const MatFun& U, double tol) {
  if (U.rows() != U.cols() || U.rows() == 0) {
    throw Error(ErrorKind::InvalidInput, "expected a nonempty square symbol");
  }
  const double defect = unitarity_defect(U.samples(std::max(256, default_grid_size(U.band()))));
  if (defect > tol) throw Error(ErrorKind::NotUnitary, "symbol is not unitary-valued", defect);
}

}  // namespace

WienerHopfIndices wh_indices(const MatFun& U_in, double tol) {
  require_unitary(U_in, tol);
  const MatFun U = trim_tail(U_in);
  const int n = static_cast<int>(U.rows());
  const int reach = U.band() + 4;
  std::map<int, int> delta;
  auto dim = [&](int k) {
    auto it = delta.find(k);
    if (it != delta.end()) return it->second;
    const int d = kernel_dimension(U.shifted(k));
    delta.emplace(k, d);
    return d;
  };
  // #{j : d_j <= x} = delta(-x-1) - delta(-x)
  auto count = [&](int x) { return dim(-x - 1) - dim(-x); };

  WienerHopfIndices out;
  int prev = count(-reach);
  if (prev != 0) {
    throw Error(ErrorKind::Inconsistency, "kernel profile has indices below the probing window");
  }
  for (int x = -reach + 1; x <= reach; ++x) {
    const int c = count(x);
    if (c < prev || c > n) {
      throw Error(ErrorKind::Inconsistency, "kernel profile is not produced by any index vector");
    }
    for (int j = prev; j < c; ++j) out.indices.push_back(x);
    prev = c;
    if (c == n) break;
  }
  if (prev != n) {
    throw Error(ErrorKind::Inconsistency, "kernel profile did not reach full count in the window");
  }
  for (int d : out.indices)
    if (d < 0) ++out.negative_count;
  return out;
}

bool is_badly_approximable_scalar(const MatFun& phi, double tol) {
  if (phi.rows() != 1 || phi.cols() != 1) {
    throw Error(ErrorKind::InvalidInput, "expected a scalar symbol");
  }
  if (phi.is_zero()) throw Error(ErrorKind::ZeroInput, "zero symbol");
  const Grid& g = phi.samples(std::max(256, default_grid_size(phi.band())));
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& x : g) {
    lo = std::min(lo, std::abs(x(0, 0)));
    hi = std::max(hi, std::abs(x(0, 0)));
  }
  if (hi - lo > tol * hi) return false;
  const MatFun u = trim_tail(phi.scaled(1.0 / hi));
  return kernel_dimension(u) - kernel_dimension(u.adjoint()) >= 1;
}

VeryBadlyApproximable classify_unitary(const MatFun& U_in, double tol) {
  require_unitary(U_in, tol);
  const MatFun U = trim_tail(U_in);
  VeryBadlyApproximable out;

  const WienerHopfIndices wh = wh_indices(U, tol);
  out.indices_negative = wh.negative_count == static_cast<Index>(wh.indices.size());

  // Dense range: P_{<=d} T_{zU} is onto for a wide enough domain section.
  const MatFun zu = U.shifted(1);
  const int K = zu.band();
  const int d = std::max(2 * K + 32, 64);
  const int D = d + std::max(0, -zu.min_degree()) + 1;
  const BlockOperatorMatrix section(OperatorKind::Toeplitz, zu, D, d + 1);
  const RVector s = dense_svd(section.dense(), false, false).values;
  out.smallest_section_value = s(s.size() - 1);
  out.dense_range = out.smallest_section_value > kRangeFloor;

  out.trivial_kernel = kernel_dimension(zu.adjoint()) == 0;

  if (out.indices_negative != out.dense_range || out.dense_range != out.trivial_kernel) {
    throw Error(ErrorKind::InternalConsistency,
                "index, range and kernel criteria disagree", out.smallest_section_value);
  }
  return out;
}

bool is_very_badly_approximable_unitary(const MatFun& U, double tol) {
  return classify_unitary(U, tol).value();
}

}  // namespace superopt
