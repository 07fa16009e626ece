#ifndef BLOCKFW_BOUNDS_HPP_
#define BLOCKFW_BOUNDS_HPP_

// Distance bounds between the dual cone of FW(alpha, 2) and the PSD cone
// (unit-norm matrices), and the matrices attaining them.

#include <cmath>
#include <cstdint>
#include <numeric>

#include "blockfw/cone.hpp"
#include "blockfw/errors.hpp"
#include "blockfw/linalg.hpp"
#include "blockfw/partition.hpp"

namespace blockfw {

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction make(std::int64_t n, std::int64_t d) {
    detail::require(d != 0, ErrorKind::invalid_argument, "zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const std::int64_t g = std::gcd(n, d);
    return {n / (g ? g : 1), d / (g ? g : 1)};
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Fraction&) const = default;
};

// (p - 2) / p
inline Fraction upper_bound_dist(int p) {
  detail::require(p >= 2, ErrorKind::invalid_argument, "bounds need p >= 2");
  return Fraction::make(p - 2, p);
}

// ((p - 2) / p) / sqrt(4n/p^2 - 4/p + 1); a valid lower bound when p | n.
inline double lower_bound_dist(int n, int p) {
  detail::require(p >= 2, ErrorKind::invalid_argument, "bounds need p >= 2");
  detail::require(n >= p, ErrorKind::invalid_argument, "bounds need n >= p");
  const double nd = n, pd = p;
  return upper_bound_dist(p).value() / std::sqrt(4.0 * nd / (pd * pd) - 4.0 / pd + 1.0);
}

// (a + b) I - a 11^T
inline SymMatrix g_matrix(double a, double b, int n) {
  detail::require(n >= 1, ErrorKind::invalid_argument, "g_matrix needs n >= 1");
  Matrix m = Matrix::Constant(n, n, -a);
  m.diagonal().array() += a + b;
  return SymMatrix(m);
}

struct Witness {
  SymMatrix matrix;
  double distance = 0.0;  // (n - alpha_max) a_hat, its distance to the PSD cone
  double a_hat = 0.0;
  double b_hat = 0.0;
};

// Unit-norm G(a_hat, b_hat, n) on the boundary of the dual cone for the
// homogeneous partition with p blocks, as far from the PSD cone as the lower
// bound states.
inline Witness worst_case_witness(int n, int p) {
  detail::require(p >= 2 && n >= p && n % p == 0, ErrorKind::invalid_argument,
                  "witness needs a homogeneous partition (p | n, p >= 2)");
  const double nd = n;
  const double amax = 2.0 * nd / p;
  Witness w;
  w.a_hat = 1.0 / std::sqrt((amax - 1.0) * (amax - 1.0) * nd + nd * (nd - 1.0));
  w.b_hat = (amax - 1.0) * w.a_hat;
  w.matrix = g_matrix(w.a_hat, w.b_hat, n);
  w.distance = (nd - amax) * w.a_hat;
  return w;
}

struct DualHat {
  SymMatrix m_hat;        // sum of lifted pair submatrices of M
  double residual = 0.0;  // ||M - (2/p) M_hat||_F
};

// For M in the dual cone, M_hat = sum_ij lift(E_ij M E_ij^T) lies in the cone
// itself; its diagonal blocks are (p - 1) M_ii and off-diagonal blocks M_ij,
// so (2/p) M_hat is within ((p - 2)/p) ||M||_F of M. M is normalized first.
inline DualHat dual_hat(const SymMatrix& m, const Partition& alpha) {
  detail::require(m.n() == alpha.dim(), ErrorKind::dimension_mismatch,
                  "matrix and partition dimensions differ");
  detail::require(alpha.num_blocks() >= 2, ErrorKind::invalid_argument,
                  "dual_hat needs at least two blocks");
  detail::require(dual_membership(m, alpha, kPsdRelTol).member, ErrorKind::invalid_argument,
                  "matrix is not in the dual cone");
  const double norm = m.frobenius_norm();
  detail::require(norm > 0.0, ErrorKind::invalid_argument, "zero matrix");
  const Matrix unit = m.dense() / norm;
  Matrix hat = Matrix::Zero(m.n(), m.n());
  for (const BlockPair& bp : block_pairs(alpha)) {
    const auto idx = pair_indices(alpha, bp);
    scatter_add(hat, idx, gather(unit, idx));
  }
  DualHat out;
  out.m_hat = SymMatrix(hat);
  out.residual = (unit - (2.0 / alpha.num_blocks()) * hat).norm();
  return out;
}

}  // namespace blockfw

#endif  // BLOCKFW_BOUNDS_HPP_
