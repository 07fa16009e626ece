#ifndef BLOCKFW_LINALG_HPP_
#define BLOCKFW_LINALG_HPP_

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "blockfw/errors.hpp"

namespace blockfw {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative tolerance of the global "is PSD" test:
// min eigenvalue >= -kPsdRelTol * (1 + ||A||_F).
inline constexpr double kPsdRelTol = 1e-8;

// Dense real symmetric matrix. Exactly symmetric after construction and all
// entries finite; inputs with asymmetry above the tolerance are rejected.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(Index n) : m_(Matrix::Zero(n, n)) {}

  explicit SymMatrix(const Matrix& m, double asym_tol = 1e-12) : m_(m) {
    detail::require(m.rows() == m.cols(), ErrorKind::dimension_mismatch,
                    "symmetric matrix must be square");
    detail::require(m.allFinite(), ErrorKind::numeric,
                    "matrix has non-finite entries");
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = i + 1; j < m.cols(); ++j) {
        const double gap = std::abs(m(i, j) - m(j, i));
        detail::require(gap <= asym_tol * scale, ErrorKind::validation,
                        "matrix is not symmetric");
        const double mid = 0.5 * (m(i, j) + m(j, i));
        m_(i, j) = mid;
        m_(j, i) = mid;
      }
    }
  }

  SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
      : SymMatrix(from_rows(rows)) {}

  static SymMatrix identity(Index n) {
    return SymMatrix(Matrix(Matrix::Identity(n, n)));
  }
  static SymMatrix zero(Index n) { return SymMatrix(n); }
  static SymMatrix diagonal(const Vector& d) {
    return SymMatrix(Matrix(d.asDiagonal()));
  }
  static SymMatrix ones(Index n) {
    return SymMatrix(Matrix(Matrix::Ones(n, n)));
  }

  Index n() const { return m_.rows(); }
  const Matrix& dense() const { return m_; }
  double operator()(Index i, Index j) const { return m_(i, j); }

  double frobenius_norm() const { return m_.norm(); }
  double inf_norm() const {
    return m_.size() == 0 ? 0.0 : m_.cwiseAbs().rowwise().sum().maxCoeff();
  }

  SymMatrix operator+(const SymMatrix& o) const { return SymMatrix(sum(o, 1.0)); }
  SymMatrix operator-(const SymMatrix& o) const { return SymMatrix(sum(o, -1.0)); }
  SymMatrix operator-() const { return SymMatrix(Matrix(-m_)); }
  SymMatrix operator*(double s) const { return SymMatrix(Matrix(s * m_)); }
  friend SymMatrix operator*(double s, const SymMatrix& a) { return a * s; }

  bool operator==(const SymMatrix& o) const {
    return m_.rows() == o.m_.rows() && m_ == o.m_;
  }

 private:
  Matrix sum(const SymMatrix& o, double sign) const {
    detail::require(n() == o.n(), ErrorKind::dimension_mismatch,
                    "matrix sizes differ");
    return m_ + sign * o.m_;
  }

  static Matrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Index>(rows.size());
    Matrix m(n, n);
    Index i = 0;
    for (const auto& row : rows) {
      detail::require(static_cast<Index>(row.size()) == n,
                      ErrorKind::dimension_mismatch, "ragged matrix literal");
      Index j = 0;
      for (double v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  Matrix m_;
};

// Trace inner product <A, B>.
inline double inner(const Matrix& a, const Matrix& b) {
  return a.cwiseProduct(b).sum();
}
inline double inner(const SymMatrix& a, const SymMatrix& b) {
  return inner(a.dense(), b.dense());
}

struct EigenDecomposition {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns
};

inline EigenDecomposition sym_eig(const Matrix& a) {
  detail::require(a.rows() >= 1, ErrorKind::invalid_argument,
                  "eigendecomposition of an empty matrix");
  detail::require(a.allFinite(), ErrorKind::numeric,
                  "eigendecomposition of a non-finite matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  detail::require(solver.info() == Eigen::Success, ErrorKind::numeric,
                  "symmetric eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}
inline EigenDecomposition sym_eig(const SymMatrix& a) { return sym_eig(a.dense()); }

inline double min_eigenvalue(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  if (a.rows() == 1) return a(0, 0);
  if (a.rows() == 2) {
    const double mid = 0.5 * (a(0, 0) + a(1, 1));
    const double rad = std::hypot(0.5 * (a(0, 0) - a(1, 1)), a(0, 1));
    return mid - rad;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  detail::require(solver.info() == Eigen::Success, ErrorKind::numeric,
                  "symmetric eigensolver did not converge");
  return solver.eigenvalues()(0);
}
inline double min_eigenvalue(const SymMatrix& a) { return min_eigenvalue(a.dense()); }

inline bool is_psd(const Matrix& a, double rel_tol = kPsdRelTol) {
  return min_eigenvalue(a) >= -rel_tol * (1.0 + a.norm());
}
inline bool is_psd(const SymMatrix& a, double rel_tol = kPsdRelTol) {
  return is_psd(a.dense(), rel_tol);
}

namespace detail {

// Replaces `a` (symmetric) by its projection onto the PSD cone. Closed forms
// for orders 1 and 2, which dominate the trivial-partition workloads.
inline void project_psd_inplace(Matrix& a) {
  const Index n = a.rows();
  if (n == 0) return;
  if (n == 1) {
    a(0, 0) = std::max(a(0, 0), 0.0);
    return;
  }
  if (n == 2) {
    const double p = a(0, 0), q = a(1, 1), r = a(0, 1);
    const double mid = 0.5 * (p + q);
    const double rad = std::hypot(0.5 * (p - q), r);
    const double hi = mid + rad, lo = mid - rad;
    if (lo >= 0.0) return;
    if (hi <= 0.0) {
      a.setZero();
      return;
    }
    // eigenvector of hi
    double vx, vy;
    if (p >= q) {
      vx = hi - q;
      vy = r;
    } else {
      vx = r;
      vy = hi - p;
    }
    const double len2 = vx * vx + vy * vy;
    if (len2 <= 0.0) {
      a.setZero();
      a(0, 0) = std::max(p, 0.0);
      a(1, 1) = std::max(q, 0.0);
      return;
    }
    const double s = hi / len2;
    a(0, 0) = s * vx * vx;
    a(1, 1) = s * vy * vy;
    a(0, 1) = a(1, 0) = s * vx * vy;
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  detail::require(solver.info() == Eigen::Success, ErrorKind::numeric,
                  "symmetric eigensolver did not converge");
  const Vector& w = solver.eigenvalues();
  if (w(0) >= 0.0) return;
  const Matrix& v = solver.eigenvectors();
  Index first = 0;
  while (first < n && w(first) <= 0.0) ++first;
  const Index k = n - first;
  if (k == 0) {
    a.setZero();
    return;
  }
  if (first <= k) {
    // subtract the (smaller) negative part
    const auto vn = v.leftCols(first);
    a.noalias() -= vn * w.head(first).asDiagonal() * vn.transpose();
    a = 0.5 * (a + a.transpose()).eval();
    return;
  }
  const auto vk = v.rightCols(k);
  a.noalias() = vk * w.tail(k).asDiagonal() * vk.transpose();
}

}  // namespace detail

inline Matrix project_psd(const Matrix& a) {
  detail::require(a.allFinite(), ErrorKind::numeric, "non-finite matrix");
  Matrix out = a;
  detail::project_psd_inplace(out);
  return out;
}
inline SymMatrix project_psd(const SymMatrix& a) {
  return SymMatrix(project_psd(a.dense()), 1e-9);
}

// Frobenius distance to the PSD cone: sqrt(sum of squared negative eigenvalues).
inline double dist_psd(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  const Vector w = sym_eig(a).values;
  double acc = 0.0;
  for (Index i = 0; i < w.size(); ++i) {
    if (w(i) < 0.0) acc += w(i) * w(i);
  }
  return std::sqrt(acc);
}
inline double dist_psd(const SymMatrix& a) { return dist_psd(a.dense()); }

struct CholeskyResult {
  bool ok = false;
  Matrix factor;       // lower triangular, factor * factor^T = A + shift * I
  double shift = 0.0;  // <= tol
  double residual = 0.0;  // ||factor factor^T - A||_F
};

// Cholesky factorization for PSD (possibly singular) matrices. Fails iff the
// smallest eigenvalue is below -tol; the diagonal shift used never exceeds tol.
inline CholeskyResult cholesky_psd(const Matrix& a, double tol) {
  detail::require(tol >= 0.0, ErrorKind::invalid_argument, "negative tolerance");
  CholeskyResult out;
  const Index n = a.rows();
  if (n == 0) {
    out.ok = true;
    return out;
  }
  const double lmin = min_eigenvalue(a);
  if (lmin < -tol) return out;
  out.shift = std::max(0.0, -lmin);
  Matrix b = a;
  b.diagonal().array() += out.shift;

  // pivots at or below this level are treated as exact zeros
  const double pivot_floor = 64.0 * std::numeric_limits<double>::epsilon() *
                             (1.0 + b.diagonal().cwiseAbs().maxCoeff());
  Matrix l = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    double d = b(j, j);
    for (Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= pivot_floor) continue;
    const double root = std::sqrt(d);
    l(j, j) = root;
    for (Index i = j + 1; i < n; ++i) {
      double s = b(i, j);
      for (Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / root;
    }
  }
  out.residual = (l * l.transpose() - a).norm();
  out.factor = std::move(l);
  out.ok = true;
  return out;
}
inline CholeskyResult cholesky_psd(const SymMatrix& a, double tol) {
  return cholesky_psd(a.dense(), tol);
}

// Gathers the principal submatrix a[idx, idx].
inline Matrix gather(const Matrix& a, std::span<const Index> idx) {
  const auto k = static_cast<Index>(idx.size());
  Matrix out(k, k);
  for (Index c = 0; c < k; ++c) {
    for (Index r = 0; r < k; ++r) out(r, c) = a(idx[r], idx[c]);
  }
  return out;
}

// a[idx, idx] += weight * block
inline void scatter_add(Matrix& a, std::span<const Index> idx, const Matrix& block,
                        double weight = 1.0) {
  const auto k = static_cast<Index>(idx.size());
  for (Index c = 0; c < k; ++c) {
    for (Index r = 0; r < k; ++r) a(idx[r], idx[c]) += weight * block(r, c);
  }
}

}  // namespace blockfw

#endif  // BLOCKFW_LINALG_HPP_
