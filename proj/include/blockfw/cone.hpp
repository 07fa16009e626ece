#ifndef BLOCKFW_CONE_HPP_
#define BLOCKFW_CONE_HPP_

// The block factor-width-two cone FW(alpha, 2): matrices of the form
//   Z = sum_{i<j} E_ij^T X_ij E_ij,  X_ij PSD of order k_i + k_j,
// and its dual, the matrices whose pair principal submatrices are all PSD.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "blockfw/errors.hpp"
#include "blockfw/linalg.hpp"
#include "blockfw/partition.hpp"

namespace blockfw {

// Pair blocks X_ij (i < j) realizing a matrix in FW(alpha, 2). Missing pairs
// are zero.
struct FwDecomposition {
  Partition alpha;
  std::map<BlockPair, SymMatrix> blocks;
};

struct DecompositionReport {
  bool passed = false;
  std::vector<std::pair<BlockPair, double>> block_min_eigs;
  double worst_min_eig = 0.0;
  double residual = 0.0;  // ||recompose - target||_F
};

enum class MembershipStatus { member, non_member, inconclusive };

inline const char* to_string(MembershipStatus s) {
  switch (s) {
    case MembershipStatus::member: return "member";
    case MembershipStatus::non_member: return "non_member";
    case MembershipStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

struct MembershipResult {
  MembershipStatus status = MembershipStatus::inconclusive;
  std::optional<FwDecomposition> decomposition;
  // Y in the dual cone with <Y, A> < 0 (non-members only)
  std::optional<SymMatrix> separator;
  double gap = 0.0;  // final projection distance
  int iterations = 0;
};

// Z_ij of order k_i for every ordered pair i != j.
struct CertificateZ {
  Partition alpha;
  std::map<BlockPair, SymMatrix> z;
};

struct DualCheck {
  bool member = false;
  BlockPair worst;
  double worst_min_eig = 0.0;
};

struct FwProjection {
  SymMatrix point;  // in FW(alpha, 2)
  FwDecomposition decomposition;
  double distance = 0.0;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

inline void check_pair(const Partition& alpha, BlockPair bp) {
  require(bp.i >= 0 && bp.i < bp.j && bp.j < alpha.num_blocks(),
          ErrorKind::invalid_decomposition, "pair index out of range");
}

inline Matrix recompose_dense(const FwDecomposition& dec) {
  const Partition& alpha = dec.alpha;
  Matrix out = Matrix::Zero(alpha.dim(), alpha.dim());
  for (const auto& [bp, x] : dec.blocks) {
    check_pair(alpha, bp);
    require(x.n() == alpha.block_size(bp.i) + alpha.block_size(bp.j),
            ErrorKind::invalid_decomposition, "pair block has the wrong order");
    const auto idx = pair_indices(alpha, bp);
    scatter_add(out, idx, x.dense());
  }
  return out;
}

}  // namespace detail

inline SymMatrix recompose(const FwDecomposition& dec) {
  return SymMatrix(detail::recompose_dense(dec));
}

inline DecompositionReport validate_decomposition(const FwDecomposition& dec,
                                                  const SymMatrix& target, double tol) {
  detail::require(target.n() == dec.alpha.dim(), ErrorKind::dimension_mismatch,
                  "target and partition dimensions differ");
  DecompositionReport rep;
  for (const auto& [bp, x] : dec.blocks) {
    const double lmin = min_eigenvalue(x);
    rep.block_min_eigs.emplace_back(bp, lmin);
    rep.worst_min_eig = std::min(rep.worst_min_eig, lmin);
  }
  rep.residual = (detail::recompose_dense(dec) - target.dense()).norm();
  rep.passed = rep.worst_min_eig >= -tol &&
               rep.residual <= tol * (1.0 + target.frobenius_norm());
  return rep;
}

// Every pair principal submatrix PSD within tol * (1 + ||A||_F).
inline DualCheck dual_membership(const SymMatrix& a, const Partition& alpha, double tol) {
  detail::require(a.n() == alpha.dim(), ErrorKind::dimension_mismatch,
                  "matrix and partition dimensions differ");
  const double threshold = -tol * (1.0 + a.frobenius_norm());
  DualCheck out;
  if (alpha.num_blocks() == 1) {
    out.worst_min_eig = min_eigenvalue(a);
    out.member = out.worst_min_eig >= threshold;
    return out;
  }
  bool first = true;
  for (const BlockPair& bp : block_pairs(alpha)) {
    const double lmin = min_eigenvalue(truncate(a.dense(), alpha, bp));
    if (first || lmin < out.worst_min_eig) {
      out.worst_min_eig = lmin;
      out.worst = bp;
      first = false;
    }
  }
  out.member = out.worst_min_eig >= threshold;
  return out;
}

namespace detail {

// Cyclic Dykstra over the sets C_ij = {Y : E_ij Y E_ij^T NSD}, whose
// intersection is the polar of FW(alpha, 2). The increment of set C_ij is the
// lift of a PSD pair block, and A = x + sum of increments at every step, so
// A - x is always a point of the cone with explicit decomposition. This is
// exact block-coordinate minimization of ||A - sum lifts||_F, hence ||x|| is
// non-increasing.
class DykstraProjector {
 public:
  DykstraProjector(const Matrix& a, const Partition& alpha) : alpha_(alpha), x_(a) {
    require(alpha.num_blocks() >= 2, ErrorKind::invalid_argument,
            "projection needs at least two blocks");
    require(a.rows() == alpha.dim(), ErrorKind::dimension_mismatch,
            "matrix and partition dimensions differ");
    for (const BlockPair& bp : block_pairs(alpha)) {
      pairs_.push_back(bp);
      idx_.push_back(pair_indices(alpha, bp));
      const auto k = static_cast<Index>(idx_.back().size());
      inc_.push_back(Matrix::Zero(k, k));
    }
  }

  // One sweep over all pairs; returns the Frobenius norm of the change in
  // the increments.
  double sweep() {
    double change2 = 0.0;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const auto& idx = idx_[k];
      work_ = gather(x_, idx);
      work_ += inc_[k];
      Matrix psd = work_;
      project_psd_inplace(psd);
      change2 += (psd - inc_[k]).squaredNorm();
      work_ -= psd;
      const auto n = static_cast<Index>(idx.size());
      for (Index c = 0; c < n; ++c) {
        for (Index r = 0; r < n; ++r) x_(idx[r], idx[c]) = work_(r, c);
      }
      inc_[k] = std::move(psd);
    }
    ++iterations_;
    return std::sqrt(change2);
  }

  double distance() const { return x_.norm(); }
  const Matrix& residual() const { return x_; }
  int iterations() const { return iterations_; }

  FwDecomposition decomposition() const {
    FwDecomposition dec{alpha_, {}};
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      dec.blocks.emplace(pairs_[k], SymMatrix(sym(inc_[k]), 1e-6));
    }
    return dec;
  }

  // Decomposition of A itself: the residual x is folded into the pair blocks
  // (off-diagonal blocks exactly, diagonal blocks split evenly over the p-1
  // pairs containing them).
  FwDecomposition absorbed_decomposition() const {
    const int p = alpha_.num_blocks();
    FwDecomposition dec{alpha_, {}};
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const BlockPair bp = pairs_[k];
      Matrix blk = inc_[k];
      const Index ki = alpha_.block_size(bp.i), kj = alpha_.block_size(bp.j);
      blk.topLeftCorner(ki, ki) += block_of(x_, alpha_, bp.i, bp.i) / (p - 1);
      blk.bottomRightCorner(kj, kj) += block_of(x_, alpha_, bp.j, bp.j) / (p - 1);
      blk.topRightCorner(ki, kj) += block_of(x_, alpha_, bp.i, bp.j);
      blk.bottomLeftCorner(kj, ki) += block_of(x_, alpha_, bp.j, bp.i);
      dec.blocks.emplace(bp, SymMatrix(sym(blk), 1e-6));
    }
    return dec;
  }

 private:
  static Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

  Partition alpha_;
  Matrix x_;
  std::vector<BlockPair> pairs_;
  std::vector<std::vector<Index>> idx_;
  std::vector<Matrix> inc_;
  Matrix work_;
  int iterations_ = 0;
};

// Separator candidate Y = P - A = -x, shifted by a multiple of the identity
// (interior of the dual cone) to remove residual dual infeasibility.
inline std::optional<SymMatrix> verified_separator(const Matrix& x, const SymMatrix& a,
                                                   const Partition& alpha) {
  Matrix y = -0.5 * (x + x.transpose());
  const double ynorm = y.norm();
  if (ynorm == 0.0) return std::nullopt;
  SymMatrix ys(y);
  const DualCheck dc = dual_membership(ys, alpha, 0.0);
  if (dc.worst_min_eig < 0.0) {
    y.diagonal().array() += -dc.worst_min_eig * (1.0 + 1e-12);
    ys = SymMatrix(y);
  }
  if (!dual_membership(ys, alpha, 1e-14).member) return std::nullopt;
  const double value = inner(ys, a);
  if (value < -1e-8 * ys.frobenius_norm() * a.frobenius_norm()) return ys;
  return std::nullopt;
}

}  // namespace detail

// Z_ij = X_ij,1 (i < j) and Z_ji = X_ij,3. Pairs whose off-diagonal block of
// A is exactly zero get Z_ij = Z_ji = 0.
inline CertificateZ certificate_from_decomposition(const FwDecomposition& dec,
                                                   const SymMatrix& a) {
  const Partition& alpha = dec.alpha;
  CertificateZ cert{alpha, {}};
  for (const BlockPair& bp : block_pairs(alpha)) {
    const Index ki = alpha.block_size(bp.i), kj = alpha.block_size(bp.j);
    Matrix zi = Matrix::Zero(ki, ki), zj = Matrix::Zero(kj, kj);
    auto it = dec.blocks.find(bp);
    const bool zero_link = block_of(a.dense(), alpha, bp.i, bp.j).cwiseAbs().maxCoeff() == 0.0;
    if (it != dec.blocks.end() && !zero_link) {
      zi = it->second.dense().topLeftCorner(ki, ki);
      zj = it->second.dense().bottomRightCorner(kj, kj);
    }
    cert.z.emplace(BlockPair{bp.i, bp.j}, SymMatrix(zi));
    cert.z.emplace(BlockPair{bp.j, bp.i}, SymMatrix(zj));
  }
  return cert;
}

struct CertificateCheck {
  bool passed = false;
  double worst_slack_eig = 0.0;  // min eig of A_ii - sum_j Z_ij over i
  double worst_link_eig = 0.0;   // min eig of [[Z_ij, A_ij], [*, Z_ji]] over i < j
};

inline CertificateCheck check_certificate(const CertificateZ& cert, const SymMatrix& a,
                                          double tol) {
  const Partition& alpha = cert.alpha;
  detail::require(a.n() == alpha.dim(), ErrorKind::dimension_mismatch,
                  "certificate and matrix dimensions differ");
  const int p = alpha.num_blocks();
  CertificateCheck out;
  out.worst_slack_eig = std::numeric_limits<double>::infinity();
  out.worst_link_eig = std::numeric_limits<double>::infinity();
  auto z_of = [&](int i, int j) -> const Matrix& {
    auto it = cert.z.find(BlockPair{i, j});
    detail::require(it != cert.z.end(), ErrorKind::invalid_certificate,
                    "certificate is missing a block");
    return it->second.dense();
  };
  for (int i = 0; i < p; ++i) {
    Matrix q = block_of(a.dense(), alpha, i, i);
    for (int j = 0; j < p; ++j) {
      if (j != i) q -= z_of(i, j);
    }
    out.worst_slack_eig = std::min(out.worst_slack_eig, min_eigenvalue(q));
  }
  for (const BlockPair& bp : block_pairs(alpha)) {
    const Index ki = alpha.block_size(bp.i), kj = alpha.block_size(bp.j);
    Matrix link(ki + kj, ki + kj);
    link.topLeftCorner(ki, ki) = z_of(bp.i, bp.j);
    link.bottomRightCorner(kj, kj) = z_of(bp.j, bp.i);
    link.topRightCorner(ki, kj) = block_of(a.dense(), alpha, bp.i, bp.j);
    link.bottomLeftCorner(kj, ki) = block_of(a.dense(), alpha, bp.j, bp.i);
    out.worst_link_eig = std::min(out.worst_link_eig, min_eigenvalue(link));
  }
  if (p < 2) out.worst_link_eig = 0.0;
  const double threshold = -tol * (1.0 + a.frobenius_norm());
  out.passed = out.worst_slack_eig >= threshold && out.worst_link_eig >= threshold;
  return out;
}

// X_ij = [[Z_ij + Q_ii/(p-1), A_ij], [*, Z_ji + Q_jj/(p-1)]] with
// Q_ii = A_ii - sum_j Z_ij.
inline FwDecomposition certificate_to_decomposition(const CertificateZ& cert,
                                                    const SymMatrix& a,
                                                    double tol = kPsdRelTol) {
  const Partition& alpha = cert.alpha;
  detail::require(alpha.num_blocks() >= 2, ErrorKind::invalid_argument,
                  "certificate needs at least two blocks");
  detail::require(check_certificate(cert, a, tol).passed, ErrorKind::invalid_certificate,
                  "certificate conditions do not hold");
  const int p = alpha.num_blocks();
  std::vector<Matrix> slack(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    Matrix q = block_of(a.dense(), alpha, i, i);
    for (int j = 0; j < p; ++j) {
      if (j != i) q -= cert.z.at(BlockPair{i, j}).dense();
    }
    slack[static_cast<std::size_t>(i)] = q / static_cast<double>(p - 1);
  }
  FwDecomposition dec{alpha, {}};
  for (const BlockPair& bp : block_pairs(alpha)) {
    const Index ki = alpha.block_size(bp.i), kj = alpha.block_size(bp.j);
    Matrix x(ki + kj, ki + kj);
    x.topLeftCorner(ki, ki) =
        cert.z.at(bp).dense() + slack[static_cast<std::size_t>(bp.i)];
    x.bottomRightCorner(kj, kj) =
        cert.z.at(BlockPair{bp.j, bp.i}).dense() + slack[static_cast<std::size_t>(bp.j)];
    x.topRightCorner(ki, kj) = block_of(a.dense(), alpha, bp.i, bp.j);
    x.bottomLeftCorner(kj, ki) = block_of(a.dense(), alpha, bp.j, bp.i);
    dec.blocks.emplace(bp, SymMatrix(Matrix(0.5 * (x + x.transpose()))));
  }
  return dec;
}

namespace detail {

// Z_ij = ||A_ij||_2 I: satisfies the link condition for every pair, so A
// (plus shift * I) is a member whenever the block rows are dominant.
inline CertificateZ gershgorin_certificate(const SymMatrix& a, const Partition& alpha) {
  CertificateZ cert{alpha, {}};
  for (const BlockPair& bp : block_pairs(alpha)) {
    const Matrix blk = block_of(a.dense(), alpha, bp.i, bp.j);
    const double s =
        blk.cwiseAbs().maxCoeff() == 0.0 ? 0.0 : Eigen::JacobiSVD<Matrix>(blk).singularValues()(0);
    cert.z.emplace(bp, SymMatrix::identity(alpha.block_size(bp.i)) * s);
    cert.z.emplace(BlockPair{bp.j, bp.i}, SymMatrix::identity(alpha.block_size(bp.j)) * s);
  }
  return cert;
}

}  // namespace detail

// Nearest point of FW(alpha, 2) to A in Frobenius norm, with its pair-block
// decomposition. Stops once the increments move less than tol.
inline FwProjection project_fw(const SymMatrix& a, const Partition& alpha,
                               int max_iters, double tol) {
  detail::DykstraProjector proj(a.dense(), alpha);
  FwProjection out;
  for (int it = 0; it < max_iters; ++it) {
    if (proj.sweep() <= tol) {
      out.converged = true;
      break;
    }
  }
  out.iterations = proj.iterations();
  out.decomposition = proj.decomposition();
  out.point = recompose(out.decomposition);
  out.distance = proj.distance();
  return out;
}

inline constexpr int kDefaultMembershipIters = 200000;

namespace detail {

// s_i = a_ii^{-1/2} (1 where a_ii <= 0); diag(s) A diag(s) has unit diagonal.
// Membership is invariant under this congruence and the projection converges
// far faster on the equilibrated matrix.
inline Vector unit_diagonal_scaling(const SymMatrix& a) {
  Vector s(a.n());
  for (Index i = 0; i < a.n(); ++i) s(i) = a(i, i) > 0.0 ? 1.0 / std::sqrt(a(i, i)) : 1.0;
  return s;
}

// Pair blocks of diag(s) A diag(s) mapped back to blocks of A.
inline FwDecomposition unscale_decomposition(const FwDecomposition& dec, const Vector& s) {
  FwDecomposition out{dec.alpha, {}};
  for (const auto& [bp, x] : dec.blocks) {
    const auto idx = pair_indices(dec.alpha, bp);
    Vector inv(static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) inv(static_cast<Index>(k)) = 1.0 / s(idx[k]);
    out.blocks.emplace(bp, SymMatrix(Matrix(inv.asDiagonal() * x.dense() * inv.asDiagonal())));
  }
  return out;
}

}  // namespace detail

// Decides A in FW(alpha, 2). A certificate Z_ij = ||A_ij||_2 I is tried
// first; otherwise A is scaled to unit diagonal and projected onto the cone:
// member when the (scaled) distance drops to tol, with the decomposition
// mapped back to A; non-member when a separating matrix verifies against A
// itself; inconclusive otherwise.
inline MembershipResult certify_membership(const SymMatrix& a, const Partition& alpha,
                                           double tol,
                                           int max_iters = kDefaultMembershipIters) {
  detail::require(a.n() == alpha.dim(), ErrorKind::dimension_mismatch,
                  "matrix and partition dimensions differ");
  detail::require(alpha.num_blocks() >= 2, ErrorKind::invalid_argument,
                  "membership needs at least two blocks");
  MembershipResult out;
  const CertificateZ dominant = detail::gershgorin_certificate(a, alpha);
  if (check_certificate(dominant, a, 1e-13).passed) {
    out.status = MembershipStatus::member;
    out.decomposition = certificate_to_decomposition(dominant, a, 1e-13);
    return out;
  }
  const Vector s = detail::unit_diagonal_scaling(a);
  const Matrix scaled = s.asDiagonal() * a.dense() * s.asDiagonal();
  detail::DykstraProjector proj(scaled, alpha);
  const double inc_tol = 1e-14 * (1.0 + scaled.norm());
  int check_every = 16;
  for (int it = 0; it < max_iters; ++it) {
    const double change = proj.sweep();
    const double dist = proj.distance();
    if (dist <= tol) {
      out.status = MembershipStatus::member;
      out.decomposition = detail::unscale_decomposition(proj.absorbed_decomposition(), s);
      break;
    }
    const bool last = change <= inc_tol || it + 1 == max_iters;
    if (last || proj.iterations() % check_every == 0) {
      const Matrix x = s.asDiagonal() * proj.residual() * s.asDiagonal();
      if (auto y = detail::verified_separator(x, a, alpha)) {
        out.status = MembershipStatus::non_member;
        out.separator = std::move(y);
        break;
      }
      check_every = std::min(check_every * 2, 512);
    }
    if (last) break;
  }
  out.gap = proj.distance();
  out.iterations = proj.iterations();
  return out;
}

// Certificate (Z_ij) for a member of FW(alpha, 2), absent for non-members or
// when the certificate fails verification at tol.
inline std::optional<CertificateZ> membership_certificate(const SymMatrix& a,
                                                          const Partition& alpha,
                                                          double tol) {
  const MembershipResult res = certify_membership(a, alpha, tol);
  if (res.status != MembershipStatus::member) return std::nullopt;
  CertificateZ cert = certificate_from_decomposition(*res.decomposition, a);
  if (!check_certificate(cert, a, std::max(tol, kPsdRelTol)).passed) return std::nullopt;
  return cert;
}

// Re-expresses a decomposition under a coarser partition. A fine pair whose
// blocks land in different coarse blocks I < J is lifted into the coarse pair
// (I, J); a fine pair inside one coarse block I is spread evenly over the
// q - 1 coarse pairs containing I. For a merge of the last two blocks this is
// exactly the elementary three-term construction.
inline FwDecomposition coarsen_decomposition(const FwDecomposition& dec,
                                             const SubPartitionWitness& witness) {
  const Partition& fine = dec.alpha;
  const auto& bounds = witness.merge_bounds;
  detail::require(bounds.size() >= 2 && bounds.front() == 0 &&
                      witness.num_fine() == fine.num_blocks(),
                  ErrorKind::invalid_argument, "witness does not match the partition");
  for (std::size_t g = 0; g + 1 < bounds.size(); ++g) {
    detail::require(bounds[g] < bounds[g + 1], ErrorKind::invalid_argument,
                    "witness bounds must increase");
  }
  const int q = witness.num_coarse();
  detail::require(q >= 2, ErrorKind::invalid_argument,
                  "coarse partition needs at least two blocks");
  std::vector<int> coarse_sizes;
  for (int g = 0; g < q; ++g) {
    coarse_sizes.push_back(fine.offset(bounds[static_cast<std::size_t>(g) + 1]) -
                           fine.offset(bounds[static_cast<std::size_t>(g)]));
  }
  const Partition coarse(coarse_sizes);

  std::map<BlockPair, Matrix> acc;
  for (const BlockPair& cp : block_pairs(coarse)) {
    const int k = coarse.block_size(cp.i) + coarse.block_size(cp.j);
    acc.emplace(cp, Matrix::Zero(k, k));
  }
  // position of global index r inside the local coordinates of coarse pair cp
  auto local = [&](BlockPair cp, int r) -> Index {
    if (r >= coarse.offset(cp.i) && r < coarse.offset(cp.i + 1)) return r - coarse.offset(cp.i);
    return coarse.block_size(cp.i) + (r - coarse.offset(cp.j));
  };
  for (const auto& [fp, x] : dec.blocks) {
    detail::check_pair(fine, fp);
    const auto global = pair_indices(fine, fp);
    const int gi = witness.group_of(fp.i), gj = witness.group_of(fp.j);
    std::vector<std::pair<BlockPair, double>> targets;
    if (gi != gj) {
      targets.push_back({BlockPair{gi, gj}, 1.0});
    } else {
      for (int other = 0; other < q; ++other) {
        if (other == gi) continue;
        targets.push_back({BlockPair{std::min(gi, other), std::max(gi, other)},
                           1.0 / static_cast<double>(q - 1)});
      }
    }
    for (const auto& [cp, w] : targets) {
      std::vector<Index> loc;
      for (Index r : global) loc.push_back(local(cp, static_cast<int>(r)));
      scatter_add(acc.at(cp), loc, x.dense(), w);
    }
  }
  FwDecomposition out{coarse, {}};
  for (auto& [cp, m] : acc) out.blocks.emplace(cp, SymMatrix(m));
  return out;
}

struct DcSplit {
  FwDecomposition plus;   // represents X + shift * I
  FwDecomposition minus;  // represents shift * I
  double shift = 0.0;
};

// X = A - B with A, B in FW(alpha, 2). shift = 0 when X already is a member;
// otherwise the block-Gershgorin shift
//   max_i (sum_{j != i} ||X_ij||_2 - lambda_min(X_ii)),
// for which Z_ij = ||X_ij||_2 I is a valid certificate of X + shift I.
inline DcSplit dc_split(const SymMatrix& x, const Partition& alpha, double tol = 1e-9) {
  detail::require(x.n() == alpha.dim(), ErrorKind::dimension_mismatch,
                  "matrix and partition dimensions differ");
  const int p = alpha.num_blocks();
  detail::require(p >= 2, ErrorKind::invalid_argument, "split needs at least two blocks");
  DcSplit out;
  auto zero_dec = [&]() {
    FwDecomposition d{alpha, {}};
    for (const BlockPair& bp : block_pairs(alpha)) {
      d.blocks.emplace(bp, SymMatrix(alpha.block_size(bp.i) + alpha.block_size(bp.j)));
    }
    return d;
  };
  const MembershipResult res = certify_membership(x, alpha, tol, 20000);
  if (res.status == MembershipStatus::member) {
    out.plus = *res.decomposition;
    out.minus = zero_dec();
    return out;
  }
  const CertificateZ cert = detail::gershgorin_certificate(x, alpha);
  double shift = 0.0;
  for (int i = 0; i < p; ++i) {
    double need = -min_eigenvalue(block_of(x.dense(), alpha, i, i));
    for (int j = 0; j < p; ++j) {
      if (j != i) need += cert.z.at(BlockPair{i, j})(0, 0);
    }
    shift = std::max(shift, need);
  }
  // keep a sliver of slack so rounding cannot break the certificate
  shift += 1e-12 * (1.0 + x.frobenius_norm());
  const SymMatrix shifted = x + SymMatrix::identity(x.n()) * shift;
  out.plus = certificate_to_decomposition(cert, shifted);
  out.shift = shift;
  CertificateZ zero{alpha, {}};
  for (auto& [bp, m] : cert.z) zero.z.emplace(bp, SymMatrix(m.n()));
  out.minus = certificate_to_decomposition(zero, SymMatrix::identity(x.n()) * shift);
  return out;
}

inline bool check_dd(const SymMatrix& a) {
  const double tol = 1e-12 * (1.0 + a.inf_norm());
  for (Index i = 0; i < a.n(); ++i) {
    double off = 0.0;
    for (Index j = 0; j < a.n(); ++j) {
      if (j != i) off += std::abs(a(i, j));
    }
    if (a(i, i) < off - tol) return false;
  }
  return true;
}

// Positive d with diag(d) A diag(d) diagonally dominant, from z satisfying
//   a_ii >= sum_j z_ij,  |a_ij| <= sqrt(z_ij z_ji),  z_ij >= 0
// with a symmetric nonzero pattern. d_i^2 is the left Perron vector of the
// shifted matrix M + xi I, where m_ij = z_ij and m_ii = -sum_j z_ij, taken per
// irreducible component.
inline Vector sdd_scaling_from_z(const Matrix& z, const SymMatrix& a, double tol = 1e-8) {
  const Index n = a.n();
  detail::require(z.rows() == n && z.cols() == n, ErrorKind::dimension_mismatch,
                  "z and A dimensions differ");
  const double scale = 1.0 + a.inf_norm();
  for (Index i = 0; i < n; ++i) {
    double row = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      detail::require(z(i, j) >= -tol * scale, ErrorKind::invalid_certificate,
                      "z has a negative entry");
      detail::require((z(i, j) > 0.0) == (z(j, i) > 0.0), ErrorKind::invalid_certificate,
                      "z has an asymmetric nonzero pattern");
      row += std::max(z(i, j), 0.0);
      if (j > i) {
        detail::require(std::abs(a(i, j)) <=
                            std::sqrt(std::max(z(i, j), 0.0) * std::max(z(j, i), 0.0)) +
                                tol * scale,
                        ErrorKind::invalid_certificate, "|a_ij| exceeds sqrt(z_ij z_ji)");
      }
    }
    detail::require(a(i, i) >= row - tol * scale, ErrorKind::invalid_certificate,
                    "a_ii is below the row sum of z");
  }

  // connected components of the nonzero pattern
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int ncomp = 0;
  for (Index s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<Index> stack{s};
    comp[static_cast<std::size_t>(s)] = ncomp;
    while (!stack.empty()) {
      const Index v = stack.back();
      stack.pop_back();
      for (Index w = 0; w < n; ++w) {
        if (w != v && z(v, w) > 0.0 && comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = ncomp;
          stack.push_back(w);
        }
      }
    }
    ++ncomp;
  }

  Vector d = Vector::Ones(n);
  const int max_iters = static_cast<int>(std::max<Index>(10 * n * n, 50));
  for (int c = 0; c < ncomp; ++c) {
    std::vector<Index> members;
    for (Index v = 0; v < n; ++v) {
      if (comp[static_cast<std::size_t>(v)] == c) members.push_back(v);
    }
    const auto k = static_cast<Index>(members.size());
    if (k == 1) continue;
    Matrix m = Matrix::Zero(k, k);
    for (Index r = 0; r < k; ++r) {
      for (Index s = 0; s < k; ++s) {
        if (r != s) m(r, s) = std::max(z(members[r], members[s]), 0.0);
      }
      m(r, r) = -m.row(r).sum();
    }
    const double xi = m.diagonal().cwiseAbs().maxCoeff();
    // shifting past xi keeps the diagonal positive, so the iteration matrix is
    // primitive as well as irreducible
    Matrix hat = m;
    hat.diagonal().array() += 2.0 * xi;
    hat /= 2.0 * xi;
    // Power iteration on successive squares of hat: every row of hat^(2^t)
    // converges to the left Perron vector because hat * 1 = 1.
    Vector v = Vector::Constant(k, 1.0 / static_cast<double>(k));
    bool done = false;
    for (int it = 0; it < max_iters; ++it) {
      hat = (hat * hat).eval();
      hat /= hat.maxCoeff();
      Vector next = hat.colwise().sum().transpose();
      next /= next.sum();
      const double step = (next - v).cwiseAbs().maxCoeff();
      v = next;
      if (step <= 1e-15 && (m.transpose() * v).cwiseAbs().maxCoeff() <= 1e-12 * xi) {
        done = true;
        break;
      }
    }
    if (!done) {
      detail::require((m.transpose() * v).cwiseAbs().maxCoeff() <= 1e-9 * xi,
                      ErrorKind::inconclusive, "Perron iteration stagnated");
    }
    detail::require(v.minCoeff() > 0.0, ErrorKind::inconclusive,
                    "Perron vector is not positive");
    for (Index r = 0; r < k; ++r) d(members[r]) = std::sqrt(v(r));
  }
  return d / d.maxCoeff();
}

enum class SddStatus { sdd, not_sdd, inconclusive };

struct SddResult {
  SddStatus status = SddStatus::inconclusive;
  std::optional<Vector> scaling;  // diag(d) A diag(d) is DD
  MembershipResult membership;
};

// A is SDD iff it lies in the trivial-partition cone; a member's certificate
// yields the scaling through sdd_scaling_from_z.
inline SddResult check_sdd(const SymMatrix& a, double tol = 1e-9) {
  SddResult out;
  if (a.n() == 1) {
    out.status = a(0, 0) >= -tol ? SddStatus::sdd : SddStatus::not_sdd;
    if (out.status == SddStatus::sdd) out.scaling = Vector::Ones(1);
    return out;
  }
  const Partition trivial = Partition::trivial(static_cast<int>(a.n()));
  out.membership = certify_membership(a, trivial, tol);
  if (out.membership.status == MembershipStatus::non_member) {
    out.status = SddStatus::not_sdd;
    return out;
  }
  if (out.membership.status == MembershipStatus::inconclusive) return out;

  const CertificateZ cert = certificate_from_decomposition(*out.membership.decomposition, a);
  const Index n = a.n();
  Matrix z = Matrix::Zero(n, n);
  for (const auto& [bp, m] : cert.z) z(bp.i, bp.j) = std::max(m(0, 0), 0.0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (z(i, j) <= 0.0 || z(j, i) <= 0.0) z(i, j) = z(j, i) = 0.0;
    }
  }
  try {
    out.scaling = sdd_scaling_from_z(z, a, std::max(tol, 1e-8));
    out.status = SddStatus::sdd;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::inconclusive && e.kind() != ErrorKind::invalid_certificate) {
      throw;
    }
  }
  return out;
}

// Scaled matrix diag(d) A diag(d).
inline SymMatrix scale_symmetric(const SymMatrix& a, const Vector& d) {
  return SymMatrix(Matrix(d.asDiagonal() * a.dense() * d.asDiagonal()));
}

// Decomposition supported on the block graph edges {(i, j) : ||A_ij||_F >
// zero_tol} when that graph is a forest. Diagonal blocks are first split in
// proportion to vertex degree; if an edge block comes out indefinite, a
// leaf-to-root sweep assigns each leaf its whole remaining diagonal block and
// passes the Schur complement to its parent. Absent on cycles or when no
// split is PSD.
inline std::optional<FwDecomposition> sparse_forest_decompose(const SymMatrix& a,
                                                              const Partition& alpha,
                                                              double zero_tol) {
  detail::require(a.n() == alpha.dim(), ErrorKind::dimension_mismatch,
                  "matrix and partition dimensions differ");
  const int p = alpha.num_blocks();
  if (p < 2) return std::nullopt;
  const Matrix& dense = a.dense();

  std::vector<BlockPair> edges;
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(p));
  std::vector<int> parent_uf(static_cast<std::size_t>(p));
  std::iota(parent_uf.begin(), parent_uf.end(), 0);
  auto find = [&](int v) {
    while (parent_uf[static_cast<std::size_t>(v)] != v) {
      v = parent_uf[static_cast<std::size_t>(v)] =
          parent_uf[static_cast<std::size_t>(parent_uf[static_cast<std::size_t>(v)])];
    }
    return v;
  };
  for (const BlockPair& bp : block_pairs(alpha)) {
    if (block_of(dense, alpha, bp.i, bp.j).norm() <= zero_tol) continue;
    const int ri = find(bp.i), rj = find(bp.j);
    if (ri == rj) return std::nullopt;  // cycle
    parent_uf[static_cast<std::size_t>(ri)] = rj;
    edges.push_back(bp);
    adj[static_cast<std::size_t>(bp.i)].push_back(bp.j);
    adj[static_cast<std::size_t>(bp.j)].push_back(bp.i);
  }

  auto link = [&](BlockPair bp, const Matrix& di, const Matrix& dj) {
    const Index ki = alpha.block_size(bp.i), kj = alpha.block_size(bp.j);
    Matrix x(ki + kj, ki + kj);
    x.topLeftCorner(ki, ki) = di;
    x.bottomRightCorner(kj, kj) = dj;
    x.topRightCorner(ki, kj) = block_of(dense, alpha, bp.i, bp.j);
    x.bottomLeftCorner(kj, ki) = block_of(dense, alpha, bp.j, bp.i);
    return x;
  };
  auto diag_block = [&](int i) { return block_of(dense, alpha, i, i); };

  std::map<BlockPair, Matrix> blocks;
  auto add_isolated = [&](int i) {
    const int j = i + 1 < p ? i + 1 : i - 1;
    const BlockPair bp{std::min(i, j), std::max(i, j)};
    const Index ki = alpha.block_size(bp.i), kj = alpha.block_size(bp.j);
    auto [it, fresh] = blocks.try_emplace(bp, Matrix::Zero(ki + kj, ki + kj));
    if (i == bp.i) {
      it->second.topLeftCorner(ki, ki) += diag_block(i);
    } else {
      it->second.bottomRightCorner(kj, kj) += diag_block(i);
    }
  };
  auto finish = [&]() -> std::optional<FwDecomposition> {
    FwDecomposition dec{alpha, {}};
    for (auto& [bp, m] : blocks) {
      if (!is_psd(m)) return std::nullopt;
      dec.blocks.emplace(bp, SymMatrix(Matrix(0.5 * (m + m.transpose()))));
    }
    return dec;
  };

  // degree-proportional split
  for (const BlockPair& bp : edges) {
    const auto di = static_cast<double>(adj[static_cast<std::size_t>(bp.i)].size());
    const auto dj = static_cast<double>(adj[static_cast<std::size_t>(bp.j)].size());
    blocks[bp] = link(bp, diag_block(bp.i) / di, diag_block(bp.j) / dj);
  }
  for (int i = 0; i < p; ++i) {
    if (adj[static_cast<std::size_t>(i)].empty()) add_isolated(i);
  }
  if (auto dec = finish()) return dec;

  // leaf-to-root sweep
  blocks.clear();
  std::vector<Matrix> remaining(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) remaining[static_cast<std::size_t>(i)] = diag_block(i);
  std::vector<int> parent(static_cast<std::size_t>(p), -2);
  for (int root = 0; root < p; ++root) {
    if (parent[static_cast<std::size_t>(root)] != -2) continue;
    if (adj[static_cast<std::size_t>(root)].empty()) {
      parent[static_cast<std::size_t>(root)] = -1;
      add_isolated(root);
      continue;
    }
    std::vector<int> order{root};
    parent[static_cast<std::size_t>(root)] = -1;
    for (std::size_t head = 0; head < order.size(); ++head) {
      const int v = order[head];
      for (int w : adj[static_cast<std::size_t>(v)]) {
        if (parent[static_cast<std::size_t>(w)] == -2) {
          parent[static_cast<std::size_t>(w)] = v;
          order.push_back(w);
        }
      }
    }
    BlockPair last_edge{};
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      const int v = *it;
      const int u = parent[static_cast<std::size_t>(v)];
      if (u < 0) continue;
      const Matrix& rv = remaining[static_cast<std::size_t>(v)];
      if (!is_psd(rv)) return std::nullopt;
      // pseudo-inverse of the remaining leaf block
      const EigenDecomposition ev = sym_eig(rv);
      const double cut = 1e-12 * (1.0 + ev.values.cwiseAbs().maxCoeff());
      Vector inv = Vector::Zero(ev.values.size());
      for (Index r = 0; r < inv.size(); ++r) {
        if (ev.values(r) > cut) inv(r) = 1.0 / ev.values(r);
      }
      const Matrix pinv = ev.vectors * inv.asDiagonal() * ev.vectors.transpose();
      const Matrix a_uv = block_of(dense, alpha, u, v);
      Matrix schur = a_uv * pinv * a_uv.transpose();
      schur = 0.5 * (schur + schur.transpose()).eval();
      const BlockPair bp{std::min(u, v), std::max(u, v)};
      blocks[bp] = (bp.i == v) ? link(bp, rv, schur) : link(bp, schur, rv);
      remaining[static_cast<std::size_t>(u)] -= schur;
      if (u == root) last_edge = bp;
    }
    const Matrix& rr = remaining[static_cast<std::size_t>(root)];
    if (!is_psd(rr)) return std::nullopt;
    const Index ki = alpha.block_size(last_edge.i), kj = alpha.block_size(last_edge.j);
    if (last_edge.i == root) {
      blocks[last_edge].topLeftCorner(ki, ki) += rr;
    } else {
      blocks[last_edge].bottomRightCorner(kj, kj) += rr;
    }
  }
  return finish();
}

}  // namespace blockfw

#endif  // BLOCKFW_CONE_HPP_
