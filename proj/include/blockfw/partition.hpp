#ifndef BLOCKFW_PARTITION_HPP_
#define BLOCKFW_PARTITION_HPP_

#include <algorithm>
#include <compare>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "blockfw/errors.hpp"
#include "blockfw/linalg.hpp"

namespace blockfw {

// Ordered block sizes {k_1, ..., k_p} of a symmetric n x n matrix. Blocks are
// contiguous index ranges; block i covers [offset(i), offset(i + 1)).
class Partition {
 public:
  Partition() = default;

  explicit Partition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    detail::require(!sizes_.empty(), ErrorKind::invalid_partition,
                    "partition needs at least one block");
    offsets_.assign(sizes_.size() + 1, 0);
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
      detail::require(sizes_[i] >= 1, ErrorKind::invalid_partition,
                      "block sizes must be positive");
      offsets_[i + 1] = offsets_[i] + sizes_[i];
    }
  }

  static Partition trivial(int n) {
    detail::require(n >= 1, ErrorKind::invalid_partition, "empty dimension");
    return Partition(std::vector<int>(static_cast<std::size_t>(n), 1));
  }

  static Partition homogeneous(int n, int p) {
    detail::require(p >= 1 && n >= p && n % p == 0, ErrorKind::invalid_argument,
                    "homogeneous partition needs p | n");
    return Partition(std::vector<int>(static_cast<std::size_t>(p), n / p));
  }

  int num_blocks() const { return static_cast<int>(sizes_.size()); }
  int dim() const { return offsets_.empty() ? 0 : offsets_.back(); }
  int block_size(int i) const { return sizes_.at(static_cast<std::size_t>(i)); }
  int offset(int i) const { return offsets_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<int>& offsets() const { return offsets_; }

  bool is_trivial() const {
    return std::all_of(sizes_.begin(), sizes_.end(), [](int k) { return k == 1; });
  }
  bool is_homogeneous() const {
    return !sizes_.empty() &&
           std::all_of(sizes_.begin(), sizes_.end(),
                       [&](int k) { return k == sizes_.front(); });
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < sizes_.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(sizes_[i]);
    }
    return out;
  }

  bool operator==(const Partition& o) const { return sizes_ == o.sizes_; }

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
};

inline Partition make_partition(std::vector<int> sizes) {
  return Partition(std::move(sizes));
}

// p blocks with sizes floor(n/p) and ceil(n/p); as many small blocks as
// possible, small blocks first.
inline Partition balanced_partition(int n, int p) {
  detail::require(p >= 1 && p <= n, ErrorKind::invalid_argument,
                  "balanced partition needs 1 <= p <= n");
  const int small = n / p;
  const int num_large = n % p;
  std::vector<int> sizes(static_cast<std::size_t>(p - num_large), small);
  sizes.insert(sizes.end(), static_cast<std::size_t>(num_large), small + 1);
  return Partition(std::move(sizes));
}

// Fine blocks [bounds[i], bounds[i + 1]) of beta merge into coarse block i of
// alpha. Zero-based: bounds.front() == 0, bounds.back() == q.
struct SubPartitionWitness {
  std::vector<int> merge_bounds;

  int num_coarse() const { return static_cast<int>(merge_bounds.size()) - 1; }
  int num_fine() const { return merge_bounds.empty() ? 0 : merge_bounds.back(); }

  // coarse block containing fine block j
  int group_of(int j) const {
    auto it = std::upper_bound(merge_bounds.begin(), merge_bounds.end(), j);
    return static_cast<int>(it - merge_bounds.begin()) - 1;
  }

  bool operator==(const SubPartitionWitness&) const = default;
};

// Witness that beta refines alpha (or equals it). Greedy prefix-sum matching;
// the witness is unique for contiguous partitions.
inline std::optional<SubPartitionWitness> is_sub_partition(const Partition& beta,
                                                           const Partition& alpha) {
  detail::require(beta.dim() == alpha.dim(), ErrorKind::dimension_mismatch,
                  "partitions of different dimensions");
  SubPartitionWitness w;
  w.merge_bounds.push_back(0);
  int j = 0;
  for (int i = 0; i < alpha.num_blocks(); ++i) {
    const int target = alpha.offset(i + 1);
    while (j < beta.num_blocks() && beta.offset(j + 1) < target) ++j;
    if (j >= beta.num_blocks() || beta.offset(j + 1) != target) return std::nullopt;
    ++j;
    w.merge_bounds.push_back(j);
  }
  return w;
}

struct BlockPair {
  int i = 0;
  int j = 0;
  auto operator<=>(const BlockPair&) const = default;
};

struct IndexRange {
  int begin = 0;
  int end = 0;  // exclusive
  int size() const { return end - begin; }
  bool operator==(const IndexRange&) const = default;
};

// Row ranges selected by the pair-truncation operator of blocks (i, j).
struct PairRanges {
  BlockPair pair;
  IndexRange first;
  IndexRange second;
};

inline std::vector<BlockPair> block_pairs(const Partition& alpha) {
  std::vector<BlockPair> out;
  const int p = alpha.num_blocks();
  out.reserve(static_cast<std::size_t>(p * (p - 1) / 2));
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) out.push_back({i, j});
  }
  return out;
}

inline std::vector<PairRanges> pair_row_ranges(const Partition& alpha) {
  detail::require(alpha.num_blocks() >= 2, ErrorKind::invalid_argument,
                  "a single-block partition has no block pairs");
  std::vector<PairRanges> out;
  for (const BlockPair& bp : block_pairs(alpha)) {
    out.push_back({bp,
                   {alpha.offset(bp.i), alpha.offset(bp.i + 1)},
                   {alpha.offset(bp.j), alpha.offset(bp.j + 1)}});
  }
  return out;
}

// Global indices of blocks i then j (the rows selected by E_ij).
inline std::vector<Index> pair_indices(const Partition& alpha, BlockPair bp) {
  std::vector<Index> idx;
  idx.reserve(static_cast<std::size_t>(alpha.block_size(bp.i) + alpha.block_size(bp.j)));
  for (int r = alpha.offset(bp.i); r < alpha.offset(bp.i + 1); ++r) idx.push_back(r);
  for (int r = alpha.offset(bp.j); r < alpha.offset(bp.j + 1); ++r) idx.push_back(r);
  return idx;
}

// E_ij A E_ij^T
inline Matrix truncate(const Matrix& a, const Partition& alpha, BlockPair bp) {
  const auto idx = pair_indices(alpha, bp);
  return gather(a, idx);
}

inline Matrix block_of(const Matrix& a, const Partition& alpha, int i, int j) {
  return a.block(alpha.offset(i), alpha.offset(j), alpha.block_size(i),
                 alpha.block_size(j));
}

struct PermutedMatrix {
  SymMatrix matrix;
  Partition partition;
};

// P_alpha A P_alpha^T where position k of the result holds old block perm[k].
inline PermutedMatrix block_permute(const Partition& alpha, const std::vector<int>& perm,
                                    const SymMatrix& a) {
  detail::require(a.n() == alpha.dim(), ErrorKind::dimension_mismatch,
                  "matrix and partition dimensions differ");
  const int p = alpha.num_blocks();
  detail::require(static_cast<int>(perm.size()) == p, ErrorKind::invalid_argument,
                  "permutation length differs from block count");
  std::vector<bool> seen(static_cast<std::size_t>(p), false);
  for (int v : perm) {
    detail::require(v >= 0 && v < p && !seen[static_cast<std::size_t>(v)],
                    ErrorKind::invalid_argument, "not a permutation");
    seen[static_cast<std::size_t>(v)] = true;
  }
  std::vector<int> sizes;
  std::vector<Index> order;
  for (int k = 0; k < p; ++k) {
    const int old = perm[static_cast<std::size_t>(k)];
    sizes.push_back(alpha.block_size(old));
    for (int r = alpha.offset(old); r < alpha.offset(old + 1); ++r) order.push_back(r);
  }
  return {SymMatrix(gather(a.dense(), order)), Partition(std::move(sizes))};
}

inline std::vector<int> inverse_permutation(const std::vector<int>& perm) {
  std::vector<int> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) {
    inv[static_cast<std::size_t>(perm[k])] = static_cast<int>(k);
  }
  return inv;
}

}  // namespace blockfw

#endif  // BLOCKFW_PARTITION_HPP_
