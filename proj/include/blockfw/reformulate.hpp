#ifndef BLOCKFW_REFORMULATE_HPP_
#define BLOCKFW_REFORMULATE_HPP_

// Rewrites a single-block SDP over FW(alpha, 2): the PSD variable X is
// replaced by pair blocks X_jl with data C_jl = E_jl C E_jl^T and
// A_i,jl = E_jl A_i E_jl^T.

#include <cmath>
#include <map>
#include <vector>

#include "blockfw/cone.hpp"
#include "blockfw/errors.hpp"
#include "blockfw/partition.hpp"
#include "blockfw/solver.hpp"

namespace blockfw {

struct BlockFwProgram {
  ConicProgram program;       // over the pair blocks (or the source itself)
  ConicProgram source;        // the original single-block SDP
  Partition alpha;
  std::vector<BlockPair> pairs;  // pairs[b] is the pair behind block b
  bool identity = false;         // p == 1: program is the source unchanged
};

namespace detail {

inline int block_containing(const Partition& alpha, int r) {
  const auto& off = alpha.offsets();
  auto it = std::upper_bound(off.begin(), off.end(), r);
  return static_cast<int>(it - off.begin()) - 1;
}

// local coordinate of global index r inside pair bp
inline int pair_local(const Partition& alpha, BlockPair bp, int r) {
  if (r < alpha.offset(bp.i + 1)) return r - alpha.offset(bp.i);
  return alpha.block_size(bp.i) + r - alpha.offset(bp.j);
}

}  // namespace detail

// Pairs whose truncated data are all zero are dropped when drop_zero_pairs is
// set; such a block never influences objective or constraints.
inline BlockFwProgram to_block_fw_program(const ConicProgram& sdp, const Partition& alpha,
                                          bool drop_zero_pairs = true) {
  sdp.validate();
  detail::require(sdp.num_blocks() == 1, ErrorKind::invalid_program,
                  "reformulation needs a single-block SDP");
  detail::require(sdp.block_sizes[0] == alpha.dim(), ErrorKind::dimension_mismatch,
                  "partition does not match the SDP dimension");
  BlockFwProgram out;
  out.source = sdp;
  out.alpha = alpha;
  const int p = alpha.num_blocks();
  if (p == 1) {
    out.program = sdp;
    out.identity = true;
    return out;
  }
  const std::vector<BlockPair> all = block_pairs(alpha);
  std::map<BlockPair, int> slot;
  for (std::size_t k = 0; k < all.size(); ++k) slot[all[k]] = static_cast<int>(k);

  // targets of one entry: every pair containing both coordinates
  auto targets = [&](const SymEntry& e) {
    const int bi = detail::block_containing(alpha, e.row);
    const int bj = detail::block_containing(alpha, e.col);
    std::vector<BlockPair> out_pairs;
    if (bi != bj) {
      out_pairs.push_back({std::min(bi, bj), std::max(bi, bj)});
    } else {
      for (int o = 0; o < p; ++o) {
        if (o != bi) out_pairs.push_back({std::min(bi, o), std::max(bi, o)});
      }
    }
    return out_pairs;
  };

  std::vector<bool> used(all.size(), !drop_zero_pairs);
  auto mark = [&](const LinearForm& f) {
    for (const SymEntry& e : f.entries) {
      if (e.value == 0.0) continue;
      for (const BlockPair& bp : targets(e)) used[static_cast<std::size_t>(slot[bp])] = true;
    }
  };
  mark(sdp.objective);
  for (const auto& f : sdp.constraints) mark(f);

  std::vector<int> block_index(all.size(), -1);
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (!used[k]) continue;
    block_index[k] = static_cast<int>(out.pairs.size());
    out.pairs.push_back(all[k]);
    out.program.block_sizes.push_back(alpha.block_size(all[k].i) +
                                      alpha.block_size(all[k].j));
  }
  auto map_form = [&](const LinearForm& f) {
    LinearForm g;
    for (const SymEntry& e : f.entries) {
      for (const BlockPair& bp : targets(e)) {
        const int b = block_index[static_cast<std::size_t>(slot[bp])];
        if (b < 0) continue;
        g.entries.push_back({b, detail::pair_local(alpha, bp, e.row),
                             detail::pair_local(alpha, bp, e.col), e.value});
      }
    }
    return g;
  };
  out.program.objective = map_form(sdp.objective);
  for (const auto& f : sdp.constraints) out.program.constraints.push_back(map_form(f));
  out.program.rhs = sdp.rhs;
  return out;
}

struct LiftedSolution {
  SymMatrix x;
  FwDecomposition decomposition;
  double block_objective = 0.0;   // sum_jl <C_jl, X_jl>
  double lifted_objective = 0.0;  // <C, X>
};

inline LiftedSolution lift_solution(const BlockFwProgram& bfp,
                                    const std::vector<Matrix>& blocks) {
  detail::require(blocks.size() == bfp.program.block_sizes.size(),
                  ErrorKind::dimension_mismatch, "block count differs from the program");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    detail::require(blocks[b].rows() == bfp.program.block_sizes[b] &&
                        blocks[b].cols() == bfp.program.block_sizes[b],
                    ErrorKind::dimension_mismatch, "block has the wrong size");
  }
  LiftedSolution out;
  out.decomposition.alpha = bfp.alpha;
  if (bfp.identity) {
    out.x = SymMatrix(blocks[0], 1e-8);
  } else {
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      out.decomposition.blocks.emplace(
          bfp.pairs[b], SymMatrix(Matrix(0.5 * (blocks[b] + blocks[b].transpose()))));
    }
    out.x = recompose(out.decomposition);
  }
  out.block_objective = apply_form(bfp.program.objective, blocks);
  out.lifted_objective = apply_form(bfp.source.objective, {out.x.dense()});
  return out;
}

// Rotated second-order cone form of a program whose blocks are all 2 x 2:
// block k becomes variables (a_k, b_k, c_k) = (X_00, X_01, X_11) with
//   a_k >= 0, c_k >= 0, a_k c_k >= b_k^2
// (equivalently 2 a c >= ||sqrt(2) b||^2). Variable 3k + t holds a, b, c.
struct RsocProgram {
  int num_cones = 0;
  std::vector<double> objective;                                 // length 3 * num_cones
  std::vector<std::vector<std::pair<int, double>>> constraints;  // sparse rows
  std::vector<double> rhs;
};

inline RsocProgram rsoc_reformulate(const ConicProgram& prog) {
  prog.validate();
  for (int k : prog.block_sizes) {
    detail::require(k == 2, ErrorKind::invalid_argument,
                    "second-order cone form needs 2 x 2 blocks");
  }
  RsocProgram out;
  out.num_cones = prog.num_blocks();
  auto coeffs = [&](const LinearForm& f) {
    std::map<int, double> acc;
    for (const SymEntry& e : f.entries) {
      const int var = 3 * e.block + (e.row == e.col ? (e.row == 0 ? 0 : 2) : 1);
      acc[var] += (e.row == e.col ? 1.0 : 2.0) * e.value;
    }
    return acc;
  };
  out.objective.assign(static_cast<std::size_t>(3 * out.num_cones), 0.0);
  for (const auto& [v, c] : coeffs(prog.objective)) out.objective[static_cast<std::size_t>(v)] = c;
  for (const auto& f : prog.constraints) {
    std::vector<std::pair<int, double>> row;
    for (const auto& [v, c] : coeffs(f)) {
      if (c != 0.0) row.emplace_back(v, c);
    }
    out.constraints.push_back(std::move(row));
  }
  out.rhs = prog.rhs;
  return out;
}

// a >= 0, c >= 0, ac >= b^2
inline bool rsoc_contains(double a, double b, double c) {
  return a >= 0.0 && c >= 0.0 && a * c >= b * b;
}

}  // namespace blockfw

#endif  // BLOCKFW_REFORMULATE_HPP_
