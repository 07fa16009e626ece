#ifndef BLOCKFW_CLI_HPP_
#define BLOCKFW_CLI_HPP_

// Command-line front end. Exit codes: 0 success / member / feasible,
// 1 non-member / infeasible, 2 inconclusive, 64 usage, 65 data error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "blockfw/bounds.hpp"
#include "blockfw/cone.hpp"
#include "blockfw/io.hpp"
#include "blockfw/reformulate.hpp"
#include "blockfw/solver.hpp"
#include "blockfw/sos.hpp"

namespace blockfw {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;

namespace cli {

// Ordered key/value report, printed aligned ("text") or as key=value ("kv").
class Report {
 public:
  explicit Report(int precision) : precision_(precision) {}

  void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
  void add(const std::string& key, const char* value) { add(key, std::string(value)); }
  void add(const std::string& key, double value) { add(key, num(value)); }
  void add(const std::string& key, int value) { add(key, std::to_string(value)); }
  void add(const std::string& key, const Vector& v) {
    std::string s;
    for (Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v(i));
    add(key, s);
  }

  std::string num(double v) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision_, v);
    return buf;
  }

  void print(std::ostream& out, bool kv) const {
    std::size_t width = 0;
    for (const auto& [k, v] : rows_) width = std::max(width, k.size());
    for (const auto& [k, v] : rows_) {
      if (kv) {
        out << k << "=" << v << "\n";
      } else {
        out << k << std::string(width - k.size() + 2, ' ') << v << "\n";
      }
    }
  }

 private:
  int precision_;
  std::vector<std::pair<std::string, std::string>> rows_;
};

// Inline sizes first; a value that does not parse as sizes names a file.
inline Partition resolve_partition(const std::string& arg) {
  try {
    return parse_partition(arg, "--partition");
  } catch (const Error&) {
    if (std::filesystem::exists(arg)) return read_partition(arg);
    throw;
  }
}

inline int membership_exit(MembershipStatus s) {
  switch (s) {
    case MembershipStatus::member: return kExitOk;
    case MembershipStatus::non_member: return kExitNegative;
    case MembershipStatus::inconclusive: return kExitInconclusive;
  }
  return kExitInconclusive;
}

inline int solve_exit(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return kExitOk;
    case SolveStatus::infeasible_evidence:
    case SolveStatus::unbounded_evidence: return kExitNegative;
    case SolveStatus::max_iters: return kExitInconclusive;
  }
  return kExitInconclusive;
}

inline std::string pair_name(BlockPair bp) {
  return std::to_string(bp.i + 1) + "," + std::to_string(bp.j + 1);
}

inline void write_blocks(const FwDecomposition& dec, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [bp, x] : dec.blocks) {
    const std::string name =
        "X_" + std::to_string(bp.i + 1) + "_" + std::to_string(bp.j + 1) + ".mat";
    write_matrix(x.dense(), (std::filesystem::path(dir) / name).string());
  }
}

}  // namespace cli

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Block factor-width-two matrices: membership, decompositions, reformulated "
               "conic programs and SOS relaxations.",
               "blockfw"};
  app.require_subcommand(1);
  std::string format = "text";
  int precision = 6;
  int threads = 1;
  if (const char* env = std::getenv("BLOCKFW_THREADS")) threads = std::max(1, std::atoi(env));
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "kv"}))
      ->capture_default_str();
  app.add_option("--precision", precision, "Significant digits of printed reals")
      ->check(CLI::Range(1, 17))
      ->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (default: BLOCKFW_THREADS or 1)")
      ->check(CLI::Range(1, 256));

  // check
  std::string matrix_path, partition_arg, cone = "fw";
  double tol = 1e-9;
  auto* check = app.add_subcommand("check", "Test cone membership of a matrix");
  check->add_option("matrix", matrix_path, "Matrix file")->required();
  check->add_option("--partition", partition_arg, "Block sizes, inline (\"2 2 2\") or a file");
  check->add_option("--cone", cone, "Cone to test")
      ->check(CLI::IsMember({"fw", "dual", "psd", "sdd", "dd"}))
      ->capture_default_str();
  check->add_option("--tol", tol, "Membership tolerance")->capture_default_str();

  // decompose
  std::string out_dir;
  std::string method = "project";
  auto* decompose = app.add_subcommand("decompose", "Write the pair blocks of a member");
  decompose->add_option("matrix", matrix_path, "Matrix file")->required();
  decompose->add_option("--partition", partition_arg, "Block sizes")->required();
  decompose->add_option("--out-dir", out_dir, "Directory for X_i_j.mat files");
  decompose->add_option("--method", method, "Decomposition method")
      ->check(CLI::IsMember({"project", "forest"}))
      ->capture_default_str();
  decompose->add_option("--tol", tol, "Membership tolerance")->capture_default_str();

  // coarsen
  std::string to_arg;
  auto* coarsen = app.add_subcommand("coarsen", "Re-express a decomposition on a coarser partition");
  coarsen->add_option("matrix", matrix_path, "Matrix file")->required();
  coarsen->add_option("--partition", partition_arg, "Fine block sizes")->required();
  coarsen->add_option("--to", to_arg, "Coarse block sizes")->required();
  coarsen->add_option("--out-dir", out_dir, "Directory for X_i_j.mat files");
  coarsen->add_option("--tol", tol, "Membership tolerance")->capture_default_str();

  // reformulate
  std::string in_path, out_path;
  bool keep_zero = false;
  auto* reform = app.add_subcommand("reformulate", "Rewrite an SDP over block factor-width-two blocks");
  reform->add_option("input", in_path, "Input .dat-s")->required();
  reform->add_option("output", out_path, "Output .dat-s")->required();
  reform->add_option("--partition", partition_arg, "Block sizes")->required();
  reform->add_flag("--keep-zero-pairs", keep_zero, "Keep pair blocks without data");

  // solve
  double eps = 1e-6;
  int max_iters = 50000;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a conic program in SDPA format");
  solve_cmd->add_option("input", in_path, "Input .dat-s")->required();
  solve_cmd->add_option("--eps", eps, "Absolute and relative tolerance")->capture_default_str();
  solve_cmd->add_option("--max-iters", max_iters, "Iteration limit")->capture_default_str();

  // bounds
  int bn = 0, bp = 0;
  auto* bounds = app.add_subcommand("bounds", "Distance bounds between the dual cone and PSD");
  bounds->add_option("--n", bn, "Dimension")->required();
  bounds->add_option("--p", bp, "Number of blocks")->required();

  // sos
  auto* sos = app.add_subcommand("sos", "Sum-of-squares programs");
  sos->require_subcommand(1);
  std::string poly_path;
  int blocks = 0;
  auto* sos_min = sos->add_subcommand("min", "Smallest gamma with p + gamma SOS / alpha-SDSOS");
  sos_min->add_option("poly", poly_path, "Polynomial file")->required();
  sos_min->add_option("--partition-blocks", blocks,
                      "Balanced partition of the Gram matrix into this many blocks (1 = full SOS)");
  sos_min->add_option("--eps", eps, "Solver tolerance")->capture_default_str();
  sos_min->add_option("--max-iters", max_iters, "Iteration limit")->capture_default_str();
  double shift = 0.0;
  std::string sos_cone = "natural";
  auto* sos_matrix = sos->add_subcommand("matrix", "Is P(x) + shift I a matrix SOS?");
  sos_matrix->add_option("polymatrix", poly_path, "Polynomial matrix file")->required();
  sos_matrix->add_option("--shift", shift, "Diagonal shift")->required();
  sos_matrix->add_option("--cone", sos_cone, "Gram cone")
      ->check(CLI::IsMember({"full", "natural", "trivial"}))
      ->capture_default_str();
  sos_matrix->add_option("--eps", eps, "Solver tolerance")->capture_default_str();
  sos_matrix->add_option("--max-iters", max_iters, "Iteration limit")->capture_default_str();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  cli::Report rep(precision);
  int code = kExitOk;
  auto solver_opts = [&]() {
    SolverOptions o;
    o.eps_abs = o.eps_rel = eps;
    o.max_iters = max_iters;
    o.threads = threads;
    return o;
  };

  try {
    if (*check) {
      const SymMatrix a = read_matrix(matrix_path);
      rep.add("cone", cone);
      if (cone == "fw" || cone == "dual") {
        if (partition_arg.empty()) {
          err << "check --cone " << cone << " needs --partition\n";
          return kExitUsage;
        }
        const Partition alpha = cli::resolve_partition(partition_arg);
        rep.add("partition", alpha.to_string());
        if (cone == "dual" || alpha.num_blocks() == 1) {
          const DualCheck dc = dual_membership(a, alpha, tol);
          rep.add("status", dc.member ? "member" : "non_member");
          if (alpha.num_blocks() > 1) rep.add("worst_pair", cli::pair_name(dc.worst));
          rep.add("worst_min_eig", dc.worst_min_eig);
          code = dc.member ? kExitOk : kExitNegative;
        } else {
          const MembershipResult res = certify_membership(a, alpha, tol);
          rep.add("status", to_string(res.status));
          rep.add("gap", res.gap);
          rep.add("iterations", res.iterations);
          if (res.decomposition) {
            const DecompositionReport dr = validate_decomposition(*res.decomposition, a, 1e-7);
            rep.add("pair_blocks", static_cast<int>(res.decomposition->blocks.size()));
            rep.add("worst_block_min_eig", dr.worst_min_eig);
            rep.add("recompose_residual", dr.residual);
          }
          if (res.separator) {
            rep.add("separator_inner", inner(*res.separator, a));
            rep.add("separator_worst_pair_eig",
                    dual_membership(*res.separator, alpha, 0.0).worst_min_eig);
          }
          code = cli::membership_exit(res.status);
        }
      } else if (cone == "psd") {
        const double lmin = min_eigenvalue(a);
        const bool psd = is_psd(a);
        rep.add("status", psd ? "member" : "non_member");
        rep.add("min_eig", lmin);
        code = psd ? kExitOk : kExitNegative;
      } else if (cone == "sdd") {
        const SddResult res = check_sdd(a, tol);
        const char* names[] = {"member", "non_member", "inconclusive"};
        rep.add("status", names[static_cast<int>(res.status)]);
        if (res.scaling) rep.add("scaling", *res.scaling);
        code = res.status == SddStatus::sdd       ? kExitOk
               : res.status == SddStatus::not_sdd ? kExitNegative
                                                  : kExitInconclusive;
      } else {
        const bool dd = check_dd(a);
        rep.add("status", dd ? "member" : "non_member");
        code = dd ? kExitOk : kExitNegative;
      }
    } else if (*decompose) {
      const SymMatrix a = read_matrix(matrix_path);
      const Partition alpha = cli::resolve_partition(partition_arg);
      rep.add("partition", alpha.to_string());
      std::optional<FwDecomposition> dec;
      if (method == "forest") {
        dec = sparse_forest_decompose(a, alpha, 1e-12 * (1.0 + a.frobenius_norm()));
        rep.add("status", dec ? "member" : "inconclusive");
        code = dec ? kExitOk : kExitInconclusive;
      } else {
        MembershipResult res = certify_membership(a, alpha, tol);
        rep.add("status", to_string(res.status));
        rep.add("gap", res.gap);
        dec = std::move(res.decomposition);
        code = cli::membership_exit(res.status);
      }
      if (dec) {
        const DecompositionReport dr = validate_decomposition(*dec, a, 1e-7);
        rep.add("pair_blocks", static_cast<int>(dec->blocks.size()));
        rep.add("worst_block_min_eig", dr.worst_min_eig);
        rep.add("recompose_residual", dr.residual);
        if (!out_dir.empty()) {
          cli::write_blocks(*dec, out_dir);
          rep.add("written_to", out_dir);
        }
      }
    } else if (*coarsen) {
      const SymMatrix a = read_matrix(matrix_path);
      const Partition fine = cli::resolve_partition(partition_arg);
      const Partition coarse = cli::resolve_partition(to_arg);
      const auto witness = is_sub_partition(fine, coarse);
      if (!witness) {
        err << "partition " << fine.to_string() << " does not refine " << coarse.to_string()
            << "\n";
        return kExitData;
      }
      const MembershipResult res = certify_membership(a, fine, tol);
      rep.add("status", to_string(res.status));
      code = cli::membership_exit(res.status);
      if (res.decomposition) {
        const FwDecomposition dec = coarsen_decomposition(*res.decomposition, *witness);
        const DecompositionReport dr = validate_decomposition(dec, a, 1e-7);
        rep.add("partition", dec.alpha.to_string());
        rep.add("pair_blocks", static_cast<int>(dec.blocks.size()));
        rep.add("worst_block_min_eig", dr.worst_min_eig);
        rep.add("recompose_residual", dr.residual);
        if (!out_dir.empty()) {
          cli::write_blocks(dec, out_dir);
          rep.add("written_to", out_dir);
        }
      }
    } else if (*reform) {
      const ConicProgram sdp = read_sdpa(in_path);
      const Partition alpha = cli::resolve_partition(partition_arg);
      const BlockFwProgram bfp = to_block_fw_program(sdp, alpha, !keep_zero);
      write_sdpa(bfp.program, out_path);
      rep.add("constraints", bfp.program.num_constraints());
      rep.add("blocks", bfp.program.num_blocks());
      rep.add("written_to", out_path);
    } else if (*solve_cmd) {
      const ConicProgram prog = read_sdpa(in_path);
      const Solution sol = solve(prog, solver_opts());
      rep.add("status", to_string(sol.status));
      rep.add("objective", sol.objective);
      rep.add("dual_objective", sol.dual_objective);
      rep.add("primal_residual", sol.primal_residual);
      rep.add("dual_residual", sol.dual_residual);
      rep.add("iterations", sol.iterations);
      code = cli::solve_exit(sol.status);
    } else if (*bounds) {
      const Fraction up = upper_bound_dist(bp);
      rep.add("n", bn);
      rep.add("p", bp);
      rep.add("upper", up.value());
      rep.add("upper_exact", std::to_string(up.num) + "/" + std::to_string(up.den));
      rep.add("lower", lower_bound_dist(bn, bp));
      const bool homogeneous = bn % bp == 0;
      rep.add("homogeneous", homogeneous ? "true" : "false");
      if (homogeneous) {
        const Witness w = worst_case_witness(bn, bp);
        rep.add("witness_distance", dist_psd(w.matrix));
      }
    } else if (*sos_min) {
      const PolynomialForm poly = read_poly(poly_path);
      const SosProgram full = build_sos_program(poly);
      Solution sol;
      double gamma = 0.0;
      if (blocks <= 1) {
        sol = solve(full.program, solver_opts());
        gamma = full.gamma(sol.objective);
        rep.add("cone", "psd");
      } else {
        const Partition alpha = balanced_partition(full.basis.size(), blocks);
        const AlphaSdsosProgram ap = build_alpha_sdsos_program(poly, alpha);
        sol = solve(ap.program(), solver_opts());
        gamma = ap.gamma(sol.objective);
        rep.add("cone", "fw");
        rep.add("partition", alpha.to_string());
      }
      rep.add("basis_size", full.basis.size());
      rep.add("status", to_string(sol.status));
      if (sol.status == SolveStatus::optimal) rep.add("gamma", gamma);
      rep.add("iterations", sol.iterations);
      code = cli::solve_exit(sol.status);
    } else if (*sos_matrix) {
      const PolyMatrix p = read_polymatrix(poly_path);
      const MatrixSosPrograms progs = matrix_sos_program(p, shift);
      const ConicProgram& prog = sos_cone == "full"      ? progs.full
                                 : sos_cone == "natural" ? progs.alpha_sdsos.program
                                                         : progs.sdsos.program;
      const Solution sol = solve(prog, solver_opts());
      rep.add("cone", sos_cone);
      rep.add("shift", shift);
      rep.add("partition", sos_cone == "full"      ? std::to_string(progs.natural.dim())
                           : sos_cone == "natural" ? progs.natural.to_string()
                                                   : Partition::trivial(progs.natural.dim()).to_string());
      const char* verdict = sol.status == SolveStatus::optimal ? "feasible"
                            : sol.status == SolveStatus::infeasible_evidence ? "infeasible"
                                                                             : "inconclusive";
      rep.add("status", verdict);
      rep.add("iterations", sol.iterations);
      code = sol.status == SolveStatus::optimal               ? kExitOk
             : sol.status == SolveStatus::infeasible_evidence ? kExitNegative
                                                              : kExitInconclusive;
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.kind() == ErrorKind::inconclusive ? kExitInconclusive : kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << e.what() << "\n";
    return kExitData;
  }
  rep.print(out, format == "kv");
  return code;
}

inline int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace blockfw

#endif  // BLOCKFW_CLI_HPP_
