#ifndef BLOCKFW_SOLVER_HPP_
#define BLOCKFW_SOLVER_HPP_

// Standard-primal conic programs over products of PSD blocks,
//   minimize  sum_b <C_b, X_b>
//   s.t.      sum_b <A_ib, X_b> = b_i,  X_b PSD,
// solved by over-relaxed ADMM between the affine set and the cone.

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <Eigen/Sparse>

#include "blockfw/errors.hpp"
#include "blockfw/linalg.hpp"

namespace blockfw {

// One stored coefficient of a symmetric data matrix. An off-diagonal entry
// (row != col) stands for both (row, col) and (col, row); repeated entries add.
struct SymEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
  bool operator==(const SymEntry&) const = default;
};

struct LinearForm {
  std::vector<SymEntry> entries;
  bool operator==(const LinearForm&) const = default;
};

struct ConicProgram {
  std::vector<int> block_sizes;
  LinearForm objective;
  std::vector<LinearForm> constraints;
  std::vector<double> rhs;

  int num_constraints() const { return static_cast<int>(constraints.size()); }
  int num_blocks() const { return static_cast<int>(block_sizes.size()); }

  void validate() const {
    using detail::require;
    require(constraints.size() == rhs.size(), ErrorKind::invalid_program,
            "constraint count differs from right-hand side length");
    for (int k : block_sizes) require(k >= 1, ErrorKind::invalid_program, "empty block");
    auto check = [&](const LinearForm& f) {
      for (const SymEntry& e : f.entries) {
        require(e.block >= 0 && e.block < num_blocks(), ErrorKind::invalid_program,
                "entry refers to a missing block");
        const int k = block_sizes[static_cast<std::size_t>(e.block)];
        require(e.row >= 0 && e.row < k && e.col >= 0 && e.col < k,
                ErrorKind::invalid_program, "entry outside its block");
        require(std::isfinite(e.value), ErrorKind::invalid_program, "non-finite entry");
      }
    };
    check(objective);
    for (const auto& f : constraints) check(f);
    for (double v : rhs) require(std::isfinite(v), ErrorKind::invalid_program, "non-finite rhs");
  }

  bool operator==(const ConicProgram&) const = default;
};

// Dense per-block matrix of a linear form.
inline std::vector<Matrix> form_blocks(const ConicProgram& prog, const LinearForm& f) {
  std::vector<Matrix> out;
  for (int k : prog.block_sizes) out.push_back(Matrix::Zero(k, k));
  for (const SymEntry& e : f.entries) {
    Matrix& m = out[static_cast<std::size_t>(e.block)];
    m(e.row, e.col) += e.value;
    if (e.row != e.col) m(e.col, e.row) += e.value;
  }
  return out;
}

inline double apply_form(const LinearForm& f, const std::vector<Matrix>& x) {
  double acc = 0.0;
  for (const SymEntry& e : f.entries) {
    const Matrix& m = x[static_cast<std::size_t>(e.block)];
    acc += (e.row == e.col ? 1.0 : 2.0) * e.value * m(e.row, e.col);
  }
  return acc;
}

enum class SolveStatus { optimal, infeasible_evidence, unbounded_evidence, max_iters };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible_evidence: return "infeasible_evidence";
    case SolveStatus::unbounded_evidence: return "unbounded_evidence";
    case SolveStatus::max_iters: return "max_iters";
  }
  return "?";
}

struct Solution {
  SolveStatus status = SolveStatus::max_iters;
  std::vector<Matrix> blocks;      // primal X_b (a recession direction if unbounded)
  std::vector<Matrix> dual_slack;  // S_b = C_b - sum_i y_i A_ib
  Vector y;                        // multipliers (a Farkas vector if infeasible)
  double objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

struct SolverOptions {
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  int max_iters = 50000;
  int threads = 1;
  double relaxation = 1.6;
  // certificates are accepted when the cone violation is below this fraction
  // of the certifying inner product
  double eps_infeasible = 1e-7;
};

struct Residuals {
  double primal = 0.0;  // ||A(X) - b||_2
  double dual = 0.0;    // Frobenius distance of C - A^T y to the PSD product
  double objective = 0.0;
};

inline Residuals residuals(const ConicProgram& prog, const std::vector<Matrix>& x,
                           const Vector& y) {
  detail::require(x.size() == prog.block_sizes.size(), ErrorKind::invalid_argument,
                  "candidate has the wrong number of blocks");
  for (std::size_t b = 0; b < x.size(); ++b) {
    detail::require(x[b].rows() == prog.block_sizes[b] && x[b].cols() == prog.block_sizes[b],
                    ErrorKind::invalid_argument, "candidate block has the wrong size");
  }
  detail::require(y.size() == prog.num_constraints(), ErrorKind::invalid_argument,
                  "multiplier vector has the wrong length");
  Residuals r;
  double acc = 0.0;
  for (int i = 0; i < prog.num_constraints(); ++i) {
    const double d = apply_form(prog.constraints[static_cast<std::size_t>(i)], x) -
                     prog.rhs[static_cast<std::size_t>(i)];
    acc += d * d;
  }
  r.primal = std::sqrt(acc);
  std::vector<Matrix> s = form_blocks(prog, prog.objective);
  for (int i = 0; i < prog.num_constraints(); ++i) {
    const double yi = y(i);
    if (yi == 0.0) continue;
    for (const SymEntry& e : prog.constraints[static_cast<std::size_t>(i)].entries) {
      Matrix& m = s[static_cast<std::size_t>(e.block)];
      m(e.row, e.col) -= yi * e.value;
      if (e.row != e.col) m(e.col, e.row) -= yi * e.value;
    }
  }
  acc = 0.0;
  for (const Matrix& m : s) {
    const double d = dist_psd(m);
    acc += d * d;
  }
  r.dual = std::sqrt(acc);
  r.objective = apply_form(prog.objective, x);
  return r;
}

namespace detail {

// Fixed pool running fn(0..count-1); each index is independent, so results do
// not depend on the number of workers.
class ParallelFor {
 public:
  explicit ParallelFor(int threads) {
    for (int t = 1; t < threads; ++t) workers_.emplace_back([this] { worker(); });
  }
  ~ParallelFor() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
  }
  ParallelFor(const ParallelFor&) = delete;
  ParallelFor& operator=(const ParallelFor&) = delete;

  void run(int count, const std::function<void(int)>& fn) {
    if (workers_.empty() || count <= 1) {
      for (int i = 0; i < count; ++i) fn(i);
      return;
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      fn_ = &fn;
      count_ = count;
      next_ = 0;
      pending_ = static_cast<int>(workers_.size());
      ++generation_;
    }
    cv_.notify_all();
    drain();
    std::unique_lock<std::mutex> lock(mu_);
    done_cv_.wait(lock, [this] { return pending_ == 0; });
    fn_ = nullptr;
  }

 private:
  void drain() {
    for (;;) {
      int i;
      {
        std::lock_guard<std::mutex> lock(mu_);
        if (next_ >= count_) return;
        i = next_++;
      }
      (*fn_)(i);
    }
  }

  void worker() {
    long seen = 0;
    for (;;) {
      {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
      }
      drain();
      {
        std::lock_guard<std::mutex> lock(mu_);
        --pending_;
      }
      done_cv_.notify_one();
    }
  }

  std::vector<std::thread> workers_;
  std::mutex mu_;
  std::condition_variable cv_, done_cv_;
  const std::function<void(int)>* fn_ = nullptr;
  int count_ = 0, next_ = 0, pending_ = 0;
  long generation_ = 0;
  bool stop_ = false;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Layout of the scaled half-vectorization: off-diagonal entries carry a
// factor sqrt(2) so that the trace inner product becomes the dot product.
struct SvecLayout {
  std::vector<int> sizes;
  std::vector<Index> offsets;

  explicit SvecLayout(const std::vector<int>& block_sizes) : sizes(block_sizes) {
    offsets.push_back(0);
    for (int k : sizes) offsets.push_back(offsets.back() + static_cast<Index>(k) * (k + 1) / 2);
  }
  Index dim() const { return offsets.back(); }
  Index index(int b, int r, int c) const {
    if (r > c) std::swap(r, c);
    return offsets[static_cast<std::size_t>(b)] + static_cast<Index>(c) * (c + 1) / 2 + r;
  }

  Matrix unpack(const Vector& v, int b) const {
    const int k = sizes[static_cast<std::size_t>(b)];
    Matrix m(k, k);
    Index at = offsets[static_cast<std::size_t>(b)];
    for (int c = 0; c < k; ++c) {
      for (int r = 0; r < c; ++r) {
        m(r, c) = m(c, r) = v(at++) / std::sqrt(2.0);
      }
      m(c, c) = v(at++);
    }
    return m;
  }
  void pack(const Matrix& m, int b, Vector& v) const {
    const int k = sizes[static_cast<std::size_t>(b)];
    Index at = offsets[static_cast<std::size_t>(b)];
    for (int c = 0; c < k; ++c) {
      for (int r = 0; r < c; ++r) v(at++) = std::sqrt(2.0) * 0.5 * (m(r, c) + m(c, r));
      v(at++) = m(c, c);
    }
  }
};

inline Vector svec_form(const SvecLayout& layout, const LinearForm& f) {
  Vector v = Vector::Zero(layout.dim());
  for (const SymEntry& e : f.entries) {
    v(layout.index(e.block, e.row, e.col)) += (e.row == e.col ? 1.0 : std::sqrt(2.0)) * e.value;
  }
  return v;
}

inline SparseMatrix svec_constraints(const SvecLayout& layout, const ConicProgram& prog) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < prog.num_constraints(); ++i) {
    for (const SymEntry& e : prog.constraints[static_cast<std::size_t>(i)].entries) {
      trips.emplace_back(i, layout.index(e.block, e.row, e.col),
                         (e.row == e.col ? 1.0 : std::sqrt(2.0)) * e.value);
    }
  }
  SparseMatrix a(prog.num_constraints(), layout.dim());
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();
  return a;
}

class AdmmSolver {
 public:
  AdmmSolver(const ConicProgram& prog, const SolverOptions& opts)
      : prog_(prog), opts_(opts), layout_(prog.block_sizes), pool_(std::max(1, opts.threads)) {
    prog_.validate();
    c_ = svec_form(layout_, prog_.objective);
    a_full_ = svec_constraints(layout_, prog_);
    b_full_ = Eigen::Map<const Vector>(prog_.rhs.data(), static_cast<Index>(prog_.rhs.size()));
  }

  Solution run() {
    Solution sol;
    if (auto farkas = presolve()) {
      sol.status = SolveStatus::infeasible_evidence;
      sol.y = *farkas;
      finish_blocks(Vector::Zero(layout_.dim()), sol);
      return sol;
    }
    equilibrate();
    return iterate();
  }

 private:
  // Drops linearly dependent rows; a dependent row with an inconsistent
  // right-hand side yields a Farkas vector (A^T y = 0, b^T y > 0).
  std::optional<Vector> presolve() {
    const Index m = a_full_.rows();
    keep_.clear();
    if (m == 0) return std::nullopt;
    const Matrix gram = Matrix(a_full_ * SparseMatrix(a_full_.transpose()));
    Eigen::LDLT<Matrix> ldlt(gram);
    const Vector d = ldlt.vectorD();
    const double dmax = std::max(d.cwiseAbs().maxCoeff(), 1e-300);
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, Index> perm(ldlt.transpositionsP());
    std::vector<Index> dropped;
    for (Index i = 0; i < m; ++i) {
      if (std::abs(d(perm.indices()(i))) > 1e-11 * dmax) {
        keep_.push_back(i);
      } else {
        dropped.push_back(i);
      }
    }
    a_ = select_rows(a_full_, keep_);
    b_.resize(static_cast<Index>(keep_.size()));
    for (std::size_t k = 0; k < keep_.size(); ++k) b_(static_cast<Index>(k)) = b_full_(keep_[k]);
    if (dropped.empty() || keep_.empty()) {
      if (keep_.empty()) {
        for (Index r : dropped) {
          if (std::abs(b_full_(r)) > 1e-9 * (1.0 + b_full_.norm())) {
            Vector y = Vector::Zero(m);
            y(r) = b_full_(r) > 0 ? 1.0 : -1.0;
            return y;
          }
        }
      }
      return std::nullopt;
    }
    const Matrix gk = Matrix(a_ * SparseMatrix(a_.transpose()));
    Eigen::LLT<Matrix> llt(gk);
    for (Index r : dropped) {
      const Vector row = Vector(SparseMatrix(a_full_.row(r)).transpose());
      const Vector lambda = llt.solve(a_ * row);
      const double mismatch = b_full_(r) - lambda.dot(b_);
      if (std::abs(mismatch) > 1e-9 * (1.0 + std::abs(b_full_(r)) + b_.norm())) {
        Vector y = Vector::Zero(m);
        y(r) = 1.0;
        for (std::size_t k = 0; k < keep_.size(); ++k) y(keep_[k]) = -lambda(static_cast<Index>(k));
        if (mismatch < 0) y = -y;
        return y;
      }
    }
    return std::nullopt;
  }

  static SparseMatrix select_rows(const SparseMatrix& a, const std::vector<Index>& rows) {
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      for (SparseMatrix::InnerIterator it(a, rows[k]); it; ++it) {
        trips.emplace_back(static_cast<Index>(k), it.col(), it.value());
      }
    }
    SparseMatrix out(static_cast<Index>(rows.size()), a.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    out.makeCompressed();
    return out;
  }

  // Ruiz equilibration: rows freely, columns by one scalar per block so the
  // scaled cone is still a PSD product.
  void equilibrate() {
    const Index m = a_.rows();
    const int nb = static_cast<int>(layout_.sizes.size());
    row_scale_ = Vector::Ones(m);
    block_scale_ = Vector::Ones(nb);
    SparseMatrix as = a_;
    for (int pass = 0; pass < 15; ++pass) {
      Vector rnorm = Vector::Zero(m);
      Vector bnorm = Vector::Zero(nb);
      for (Index r = 0; r < m; ++r) {
        for (SparseMatrix::InnerIterator it(as, r); it; ++it) {
          rnorm(r) = std::max(rnorm(r), std::abs(it.value()));
          const int b = block_of_column(it.col());
          bnorm(b) = std::max(bnorm(b), std::abs(it.value()));
        }
      }
      Vector rs = Vector::Ones(m), bs = Vector::Ones(nb);
      for (Index r = 0; r < m; ++r) {
        if (rnorm(r) > 0) rs(r) = 1.0 / std::sqrt(rnorm(r));
      }
      for (int b = 0; b < nb; ++b) {
        if (bnorm(b) > 0) bs(b) = 1.0 / std::sqrt(bnorm(b));
      }
      for (Index r = 0; r < m; ++r) row_scale_(r) = std::clamp(row_scale_(r) * rs(r), 1e-4, 1e4);
      for (int b = 0; b < nb; ++b) {
        block_scale_(b) = std::clamp(block_scale_(b) * bs(b), 1e-4, 1e4);
      }
      as = scaled_constraints();
    }
    a_hat_ = as;
    col_scale_ = Vector(layout_.dim());
    for (int b = 0; b < nb; ++b) {
      col_scale_.segment(layout_.offsets[static_cast<std::size_t>(b)],
                         layout_.offsets[static_cast<std::size_t>(b) + 1] -
                             layout_.offsets[static_cast<std::size_t>(b)])
          .setConstant(block_scale_(b));
    }
    c_hat_ = col_scale_.cwiseProduct(c_);
    b_hat_ = row_scale_.cwiseProduct(b_);
    cost_scale_ = c_hat_.size() && c_hat_.cwiseAbs().maxCoeff() > 0 ? c_hat_.cwiseAbs().maxCoeff() : 1.0;
    rhs_scale_ = b_hat_.size() && b_hat_.cwiseAbs().maxCoeff() > 0 ? b_hat_.cwiseAbs().maxCoeff() : 1.0;
    c_hat_ /= cost_scale_;
    b_hat_ /= rhs_scale_;
    if (m > 0) {
      gram_.compute(SparseMatrix(a_hat_ * SparseMatrix(a_hat_.transpose())));
      require(gram_.info() == Eigen::Success, ErrorKind::numeric,
              "constraint Gram factorization failed");
    }
  }

  int block_of_column(Index col) const {
    auto it = std::upper_bound(layout_.offsets.begin(), layout_.offsets.end(), col);
    return static_cast<int>(it - layout_.offsets.begin()) - 1;
  }

  SparseMatrix scaled_constraints() const {
    SparseMatrix out = a_;
    for (Index r = 0; r < out.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(out, r); it; ++it) {
        it.valueRef() *= row_scale_(r) * block_scale_(block_of_column(it.col()));
      }
    }
    return out;
  }

  void project_cone(Vector& v) {
    const int nb = static_cast<int>(layout_.sizes.size());
    pool_.run(nb, [&](int b) {
      const int k = layout_.sizes[static_cast<std::size_t>(b)];
      if (k == 1) {
        const Index at = layout_.offsets[static_cast<std::size_t>(b)];
        v(at) = std::max(v(at), 0.0);
        return;
      }
      Matrix m = layout_.unpack(v, b);
      project_psd_inplace(m);
      layout_.pack(m, b, v);
    });
  }

  // unscaled primal / dual / slack from scaled iterates
  Vector primal_of(const Vector& z) const { return col_scale_.cwiseProduct(z) * rhs_scale_; }
  Vector dual_of(const Vector& yh) const {
    Vector y = Vector::Zero(b_full_.size());
    for (std::size_t k = 0; k < keep_.size(); ++k) {
      y(keep_[k]) = row_scale_(static_cast<Index>(k)) * yh(static_cast<Index>(k)) * cost_scale_;
    }
    return y;
  }
  Vector slack_of(const Vector& sh) const { return sh.cwiseQuotient(col_scale_) * cost_scale_; }

  bool in_cone(const Vector& v, double tol) const {
    for (int b = 0; b < static_cast<int>(layout_.sizes.size()); ++b) {
      if (min_eigenvalue(layout_.unpack(v, b)) < -tol) return false;
    }
    return true;
  }

  double cone_violation(const Vector& v) const {
    double acc = 0.0;
    for (int b = 0; b < static_cast<int>(layout_.sizes.size()); ++b) {
      const double d = dist_psd(layout_.unpack(v, b));
      acc += d * d;
    }
    return std::sqrt(acc);
  }

  // Farkas check in original units: A^T y NSD, b^T y > 0.
  bool primal_infeasible(const Vector& y) const {
    if (y.norm() == 0.0) return false;
    const double by = b_full_.dot(y);
    if (by <= 0.0) return false;
    const Vector aty = a_full_.transpose() * y;
    return cone_violation(-aty) <= opts_.eps_infeasible * by;
  }

  // Recession direction: d PSD, A d = 0, c^T d < 0.
  bool dual_infeasible(const Vector& d) const {
    if (d.norm() == 0.0) return false;
    const double cd = c_.dot(d);
    if (cd >= 0.0) return false;
    return (a_full_ * d).norm() <= opts_.eps_infeasible * -cd &&
           cone_violation(d) <= opts_.eps_infeasible * -cd;
  }

  Solution iterate() {
    const Index n = layout_.dim();
    const Index m = a_hat_.rows();
    Vector z = Vector::Zero(n), u = Vector::Zero(n), x(n), xr(n), w = Vector::Zero(m);
    double rho = 1.0;
    const double theta = opts_.relaxation;
    Solution sol;
    Vector y_hist = Vector::Zero(b_full_.size()), z_hist = Vector::Zero(n);
    double p_acc = 0.0, d_acc = 0.0;
    int it = 0;
    for (it = 1; it <= opts_.max_iters; ++it) {
      Vector v = z - u - c_hat_ / rho;
      if (m > 0) {
        w = gram_.solve(a_hat_ * v - b_hat_);
        x = v - a_hat_.transpose() * w;
      } else {
        x = v;
      }
      xr = theta * x + (1.0 - theta) * z;
      Vector zn = xr + u;
      project_cone(zn);
      u += xr - zn;
      if (it % 50 == 0) {
        // consensus and dual step residuals of the splitting itself
        p_acc = (x - zn).norm() / (1e-12 + std::max(x.norm(), zn.norm()));
        d_acc = (zn - z).norm() / (1e-12 + u.norm());
      }
      z = std::move(zn);

      if (it % 10 == 0 || it == opts_.max_iters) {
        const Vector yh = -rho * w;
        const Vector sh = -rho * u;
        if (converged(z, yh, sh)) {
          sol.status = SolveStatus::optimal;
          finish(z, yh, sol);
          sol.iterations = it;
          return sol;
        }
      }
      if (it % 50 == 0) {
        const double ratio = p_acc / std::max(d_acc, 1e-300);
        double next = rho;
        if (ratio > 10.0) next = std::min(rho * 2.0, 1e4);
        if (ratio < 0.1) next = std::max(rho / 2.0, 1e-4);
        if (next != rho) {
          u *= rho / next;
          rho = next;
        }
        if (it >= 1000) {
          const Vector y_now = dual_of(-rho * w);
          const Vector z_now = primal_of(z);
          const Vector dy = y_now - y_hist;
          if (primal_infeasible(dy)) {
            sol.status = SolveStatus::infeasible_evidence;
            sol.y = dy / dy.norm();
            finish_blocks(Vector::Zero(n), sol);
            sol.iterations = it;
            return sol;
          }
          const Vector dz = z_now - z_hist;
          if (dual_infeasible(dz)) {
            sol.status = SolveStatus::unbounded_evidence;
            sol.y = Vector::Zero(b_full_.size());
            finish_blocks(dz / dz.norm(), sol);
            sol.iterations = it;
            return sol;
          }
        }
        y_hist = dual_of(-rho * w);
        z_hist = primal_of(z);
      }
    }
    sol.status = SolveStatus::max_iters;
    finish(z, -rho * w, sol);
    sol.iterations = opts_.max_iters;
    return sol;
  }

  bool converged(const Vector& zh, const Vector& yh, const Vector& sh) const {
    const Vector x = primal_of(zh);
    const Vector y = dual_of(yh);
    const Vector s = slack_of(sh);
    const Vector ax = a_full_ * x;
    const Vector aty = a_full_.transpose() * y;
    const double pres = (ax - b_full_).norm();
    const double dres = (c_ - aty - s).norm();
    const double pobj = c_.dot(x), dobj = b_full_.dot(y);
    const double ea = opts_.eps_abs, er = opts_.eps_rel;
    return pres <= ea + er * std::max(b_full_.norm(), ax.norm()) &&
           dres <= ea + er * std::max({c_.norm(), aty.norm(), s.norm()}) &&
           std::abs(pobj - dobj) <= ea + er * std::max(std::abs(pobj), std::abs(dobj));
  }

  void finish_blocks(const Vector& x, Solution& sol) const {
    sol.blocks.clear();
    for (int b = 0; b < static_cast<int>(layout_.sizes.size()); ++b) {
      sol.blocks.push_back(layout_.unpack(x, b));
    }
    if (sol.y.size() != b_full_.size()) sol.y = Vector::Zero(b_full_.size());
  }

  void finish(const Vector& zh, const Vector& yh, Solution& sol) const {
    const Vector x = primal_of(zh);
    sol.y = dual_of(yh);
    finish_blocks(x, sol);
    const Vector s = c_ - a_full_.transpose() * sol.y;
    sol.dual_slack.clear();
    for (int b = 0; b < static_cast<int>(layout_.sizes.size()); ++b) {
      sol.dual_slack.push_back(layout_.unpack(s, b));
    }
    sol.objective = c_.dot(x);
    sol.dual_objective = b_full_.dot(sol.y);
    sol.primal_residual = (a_full_ * x - b_full_).norm();
    sol.dual_residual = cone_violation(s);
  }

  ConicProgram prog_;
  SolverOptions opts_;
  SvecLayout layout_;
  ParallelFor pool_;
  Vector c_, b_full_, b_;
  SparseMatrix a_full_, a_, a_hat_;
  std::vector<Index> keep_;
  Vector row_scale_, block_scale_, col_scale_, c_hat_, b_hat_;
  double cost_scale_ = 1.0, rhs_scale_ = 1.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> gram_;
};

}  // namespace detail

inline Solution solve(const ConicProgram& prog, const SolverOptions& opts = {}) {
  detail::AdmmSolver solver(prog, opts);
  return solver.run();
}

inline Solution solve(const ConicProgram& prog, double eps_abs, double eps_rel,
                      int max_iters) {
  SolverOptions opts;
  opts.eps_abs = eps_abs;
  opts.eps_rel = eps_rel;
  opts.max_iters = max_iters;
  return solve(prog, opts);
}

}  // namespace blockfw

#endif  // BLOCKFW_SOLVER_HPP_
