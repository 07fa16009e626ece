#ifndef BLOCKFW_SOS_HPP_
#define BLOCKFW_SOS_HPP_

// Sum-of-squares programs: p(x) = v_d(x)^T Q v_d(x) with Q PSD (full SOS) or
// Q in FW(alpha, 2) (alpha-SDSOS; the trivial partition gives SDSOS).

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "blockfw/cone.hpp"
#include "blockfw/errors.hpp"
#include "blockfw/partition.hpp"
#include "blockfw/reformulate.hpp"
#include "blockfw/solver.hpp"

namespace blockfw {

using Exponent = std::vector<int>;

class PolynomialForm {
 public:
  PolynomialForm() = default;
  explicit PolynomialForm(int n_vars) : n_vars_(n_vars) {
    detail::require(n_vars >= 1, ErrorKind::invalid_argument, "polynomial needs variables");
  }

  static PolynomialForm constant(int n_vars, double c) {
    PolynomialForm p(n_vars);
    p.add_term(Exponent(static_cast<std::size_t>(n_vars), 0), c);
    return p;
  }
  static PolynomialForm variable(int n_vars, int k) {
    PolynomialForm p(n_vars);
    Exponent e(static_cast<std::size_t>(n_vars), 0);
    e.at(static_cast<std::size_t>(k)) = 1;
    p.add_term(e, 1.0);
    return p;
  }

  int n_vars() const { return n_vars_; }
  const std::map<Exponent, double>& terms() const { return terms_; }

  int degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  double coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0.0 : it->second;
  }

  void add_term(const Exponent& e, double c) {
    detail::require(static_cast<int>(e.size()) == n_vars_, ErrorKind::invalid_argument,
                    "exponent length differs from the variable count");
    for (int k : e) detail::require(k >= 0, ErrorKind::invalid_argument, "negative exponent");
    detail::require(std::isfinite(c), ErrorKind::numeric, "non-finite coefficient");
    if (c == 0.0) return;
    double& slot = terms_[e];
    slot += c;
    if (slot == 0.0) terms_.erase(e);
  }

  double evaluate(const std::vector<double>& x) const {
    detail::require(static_cast<int>(x.size()) == n_vars_, ErrorKind::dimension_mismatch,
                    "point dimension differs from the variable count");
    double acc = 0.0;
    for (const auto& [e, c] : terms_) {
      double t = c;
      for (std::size_t k = 0; k < e.size(); ++k) t *= std::pow(x[k], e[k]);
      acc += t;
    }
    return acc;
  }

  PolynomialForm operator+(const PolynomialForm& o) const {
    check_same(o);
    PolynomialForm out = *this;
    for (const auto& [e, c] : o.terms_) out.add_term(e, c);
    return out;
  }
  PolynomialForm operator-(const PolynomialForm& o) const { return *this + o * -1.0; }
  PolynomialForm operator*(double s) const {
    PolynomialForm out(n_vars_);
    for (const auto& [e, c] : terms_) out.add_term(e, c * s);
    return out;
  }
  PolynomialForm operator*(const PolynomialForm& o) const {
    check_same(o);
    PolynomialForm out(n_vars_);
    for (const auto& [e1, c1] : terms_) {
      for (const auto& [e2, c2] : o.terms_) {
        Exponent e(e1.size());
        for (std::size_t k = 0; k < e.size(); ++k) e[k] = e1[k] + e2[k];
        out.add_term(e, c1 * c2);
      }
    }
    return out;
  }

  // largest absolute coefficient
  double max_coefficient() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

  bool operator==(const PolynomialForm&) const = default;

  static int total_degree(const Exponent& e) {
    int d = 0;
    for (int k : e) d += k;
    return d;
  }

 private:
  void check_same(const PolynomialForm& o) const {
    detail::require(o.n_vars_ == n_vars_, ErrorKind::dimension_mismatch,
                    "polynomials in different variable counts");
  }

  int n_vars_ = 0;
  std::map<Exponent, double> terms_;
};

// All monomials of total degree <= d: constant first, then by degree, and
// within a degree in descending lexicographic order of exponents
// (1, x1, x2, x1^2, x1 x2, x2^2, ...).
struct MonomialBasis {
  int n_vars = 0;
  int d = 0;
  std::vector<Exponent> monomials;

  int size() const { return static_cast<int>(monomials.size()); }
};

namespace detail {

inline void exponents_of_degree(int n, int t, Exponent& cur, int k, std::vector<Exponent>& out) {
  if (k == n - 1) {
    cur[static_cast<std::size_t>(k)] = t;
    out.push_back(cur);
    return;
  }
  for (int a = t; a >= 0; --a) {
    cur[static_cast<std::size_t>(k)] = a;
    exponents_of_degree(n, t - a, cur, k + 1, out);
  }
}

inline Exponent add_exponents(const Exponent& a, const Exponent& b) {
  Exponent e(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) e[k] = a[k] + b[k];
  return e;
}

}  // namespace detail

inline MonomialBasis monomial_basis(int n_vars, int d) {
  detail::require(n_vars >= 1 && d >= 0, ErrorKind::invalid_argument,
                  "basis needs n_vars >= 1 and d >= 0");
  MonomialBasis basis{n_vars, d, {}};
  Exponent cur(static_cast<std::size_t>(n_vars), 0);
  for (int t = 0; t <= d; ++t) detail::exponents_of_degree(n_vars, t, cur, 0, basis.monomials);
  return basis;
}

// One coefficient-matching equality: sum over positions (i <= j) of the
// symmetric Gram entries whose monomial product is `monomial` equals target.
// A position (i, j) with i < j contributes Q_ij + Q_ji.
struct GramEquality {
  Exponent monomial;
  std::vector<std::pair<int, int>> positions;
  double target = 0.0;
};

inline std::vector<GramEquality> gram_equalities(const PolynomialForm& poly,
                                                 const MonomialBasis& basis) {
  detail::require(poly.n_vars() == basis.n_vars, ErrorKind::dimension_mismatch,
                  "polynomial and basis variable counts differ");
  detail::require(poly.degree() <= 2 * basis.d, ErrorKind::invalid_argument,
                  "polynomial degree exceeds twice the basis degree");
  std::map<Exponent, std::vector<std::pair<int, int>>> groups;
  const int n = basis.size();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      groups[detail::add_exponents(basis.monomials[static_cast<std::size_t>(i)],
                                   basis.monomials[static_cast<std::size_t>(j)])]
          .emplace_back(i, j);
    }
  }
  // equalities listed in basis-style order of the monomials of degree <= 2d
  const MonomialBasis all = monomial_basis(basis.n_vars, 2 * basis.d);
  std::vector<GramEquality> out;
  for (const Exponent& e : all.monomials) {
    out.push_back({e, groups[e], poly.coefficient(e)});
  }
  return out;
}

inline LinearForm equality_form(const GramEquality& eq, int block = 0, int row_offset = 0,
                                int col_offset = 0) {
  LinearForm f;
  for (const auto& [i, j] : eq.positions) {
    f.entries.push_back({block, row_offset + i, col_offset + j, 1.0});
  }
  return f;
}

// minimize gamma subject to p + gamma SOS. Gamma is eliminated through the
// constant-monomial equality: gamma = Q_00 - p_0, so the program minimizes
// <E_00, Q> over the remaining equalities and gamma = objective - offset.
struct SosProgram {
  ConicProgram program;
  MonomialBasis basis;
  double offset = 0.0;

  double gamma(double objective) const { return objective - offset; }
};

inline SosProgram build_sos_program(const PolynomialForm& poly) {
  const int deg = poly.degree();
  detail::require(deg % 2 == 0, ErrorKind::invalid_argument,
                  "SOS program needs an even-degree polynomial");
  SosProgram out;
  out.basis = monomial_basis(poly.n_vars(), deg / 2);
  out.offset = poly.coefficient(Exponent(static_cast<std::size_t>(poly.n_vars()), 0));
  out.program.block_sizes = {out.basis.size()};
  out.program.objective.entries = {{0, 0, 0, 1.0}};
  for (const GramEquality& eq : gram_equalities(poly, out.basis)) {
    if (PolynomialForm::total_degree(eq.monomial) == 0) continue;
    out.program.constraints.push_back(equality_form(eq));
    out.program.rhs.push_back(eq.target);
  }
  return out;
}

struct AlphaSdsosProgram {
  BlockFwProgram reformulated;
  MonomialBasis basis;
  double offset = 0.0;

  const ConicProgram& program() const { return reformulated.program; }
  double gamma(double objective) const { return objective - offset; }
};

// The SOS program with Q restricted to FW(alpha, 2). Pair blocks with no data
// are kept so that every pair of the partition carries a Gram block.
inline AlphaSdsosProgram build_alpha_sdsos_program(const PolynomialForm& poly,
                                                   const Partition& alpha) {
  const SosProgram sos = build_sos_program(poly);
  detail::require(alpha.dim() == sos.basis.size(), ErrorKind::dimension_mismatch,
                  "partition does not match the monomial basis");
  return {to_block_fw_program(sos.program, alpha, false), sos.basis, sos.offset};
}

inline PolynomialForm broyden_poly(int n_vars) {
  detail::require(n_vars >= 2, ErrorKind::invalid_argument,
                  "Broyden polynomial needs at least two variables");
  const int n = n_vars;
  auto x = [&](int k) { return PolynomialForm::variable(n, k); };
  const PolynomialForm one = PolynomialForm::constant(n, 1.0);
  auto core = [&](int k) { return (PolynomialForm::constant(n, 3.0) - x(k) * 2.0) * x(k); };
  PolynomialForm q(n);
  const PolynomialForm first = core(0) - x(1) * 2.0 + one;
  q = q + first * first;
  for (int i = 1; i + 1 < n; ++i) {
    const PolynomialForm mid = core(i) - x(i - 1) - x(i + 1) * 2.0 + one;
    q = q + mid * mid;
  }
  const PolynomialForm last = core(n - 1) - x(n - 2) + one;
  q = q + last * last;
  PolynomialForm sum(n);
  for (int k = 0; k < n; ++k) sum = sum + x(k);
  return q + sum * sum;
}

// Squared term f(x)^2 of a certificate; f is a combination of the monomials
// of one pair subvector (or of the whole basis).
struct SquaredTerm {
  std::optional<BlockPair> pair;
  PolynomialForm f;
};

struct SosCertificate {
  bool ok = false;
  std::vector<SquaredTerm> terms;
};

namespace detail {

inline std::vector<PolynomialForm> factor_columns(const Matrix& q,
                                                  const std::vector<Exponent>& monos,
                                                  int n_vars, bool& ok) {
  const double tol = 1e-7 * (1.0 + q.norm());
  const CholeskyResult chol = cholesky_psd(q, tol);
  std::vector<PolynomialForm> out;
  if (!chol.ok) {
    ok = false;
    return out;
  }
  for (Index t = 0; t < chol.factor.cols(); ++t) {
    PolynomialForm f(n_vars);
    for (Index r = 0; r < chol.factor.rows(); ++r) {
      f.add_term(monos[static_cast<std::size_t>(r)], chol.factor(r, t));
    }
    if (!f.terms().empty()) out.push_back(std::move(f));
  }
  return out;
}

}  // namespace detail

// Certificate from a full Gram matrix Q over the basis.
inline SosCertificate extract_certificate(const Matrix& q, const MonomialBasis& basis) {
  detail::require(q.rows() == basis.size() && q.cols() == basis.size(),
                  ErrorKind::dimension_mismatch, "Gram matrix does not match the basis");
  SosCertificate cert;
  cert.ok = true;
  for (auto& f : detail::factor_columns(q, basis.monomials, basis.n_vars, cert.ok)) {
    cert.terms.push_back({std::nullopt, std::move(f)});
  }
  return cert;
}

// Certificate from a pair-block decomposition: each X_ij factors over the
// subvector m_ij(x) of the monomials in blocks i and j.
inline SosCertificate extract_certificate(const FwDecomposition& dec,
                                          const MonomialBasis& basis) {
  detail::require(dec.alpha.dim() == basis.size(), ErrorKind::dimension_mismatch,
                  "partition does not match the basis");
  SosCertificate cert;
  cert.ok = true;
  for (const auto& [bp, x] : dec.blocks) {
    std::vector<Exponent> monos;
    for (Index r : pair_indices(dec.alpha, bp)) {
      monos.push_back(basis.monomials[static_cast<std::size_t>(r)]);
    }
    for (auto& f : detail::factor_columns(x.dense(), monos, basis.n_vars, cert.ok)) {
      cert.terms.push_back({bp, std::move(f)});
    }
    if (!cert.ok) break;
  }
  return cert;
}

inline PolynomialForm expand_certificate(const SosCertificate& cert, int n_vars) {
  PolynomialForm sum(n_vars);
  for (const SquaredTerm& t : cert.terms) sum = sum + t.f * t.f;
  return sum;
}

// r x r symmetric polynomial matrix
using PolyMatrix = std::vector<std::vector<PolynomialForm>>;

struct MatrixSosPrograms {
  ConicProgram full;          // single Gram block of order r * N
  BlockFwProgram alpha_sdsos; // natural partition (N, ..., N)
  BlockFwProgram sdsos;       // trivial partition
  MonomialBasis basis;
  Partition natural;
};

// Feasibility programs for y^T (P(x) + gamma_shift I) y being a sum of
// squares in [x; y] with Gram basis y (x) v_d(x). Only monomials quadratic in
// y occur, so the equalities are indexed by (k <= l, x-monomial).
inline MatrixSosPrograms matrix_sos_program(const PolyMatrix& p, double gamma_shift) {
  const auto r = static_cast<int>(p.size());
  detail::require(r >= 1, ErrorKind::invalid_argument, "empty polynomial matrix");
  const int n_vars = p[0][0].n_vars();
  int deg = 0;
  for (int k = 0; k < r; ++k) {
    detail::require(static_cast<int>(p[static_cast<std::size_t>(k)].size()) == r,
                    ErrorKind::invalid_argument, "polynomial matrix is not square");
    for (int l = 0; l < r; ++l) {
      const PolynomialForm& e = p[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
      detail::require(e.n_vars() == n_vars, ErrorKind::invalid_argument,
                      "entries use different variable counts");
      detail::require(e == p[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)],
                      ErrorKind::invalid_argument, "polynomial matrix is not symmetric");
      deg = std::max(deg, e.degree());
    }
  }
  const int d = (deg + 1) / 2;
  MatrixSosPrograms out;
  out.basis = monomial_basis(n_vars, d);
  const int nb = out.basis.size();
  out.natural = Partition(std::vector<int>(static_cast<std::size_t>(r), nb));

  out.full.block_sizes = {r * nb};
  const Exponent zero(static_cast<std::size_t>(n_vars), 0);
  for (int k = 0; k < r; ++k) {
    for (int l = k; l < r; ++l) {
      PolynomialForm target = p[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
      if (k == l) target.add_term(zero, gamma_shift);
      for (const GramEquality& eq : gram_equalities(target, out.basis)) {
        if (k == l) {
          out.full.constraints.push_back(equality_form(eq, 0, k * nb, k * nb));
          out.full.rhs.push_back(eq.target);
          continue;
        }
        // off-diagonal Gram block Q_kl is not symmetric: every ordered (i, j)
        LinearForm f;
        for (const auto& [i, j] : eq.positions) {
          f.entries.push_back({0, k * nb + i, l * nb + j, 1.0});
          if (i != j) f.entries.push_back({0, k * nb + j, l * nb + i, 1.0});
        }
        out.full.constraints.push_back(std::move(f));
        out.full.rhs.push_back(2.0 * eq.target);
      }
    }
  }
  out.alpha_sdsos = to_block_fw_program(out.full, out.natural, false);
  out.sdsos = to_block_fw_program(out.full, Partition::trivial(r * nb), false);
  return out;
}

}  // namespace blockfw

#endif  // BLOCKFW_SOS_HPP_
