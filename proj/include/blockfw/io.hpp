#ifndef BLOCKFW_IO_HPP_
#define BLOCKFW_IO_HPP_

// Text formats: sparse SDPA (.dat-s), dense matrices, polynomials,
// polynomial matrices and partitions.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "blockfw/errors.hpp"
#include "blockfw/linalg.hpp"
#include "blockfw/partition.hpp"
#include "blockfw/solver.hpp"
#include "blockfw/sos.hpp"

namespace blockfw {

namespace detail {

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] inline void parse_fail(const std::string& where, int line, const std::string& what) {
  fail(ErrorKind::parse, where + ":" + std::to_string(line) + ": " + what);
}

inline double to_double(const std::string& tok, const std::string& where, int line) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
    parse_fail(where, line, "not a finite number: '" + tok + "'");
  }
  return v;
}

inline long to_int(const std::string& tok, const std::string& where, int line) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE) {
    parse_fail(where, line, "not an integer: '" + tok + "'");
  }
  return v;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::parse, "cannot open '" + path + "'");
  return in;
}

// Reads non-blank lines, dropping '#' comments; keeps line numbers.
struct LineReader {
  std::istream& in;
  std::string where;
  int line_no = 0;

  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      tokens = split_tokens(line);
      if (!tokens.empty()) return true;
    }
    return false;
  }
};

}  // namespace detail

// Sparse SDPA. The objective (matrix 0) is minimized; the c vector holds the
// right-hand sides. Diagonal blocks (negative sizes) become runs of 1 x 1
// blocks. Entries with i > j are stored as (j, i).
inline ConicProgram read_sdpa(std::istream& in, const std::string& where = "<sdpa>") {
  using detail::parse_fail;
  std::vector<std::string> header;  // numeric tokens after comments
  std::vector<int> header_lines;
  std::string line;
  int line_no = 0;
  bool in_comments = true;
  ConicProgram prog;
  int m = -1, nblocks = -1;
  std::vector<long> sdpa_sizes;
  std::vector<double> c;
  std::vector<int> first_internal;  // first internal block of each SDPA block

  auto clean = [](std::string s) {
    for (char& ch : s) {
      if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
    }
    return s;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (in_comments && !line.empty() && (line[0] == '"' || line[0] == '*')) continue;
    in_comments = false;
    auto tokens = detail::split_tokens(clean(line));
    if (tokens.empty()) continue;
    if (m < 0) {
      m = static_cast<int>(detail::to_int(tokens[0], where, line_no));
      if (m < 0) parse_fail(where, line_no, "negative constraint count");
      continue;
    }
    if (nblocks < 0) {
      nblocks = static_cast<int>(detail::to_int(tokens[0], where, line_no));
      if (nblocks < 1) parse_fail(where, line_no, "block count must be positive");
      continue;
    }
    if (static_cast<int>(sdpa_sizes.size()) < nblocks) {
      for (const auto& t : tokens) {
        if (static_cast<int>(sdpa_sizes.size()) == nblocks) break;
        const long k = detail::to_int(t, where, line_no);
        if (k == 0) parse_fail(where, line_no, "zero block size");
        sdpa_sizes.push_back(k);
      }
      if (static_cast<int>(sdpa_sizes.size()) == nblocks) {
        for (long k : sdpa_sizes) {
          first_internal.push_back(prog.num_blocks());
          if (k > 0) {
            prog.block_sizes.push_back(static_cast<int>(k));
          } else {
            for (long r = 0; r < -k; ++r) prog.block_sizes.push_back(1);
          }
        }
      }
      continue;
    }
    if (static_cast<int>(c.size()) < m) {
      for (const auto& t : tokens) {
        if (static_cast<int>(c.size()) == m) break;
        c.push_back(detail::to_double(t, where, line_no));
      }
      if (static_cast<int>(c.size()) == m) {
        prog.constraints.resize(static_cast<std::size_t>(m));
        prog.rhs = c;
      }
      continue;
    }
    if (tokens.size() != 5) parse_fail(where, line_no, "entry needs 5 fields");
    const long mat = detail::to_int(tokens[0], where, line_no);
    const long blk = detail::to_int(tokens[1], where, line_no);
    long i = detail::to_int(tokens[2], where, line_no);
    long j = detail::to_int(tokens[3], where, line_no);
    const double v = detail::to_double(tokens[4], where, line_no);
    const std::string at = where + ":" + std::to_string(line_no) + ": ";
    detail::require(mat >= 0 && mat <= m, ErrorKind::validation, at + "matrix index out of range");
    detail::require(blk >= 1 && blk <= nblocks, ErrorKind::validation,
                    at + "block index out of range");
    const long size = sdpa_sizes[static_cast<std::size_t>(blk - 1)];
    if (i > j) std::swap(i, j);
    detail::require(i >= 1 && j <= std::labs(size), ErrorKind::validation,
                    at + "entry outside its block");
    SymEntry e;
    if (size > 0) {
      e = {first_internal[static_cast<std::size_t>(blk - 1)], static_cast<int>(i - 1),
           static_cast<int>(j - 1), v};
    } else {
      detail::require(i == j, ErrorKind::validation, at + "off-diagonal entry in a diagonal block");
      e = {first_internal[static_cast<std::size_t>(blk - 1)] + static_cast<int>(i - 1), 0, 0, v};
    }
    (mat == 0 ? prog.objective : prog.constraints[static_cast<std::size_t>(mat - 1)])
        .entries.push_back(e);
  }
  if (m < 0 || nblocks < 0 || static_cast<int>(sdpa_sizes.size()) < nblocks ||
      static_cast<int>(c.size()) < m) {
    parse_fail(where, line_no, "truncated header");
  }
  return prog;
}

inline ConicProgram read_sdpa(const std::string& path) {
  auto in = detail::open_input(path);
  return read_sdpa(in, path);
}

inline void write_sdpa(const ConicProgram& prog, std::ostream& out) {
  prog.validate();
  out << prog.num_constraints() << "\n" << prog.num_blocks() << "\n";
  for (int b = 0; b < prog.num_blocks(); ++b) {
    out << (b ? " " : "") << prog.block_sizes[static_cast<std::size_t>(b)];
  }
  out << "\n";
  for (int i = 0; i < prog.num_constraints(); ++i) {
    out << (i ? " " : "") << detail::format_double(prog.rhs[static_cast<std::size_t>(i)]);
  }
  out << "\n";
  auto emit = [&](int mat, const LinearForm& f) {
    for (const SymEntry& e : f.entries) {
      out << mat << " " << e.block + 1 << " " << std::min(e.row, e.col) + 1 << " "
          << std::max(e.row, e.col) + 1 << " " << detail::format_double(e.value) << "\n";
    }
  };
  emit(0, prog.objective);
  for (int i = 0; i < prog.num_constraints(); ++i) {
    emit(i + 1, prog.constraints[static_cast<std::size_t>(i)]);
  }
}

inline void write_sdpa(const ConicProgram& prog, const std::string& path) {
  std::ofstream out(path);
  detail::require(static_cast<bool>(out), ErrorKind::parse, "cannot write '" + path + "'");
  write_sdpa(prog, out);
}

// First line n, then n rows of n reals.
inline SymMatrix read_matrix(std::istream& in, const std::string& where = "<matrix>") {
  detail::LineReader reader{in, where};
  std::vector<std::string> tok;
  if (!reader.next(tok)) detail::parse_fail(where, reader.line_no, "empty matrix file");
  if (tok.size() != 1) detail::parse_fail(where, reader.line_no, "first line must hold n");
  const long n = detail::to_int(tok[0], where, reader.line_no);
  if (n < 1) detail::parse_fail(where, reader.line_no, "n must be positive");
  Matrix m(n, n);
  for (long r = 0; r < n; ++r) {
    if (!reader.next(tok)) detail::parse_fail(where, reader.line_no, "missing matrix rows");
    if (static_cast<long>(tok.size()) != n) {
      detail::parse_fail(where, reader.line_no, "row has " + std::to_string(tok.size()) +
                                                    " entries, expected " + std::to_string(n));
    }
    for (long c = 0; c < n; ++c) m(r, c) = detail::to_double(tok[static_cast<std::size_t>(c)], where, reader.line_no);
  }
  if (reader.next(tok)) detail::parse_fail(where, reader.line_no, "trailing data");
  return SymMatrix(m);
}

inline SymMatrix read_matrix(const std::string& path) {
  auto in = detail::open_input(path);
  return read_matrix(in, path);
}

inline void write_matrix(const Matrix& m, std::ostream& out) {
  out << m.rows() << "\n";
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << detail::format_double(m(r, c));
    out << "\n";
  }
}

inline void write_matrix(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  detail::require(static_cast<bool>(out), ErrorKind::parse, "cannot write '" + path + "'");
  write_matrix(m, out);
}

// Header "nvars k", then lines "coeff e_1 ... e_k".
inline PolynomialForm read_poly(std::istream& in, const std::string& where = "<poly>") {
  detail::LineReader reader{in, where};
  std::vector<std::string> tok;
  if (!reader.next(tok) || tok.size() != 2 || tok[0] != "nvars") {
    detail::parse_fail(where, reader.line_no, "expected header 'nvars <k>'");
  }
  const long k = detail::to_int(tok[1], where, reader.line_no);
  if (k < 1) detail::parse_fail(where, reader.line_no, "nvars must be positive");
  PolynomialForm p(static_cast<int>(k));
  while (reader.next(tok)) {
    if (static_cast<long>(tok.size()) != k + 1) {
      detail::parse_fail(where, reader.line_no, "term needs a coefficient and " +
                                                    std::to_string(k) + " exponents");
    }
    const double coeff = detail::to_double(tok[0], where, reader.line_no);
    Exponent e;
    for (long t = 1; t <= k; ++t) {
      const long x = detail::to_int(tok[static_cast<std::size_t>(t)], where, reader.line_no);
      if (x < 0) detail::parse_fail(where, reader.line_no, "negative exponent");
      e.push_back(static_cast<int>(x));
    }
    p.add_term(e, coeff);
  }
  return p;
}

inline PolynomialForm read_poly(const std::string& path) {
  auto in = detail::open_input(path);
  return read_poly(in, path);
}

// Header "nvars k" and "size r", then lines "i j coeff e_1 ... e_k" with
// 1-based 1 <= i <= j <= r; entry (j, i) mirrors (i, j).
inline PolyMatrix read_polymatrix(std::istream& in, const std::string& where = "<polymatrix>") {
  detail::LineReader reader{in, where};
  std::vector<std::string> tok;
  if (!reader.next(tok) || tok.size() != 2 || tok[0] != "nvars") {
    detail::parse_fail(where, reader.line_no, "expected header 'nvars <k>'");
  }
  const long k = detail::to_int(tok[1], where, reader.line_no);
  if (k < 1) detail::parse_fail(where, reader.line_no, "nvars must be positive");
  if (!reader.next(tok) || tok.size() != 2 || tok[0] != "size") {
    detail::parse_fail(where, reader.line_no, "expected header 'size <r>'");
  }
  const long r = detail::to_int(tok[1], where, reader.line_no);
  if (r < 1) detail::parse_fail(where, reader.line_no, "size must be positive");
  PolyMatrix p(static_cast<std::size_t>(r),
               std::vector<PolynomialForm>(static_cast<std::size_t>(r),
                                           PolynomialForm(static_cast<int>(k))));
  while (reader.next(tok)) {
    if (static_cast<long>(tok.size()) != k + 3) {
      detail::parse_fail(where, reader.line_no, "term needs i, j, a coefficient and " +
                                                    std::to_string(k) + " exponents");
    }
    const long i = detail::to_int(tok[0], where, reader.line_no);
    const long j = detail::to_int(tok[1], where, reader.line_no);
    if (i < 1 || j > r || i > j) {
      detail::parse_fail(where, reader.line_no, "entry index must satisfy 1 <= i <= j <= size");
    }
    const double coeff = detail::to_double(tok[2], where, reader.line_no);
    Exponent e;
    for (long t = 3; t < k + 3; ++t) {
      const long x = detail::to_int(tok[static_cast<std::size_t>(t)], where, reader.line_no);
      if (x < 0) detail::parse_fail(where, reader.line_no, "negative exponent");
      e.push_back(static_cast<int>(x));
    }
    p[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)].add_term(e, coeff);
    if (i != j) p[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(i - 1)].add_term(e, coeff);
  }
  return p;
}

inline PolyMatrix read_polymatrix(const std::string& path) {
  auto in = detail::open_input(path);
  return read_polymatrix(in, path);
}

// Whitespace-separated positive block sizes.
inline Partition parse_partition(const std::string& text, const std::string& where = "<partition>") {
  std::vector<int> sizes;
  int line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    for (const auto& t : detail::split_tokens(line)) {
      const long k = detail::to_int(t, where, line_no);
      if (k < 1) detail::parse_fail(where, line_no, "block sizes must be positive");
      sizes.push_back(static_cast<int>(k));
    }
  }
  if (sizes.empty()) detail::parse_fail(where, line_no, "empty partition");
  return Partition(std::move(sizes));
}

inline Partition read_partition(const std::string& path) {
  auto in = detail::open_input(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_partition(buf.str(), path);
}

}  // namespace blockfw

#endif  // BLOCKFW_IO_HPP_
