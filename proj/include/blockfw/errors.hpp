#ifndef BLOCKFW_ERRORS_HPP_
#define BLOCKFW_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace blockfw {

enum class ErrorKind {
  invalid_partition,
  invalid_argument,
  dimension_mismatch,
  numeric,
  invalid_decomposition,
  invalid_certificate,
  invalid_program,
  inconclusive,
  parse,
  validation,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_partition: return "invalid partition";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::dimension_mismatch: return "dimension mismatch";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::invalid_decomposition: return "invalid decomposition";
    case ErrorKind::invalid_certificate: return "invalid certificate";
    case ErrorKind::invalid_program: return "invalid program";
    case ErrorKind::inconclusive: return "inconclusive";
    case ErrorKind::parse: return "parse error";
    case ErrorKind::validation: return "validation error";
  }
  return "error";
}

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace detail

}  // namespace blockfw

#endif  // BLOCKFW_ERRORS_HPP_
