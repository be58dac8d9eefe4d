#ifndef EXTREG_ERRORS_HPP
#define EXTREG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace extreg {

// Stable error codes surfaced by the CLI. Every library failure maps to
// exactly one of these.
enum class ErrorCode {
  singular_design,
  degenerate_fit,
  leverage_degenerate,
  degenerate_norm,
  empty_distribution,
  domain_error,
  dimension_error,
  alignment_error,
  infeasible_split,
  fold_degeneracy,
  no_valid_alpha,
  bootstrap_degeneracy,
  io_error,
  parse_error,
  usage_error,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::singular_design: return "singular_design";
    case ErrorCode::degenerate_fit: return "degenerate_fit";
    case ErrorCode::leverage_degenerate: return "leverage_degenerate";
    case ErrorCode::degenerate_norm: return "degenerate_norm";
    case ErrorCode::empty_distribution: return "empty_distribution";
    case ErrorCode::domain_error: return "domain_error";
    case ErrorCode::dimension_error: return "dimension_error";
    case ErrorCode::alignment_error: return "alignment_error";
    case ErrorCode::infeasible_split: return "infeasible_split";
    case ErrorCode::fold_degeneracy: return "fold_degeneracy";
    case ErrorCode::no_valid_alpha: return "no_valid_alpha";
    case ErrorCode::bootstrap_degeneracy: return "bootstrap_degeneracy";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::usage_error: return "usage_error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace extreg

#endif
