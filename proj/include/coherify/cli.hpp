#pragma once

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coherify/matrix.hpp"

namespace coherify::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // anything not covered below, e.g. the oracle not converging
  kParseError = 2,
  kInvalidMatrix = 3,
  kMethodPrecondition = 4,
  kNotTracePreserving = 5,
  kBoundViolation = 6,
};

/// Raised by the matrix readers; carries the exit code to report.
class InputError : public std::runtime_error {
 public:
  InputError(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// A matrix as read from disk, before any validation beyond syntax and shape.
struct MatrixFile {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool complex = false;
  std::vector<Complex> entries;  // row-major

  ComplexMatrix matrix() const { return {rows, cols, entries}; }
};

/// {"dim": d, "kind": "real"|"complex", "entries": [...]}, entries flat and
/// row-major, complex ones as [re, im]. Syntax errors give kParseError, a
/// wrong entry count kInvalidMatrix.
MatrixFile parse_matrix_json(std::string_view text);

/// Rows of comma-separated reals. Blank lines are skipped. Ragged or
/// non-square input gives kInvalidMatrix.
MatrixFile parse_matrix_csv(std::string_view text);

/// The inverse of parse_matrix_json; "real" when every imaginary part is 0.
std::string format_matrix_json(const ComplexMatrix& m);

/// Entry point behind the executable. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coherify::cli
