#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace icspp {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  TooFewRows,
  NotPositiveDefinite,
  DimensionMismatch,
  InvalidIndices,
  DegeneratePairs,
  SingularDesign,
  InvalidSpec,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// All failures inside the library surface as this exception; the C API maps
// the code onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace icspp
