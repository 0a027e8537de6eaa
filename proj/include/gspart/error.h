#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gspart {

enum class ErrorCode {
  kInvalidInput,
  kInvalidIndex,
  kInvalidConfig,
  kInvalidCuts,
  kInvalidId,
  kDegenerateScene,
  kFormat,
  kParse,
  kConsistency,
  kSchema,
  kIo,
  kConditioning,
  kUndefinedCorrelation,
  kMergeIntegrity,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Writes a warning line to stderr unless warnings are silenced.
void warn(std::string_view message);
void set_warnings_enabled(bool enabled);

}  // namespace gspart
