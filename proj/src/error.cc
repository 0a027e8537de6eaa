#include "gspart/error.h"

#include <atomic>
#include <iostream>
#include <mutex>

namespace gspart {

namespace {
std::atomic<bool> g_warnings_enabled{true};
std::mutex g_warn_mutex;
}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid-input";
    case ErrorCode::kInvalidIndex: return "invalid-index";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kInvalidCuts: return "invalid-cuts";
    case ErrorCode::kInvalidId: return "invalid-id";
    case ErrorCode::kDegenerateScene: return "degenerate-scene";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kConsistency: return "consistency";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kConditioning: return "conditioning";
    case ErrorCode::kUndefinedCorrelation: return "undefined-correlation";
    case ErrorCode::kMergeIntegrity: return "merge-integrity";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void warn(std::string_view message) {
  if (!g_warnings_enabled.load(std::memory_order_relaxed)) return;
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  std::cerr << "warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) {
  g_warnings_enabled.store(enabled, std::memory_order_relaxed);
}

}  // namespace gspart
