#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evso {

enum class ErrorCode {
  // ingestion
  MalformedHeader,
  TruncatedFrame,
  UnsupportedColorSpace,
  SizeMismatch,
  InvalidDims,
  BlockTooLarge,
  // similarity / statistics
  DimsMismatch,
  BlockOutOfRange,
  FrameTooSmall,
  TooFewFrames,
  DegenerateInput,
  // scheduling / processing
  WindowOutOfRange,
  ChunkTooSmall,
  InvalidRate,
  ScheduleMismatch,
  IoError,
  // manifest / streaming
  ChunkCountMismatch,
  MalformedXml,
  InvariantViolation,
  NoVideoSets,
  BindFailure,
  MissingManifest,
  // configuration
  InvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; code() identifies the
// failure class for callers that need to branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace evso
