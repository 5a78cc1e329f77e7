// Copyright 2026 The protood Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace protood {

// Every failure raised by the library carries one of these codes so callers
// (the CLI in particular) can map it to an exit status without string matching.
enum class ErrorCode {
  kBadMagic,
  kHeaderParse,
  kPayloadSizeMismatch,
  kPayloadInvalid,
  kIoFailure,
  kDecodeError,
  kUnknownClassName,
  kUnknownLabelId,
  kMissingPath,
  kManifestInvalid,
  kImageTooSmall,
  kBackendUnavailable,
  kEmptySourceMask,
  kEmptyTokenMask,
  kZeroVector,
  kNoInstancesForClass,
  kDimMismatch,
  kThresholdOutOfRange,
  kEmptyProposalMask,
  kShapeMismatch,
  kEmptyGroundTruth,
  kMissingInference,
  kConfigError,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Re-raises `e` with `context` prepended to its message, keeping the code.
[[noreturn]] void rethrow_with_context(const Error& e, std::string_view context);

}  // namespace protood
