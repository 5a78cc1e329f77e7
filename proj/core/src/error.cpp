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

#include "protood/error.hpp"

namespace protood {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kHeaderParse: return "HeaderParse";
    case ErrorCode::kPayloadSizeMismatch: return "PayloadSizeMismatch";
    case ErrorCode::kPayloadInvalid: return "PayloadInvalid";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kDecodeError: return "DecodeError";
    case ErrorCode::kUnknownClassName: return "UnknownClassName";
    case ErrorCode::kUnknownLabelId: return "UnknownLabelId";
    case ErrorCode::kMissingPath: return "MissingPath";
    case ErrorCode::kManifestInvalid: return "ManifestInvalid";
    case ErrorCode::kImageTooSmall: return "ImageTooSmall";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kEmptySourceMask: return "EmptySourceMask";
    case ErrorCode::kEmptyTokenMask: return "EmptyTokenMask";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kNoInstancesForClass: return "NoInstancesForClass";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kThresholdOutOfRange: return "ThresholdOutOfRange";
    case ErrorCode::kEmptyProposalMask: return "EmptyProposalMask";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::kMissingInference: return "MissingInference";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

void rethrow_with_context(const Error& e, std::string_view context) {
  // what() already starts with the code name; strip it so it is not repeated.
  std::string message = e.what();
  const std::string prefix = std::string(error_code_name(e.code())) + ": ";
  if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
  throw Error(e.code(), std::string(context) + ": " + message);
}

}  // namespace protood
