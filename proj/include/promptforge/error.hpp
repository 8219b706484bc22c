// Copyright 2026 The PromptForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROMPTFORGE_ERROR_HPP_
#define PROMPTFORGE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace promptforge {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidTemplate,
  kInvalidMapping,
  kMappingNotInVocab,
  kConfigError,
  kIoError,
  kParseError,
  kUnknownLabel,
  kFixtureParseError,
  kLexiconParseError,
  kWordNetParseError,
  kEmptyCorpus,
  kNoProbeSentences,
  kAllZeroScores,
  kIdMismatch,
  kBackendUnreachable,
  kBackendError,
  kNoMaskInInput,
  kMultipleMasks,
  kTokenNotInVocab,
  kInternal,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidTemplate: return "InvalidTemplate";
    case ErrorCode::kInvalidMapping: return "InvalidMapping";
    case ErrorCode::kMappingNotInVocab: return "MappingNotInVocab";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownLabel: return "UnknownLabel";
    case ErrorCode::kFixtureParseError: return "FixtureParseError";
    case ErrorCode::kLexiconParseError: return "LexiconParseError";
    case ErrorCode::kWordNetParseError: return "WordNetParseError";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kNoProbeSentences: return "NoProbeSentences";
    case ErrorCode::kAllZeroScores: return "AllZeroScores";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kBackendUnreachable: return "BackendUnreachable";
    case ErrorCode::kBackendError: return "BackendError";
    case ErrorCode::kNoMaskInInput: return "NoMaskInInput";
    case ErrorCode::kMultipleMasks: return "MultipleMasks";
    case ErrorCode::kTokenNotInVocab: return "TokenNotInVocab";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

// Process exit status for a failure of the given kind:
// 2 usage, 3 data insufficiency, 4 consistency, 5 backend failure.
inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyCorpus:
    case ErrorCode::kNoProbeSentences:
    case ErrorCode::kAllZeroScores:
      return 3;
    case ErrorCode::kIdMismatch:
    case ErrorCode::kInternal:
      return 4;
    case ErrorCode::kBackendUnreachable:
    case ErrorCode::kBackendError:
    case ErrorCode::kNoMaskInInput:
    case ErrorCode::kMultipleMasks:
    case ErrorCode::kTokenNotInVocab:
      return 5;
    default:
      return 2;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace promptforge

#endif  // PROMPTFORGE_ERROR_HPP_
