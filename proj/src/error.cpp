// Copyright 2026 The capsule-hil Authors
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

#include "hil/error.hpp"

namespace hil {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PastDue: return "PastDue";
    case ErrorCode::InvalidClock: return "InvalidClock";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::OrderError: return "OrderError";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::EndOfStudy: return "EndOfStudy";
    case ErrorCode::Upscale: return "Upscale";
    case ErrorCode::OddDimensions: return "OddDimensions";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::Busy: return "Busy";
    case ErrorCode::NoCapture: return "NoCapture";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::TableMiss: return "TableMiss";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::EmptyLog: return "EmptyLog";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingRun: return "MissingRun";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace hil
