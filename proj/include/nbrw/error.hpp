/*
 * Copyright 2026 The nbrw-lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nbrw {

enum class ErrorCode {
  // graph
  NotRegular,
  SelfLoop,
  DuplicateEdge,
  BadVertexId,
  UnknownName,
  OddDegreeSum,
  AttemptsExhausted,
  Infeasible,
  // spectral
  NoConvergence,
  NegativeInput,
  DegreeTooSmall,
  HorizonExceeded,
  BipartiteOrDisconnected,
  // walk
  BadStart,
  // sieve
  NegativeMean,
  DimensionMismatch,
  NotAPmf,
  EmptyEnsemble,
  OverflowRisk,
  TableTooSmall,
  OutOfRange,
  // stats
  DomainTooSmall,
  // io / plumbing
  ParseError,
  InvalidArgument,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotRegular: return "NotRegular";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::BadVertexId: return "BadVertexId";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::OddDegreeSum: return "OddDegreeSum";
    case ErrorCode::AttemptsExhausted: return "AttemptsExhausted";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::DegreeTooSmall: return "DegreeTooSmall";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::BipartiteOrDisconnected: return "BipartiteOrDisconnected";
    case ErrorCode::BadStart: return "BadStart";
    case ErrorCode::NegativeMean: return "NegativeMean";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotAPmf: return "NotAPmf";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::OverflowRisk: return "OverflowRisk";
    case ErrorCode::TableTooSmall: return "TableTooSmall";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DomainTooSmall: return "DomainTooSmall";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

}  // namespace nbrw
