// Copyright 2026 The AgentSim Authors.
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

#include "agentsim/error.hpp"

namespace agentsim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDuplicateDocId: return "DuplicateDocId";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kEmptyQuery: return "EmptyQuery";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNoCandidates: return "NoCandidates";
    case ErrorCode::kEmptyQueryPool: return "EmptyQueryPool";
    case ErrorCode::kBackendError: return "BackendError";
    case ErrorCode::kUnparseableAction: return "UnparseableAction";
    case ErrorCode::kUnknownDocId: return "UnknownDocId";
    case ErrorCode::kPersistenceError: return "PersistenceError";
    case ErrorCode::kAlreadyDecided: return "AlreadyDecided";
    case ErrorCode::kStaleItem: return "StaleItem";
    case ErrorCode::kInvalidDecision: return "InvalidDecision";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kNoDoubleAnnotatedItems: return "NoDoubleAnnotatedItems";
    case ErrorCode::kSingleSeed: return "SingleSeed";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kIOError: return "IOError";
    case ErrorCode::kPendingReviewItems: return "PendingReviewItems";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kCorruptData: return "CorruptData";
  }
  return "Unknown";
}

}  // namespace agentsim
