// Copyright 2026 The smplocc Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace smplocc {

/// Precondition or type invariant violated by the caller.
struct ContractViolation : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A configured size cap would be exceeded.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A branch or projection with (numerically) zero weight was required to continue.
struct DegenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two replays of a deterministic procedure diverged.
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Random instance does not satisfy the hypothesis it was generated for.
struct HypothesisRejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The retry budget of a probabilistic-existence construction ran out.
struct ExistenceSamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) {
        throw ContractViolation(what);
    }
}

}  // namespace smplocc
