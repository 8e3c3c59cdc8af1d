// Copyright 2026 The stab-lab Authors
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

namespace stablab {

/// Bad caller input: dimension mismatch, out-of-range parameter, malformed file.
/// The CLI maps this to exit code 2.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A mathematical identity that must hold did not. Always a bug (or corrupted
/// input that slipped past validation). The CLI maps this to exit code 3.
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

/// A requested exhaustive computation exceeds the desk-scale budget.
struct BudgetExceeded : ValidationError {
    using ValidationError::ValidationError;
};

inline void require(bool ok, const std::string &message) {
    if (!ok) {
        throw ValidationError(message);
    }
}

inline void ensure(bool ok, const std::string &message) {
    if (!ok) {
        throw InvariantViolation(message);
    }
}

}  // namespace stablab
