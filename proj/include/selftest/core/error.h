// Copyright 2026 The selftest Authors
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

namespace selftest {

// Invalid configuration or key-generation parameters.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of an operation (index, preimage, register).
struct DomainError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Operation applied to a key of the wrong family.
struct FamilyError : std::logic_error {
    using std::logic_error::logic_error;
};

// Message out of sequence, wrong arity, or malformed wire data.
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Device callbacks invoked out of order.
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

// Requested simulation exceeds the configured size budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Device model violates a structural requirement (e.g. non-projective family).
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Channel failure: timeout, closed socket, truncated frame.
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace selftest
