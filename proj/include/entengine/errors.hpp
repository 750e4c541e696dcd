// Copyright 2026 The entengine Authors
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

namespace entengine {

// Malformed or out-of-range input. Maps to CLI exit code 1.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Target admits no energy-conserving machine. Exit code 2.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Problem size exceeds the dense-state / sparse-superoperator pathway. Exit code 3.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical null space of the Liouvillian is not one-dimensional. Exit code 4.
class DegenerateSteadyStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The heralding projector has (numerically) zero weight on the state. Exit code 5.
class HeraldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Time integration left its trace-drift budget. Exit code 6.
class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace entengine
