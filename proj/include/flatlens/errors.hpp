// SPDX-License-Identifier: Apache-2.0
//
// flatlens: flattened Luneburg lens design and verification toolkit
// Copyright (C) 2026 The flatlens authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace flatlens {

// Invalid parameters, inconsistent geometry, bad config keys. CLI exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of a formula (negative radius, |y| >= R, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Raised by compute_tensors inside the rim band where the scale factor vanishes.
// Callers that sample maps catch this and substitute vacuum.
class EdgeSingularityError : public DomainError {
public:
    using DomainError::DomainError;
};

// Instability, non-convergence, ill-posed inversions. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// CLI exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace flatlens
