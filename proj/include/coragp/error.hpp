// Copyright 2026 The coragp Authors
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

namespace coragp {

// Root of the library's exception hierarchy. The C API maps each subclass to
// a distinct status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (dimension mismatch, bad index...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Gram matrix could not be factorized.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-range configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Topology or switching preset breaks a structural precondition
// (leader-rooted spanning tree, irreducible jump chain).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Non-finite state during integration.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Output file or directory could not be written.
class IoError : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace coragp
