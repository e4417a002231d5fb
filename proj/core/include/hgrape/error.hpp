// Copyright 2026 The hgrape Authors
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

#ifndef HGRAPE_ERROR_HPP_
#define HGRAPE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace hgrape {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Raised when an input violates a structural precondition (non-Hermitian
// Hamiltonian, non-unitary target, non-orthonormal basis, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// gamma_n is undefined once n * u' >= 1.
class BoundInfeasibleError : public Error {
 public:
  using Error::Error;
};

// No (m, s) inside the search limits satisfies the error bound.
class PlanningError : public Error {
 public:
  using Error::Error;
};

class EigensolverError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace hgrape

#endif  // HGRAPE_ERROR_HPP_
