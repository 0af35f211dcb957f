// Copyright 2026 The RandProx Authors
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

#ifndef RANDPROX_TYPES_H_
#define RANDPROX_TYPES_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include "Eigen/Core"

namespace randprox {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr const char* kVersion = "0.3.0";

// Product spaces U_1 x ... x U_n with equal block sizes are stored as one flat
// vector; the layout records how to slice it.
struct BlockLayout {
  int64_t num_blocks = 1;
  int64_t block_dim = 0;

  int64_t size() const { return num_blocks * block_dim; }
  auto Block(Vector& v, int64_t i) const {
    return v.segment(i * block_dim, block_dim);
  }
  auto Block(const Vector& v, int64_t i) const {
    return v.segment(i * block_dim, block_dim);
  }
  bool operator==(const BlockLayout&) const = default;
};

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid scalar parameter (nonpositive step, probability outside (0,1], ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Vector or block dimensions do not match.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An algorithm was applied to a problem whose structure it does not support.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A theorem's hypotheses fail, so no certified rate exists.
class RateUnavailableError : public Error {
 public:
  using Error::Error;
};

// Lyapunov or distance diagnostics need data that is not available.
class DiagnosticsUnavailableError : public Error {
 public:
  using Error::Error;
};

class OracleUnavailableError : public Error {
 public:
  using Error::Error;
};

class ScheduleError : public Error {
 public:
  using Error::Error;
};

class ProblemConstructionError : public Error {
 public:
  using Error::Error;
};

inline void CheckSameSize(const Vector& a, int64_t expected,
                          const char* what) {
  if (a.size() != expected) {
    throw ShapeError(std::string(what) + ": expected dimension " +
                     std::to_string(expected) + ", got " +
                     std::to_string(a.size()));
  }
}

}  // namespace randprox

#endif  // RANDPROX_TYPES_H_
