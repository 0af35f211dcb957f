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

#ifndef RANDPROX_SOLVER_TYPES_H_
#define RANDPROX_SOLVER_TYPES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randprox/estimators.h"
#include "randprox/types.h"

namespace randprox {

enum class Algorithm {
  kPddy,
  kRandProx,
  kFb,
  kLc,
  kSkip,
  kMinibatch,
  kPointSaga,
  kCp,
  kAdmm,
  kDy,
  kPriLiCo,
  kFl,
};

const char* AlgorithmName(Algorithm a);
Algorithm ParseAlgorithm(const std::string& name);
std::vector<Algorithm> AllAlgorithms();

struct SolverConfig {
  double gamma = 0.0;
  double tau = 0.0;
  RandomEstimator estimator;
  int64_t iterations = 1000;
  uint64_t seed = 0;
  bool record_trace = true;
  // Dual relaxation rho in (0, 1]. Unset means rho = 1/(1+omega), the only
  // value with a certified rate.
  std::optional<double> relaxation;
  // Accept gamma >= 2/L when mu_g > 0, provided the contraction factor of
  // the general theorem stays below one.
  bool allow_large_gamma = false;
  // Omega the algorithm and the rates are told, in place of the estimator's
  // own. A value below the true omega voids every guarantee; it exists for
  // negative controls.
  std::optional<double> claimed_omega;
};

// Estimator constants as seen by the algorithm: the claimed omega with the
// default omega_ran = |K|^2 omega and zeta = 0, or the estimator's own.
EstimatorParams EffectiveParams(const SolverConfig& cfg, const LinearMap& K);

struct SolverState {
  Vector x;
  Vector u;
  Vector v;  // K* u
  int64_t t = 0;
  // Primal prediction of the last step. For the Chambolle-Pock form it holds
  // the prediction for the next step instead.
  Vector last_xhat;
  int64_t prox_h_calls = 0;
  int64_t floats_communicated = 0;
  // Coin outcomes of Bernoulli draws, fed to adaptive schedules.
  std::vector<bool> coin_history;
};

}  // namespace randprox

#endif  // RANDPROX_SOLVER_TYPES_H_
