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

// Ground truth computed without the iterative solvers: direct KKT solves,
// enumeration, finite differences and conditional expectations of Psi.

#ifndef RANDPROX_REFERENCE_ORACLE_H_
#define RANDPROX_REFERENCE_ORACLE_H_

#include <cstdint>

#include "randprox/problem.h"
#include "randprox/rates.h"
#include "randprox/solver_types.h"

namespace randprox {

enum class OracleMethod { kKktSolve, kDenseEnumeration, kLongDeterministicRun };

const char* OracleMethodName(OracleMethod m);

struct OracleSolution {
  Vector x_star;
  Vector u_star;
  double objective = 0.0;
  OracleMethod method = OracleMethod::kKktSolve;
};

// Exact saddle point of a quadratic/affine model. When the dual solution is
// not unique, returns the one in ran(K). l1 models are solved by enumerating
// sign patterns (dimension <= 10).
OracleSolution KktSolveQuadratic(const QuadraticModel& model);
// Throws OracleUnavailableError for problems outside the quadratic family.
OracleSolution KktSolveQuadratic(const PrimalDualProblem& p);

// PDDY with a small step for many iterations. Only for problems without a
// quadratic model; the result must pass the residual gate.
OracleSolution LongDeterministicRun(const PrimalDualProblem& p,
                                    int64_t iterations = 1000000);

// Max abs component error between grad f(x) and central differences.
// h must lie in [1e-8, 1e-3].
double FiniteDiffCheck(const SmoothOracle& f, const Vector& x, double h);

struct ContractionProbe {
  double mean_psi_next = 0.0;
  double std_error = 0.0;
  double psi = 0.0;
  double c = 0.0;
  double bound = 0.0;  // c * psi
  int64_t draws = 0;

  bool Passes(double sigmas = 3.0) const {
    return mean_psi_next <= bound * (1.0 + 1e-12) + sigmas * std_error;
  }
};

// Resamples only the estimator draw from a frozen state. Requires the known
// solution and draws >= 10^4; throws RateUnavailableError when the theorem's
// hypotheses fail.
ContractionProbe ConditionalContractionProbe(const PrimalDualProblem& p,
                                             const SolverConfig& cfg,
                                             Algorithm alg,
                                             const SolverState& state,
                                             int64_t draws, TheoremId theorem,
                                             uint64_t seed);

// E[Psi^{t+1} | state] summed exactly over every estimator outcome.
double ExactNextPsiExpectation(const PrimalDualProblem& p,
                               const SolverConfig& cfg, Algorithm alg,
                               const SolverState& state, TheoremId theorem);

}  // namespace randprox

#endif  // RANDPROX_REFERENCE_ORACLE_H_
