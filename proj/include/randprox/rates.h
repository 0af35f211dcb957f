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

// Theoretical contraction factors c with E[Psi^t] <= c^t Psi^0, and the
// Lyapunov functions Psi they refer to. Psi is a weighted sum of squared
// distances, so c contracts squared distances.
//
// Every rate function checks its theorem's hypotheses and throws
// RateUnavailableError naming the first one that fails.

#ifndef RANDPROX_RATES_H_
#define RANDPROX_RATES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randprox/problem.h"
#include "randprox/solver_types.h"

namespace randprox {

enum class TheoremId {
  kT1,   // general RandProx
  kT2,   // g = 0, dual strongly convex through K
  kT3,   // forward-backward form, K = Id, g = 0
  kT4,   // linear constraint Kx = b
  kT5,   // minibatch over a finite sum of h_i
  kT6,   // primal linear constraint Wx = a
  kT7,   // Chambolle-Pock form, f = 0
  kT8,   // ADMM form, f = 0, K = Id
  kT9,   // Davis-Yin form, K = Id
  kT10,  // federated form
  kL1,   // gradient step contraction
};

const char* TheoremName(TheoremId id);  // "t1" ... "t10", "l1"
TheoremId ParseTheorem(const std::string& name);

struct RateReport {
  TheoremId theorem = TheoremId::kT1;
  double c = 0.0;
  std::vector<double> branch_values;
  double primal_weight = 0.0;
  double dual_weight = 0.0;
};

// max(1 - gamma mu, gamma L - 1), the Lipschitz constant of Id - gamma grad f.
double GdContraction(double gamma, double mu_f, double L_f);

RateReport RateThm1(const PrimalDualProblem& p, const SolverConfig& cfg);
RateReport RateThm2(const PrimalDualProblem& p, const SolverConfig& cfg);
RateReport RateThm3(double gamma, double mu_f, double L_f, double mu_hc,
                    double omega);
RateReport RateThm3(const PrimalDualProblem& p, const SolverConfig& cfg);
RateReport RateThm4(const PrimalDualProblem& p, const SolverConfig& cfg);
RateReport RateThm5(const PrimalDualProblem& p, const SolverConfig& cfg);
RateReport RateThm6(const PrimalDualProblem& p, const SolverConfig& cfg);
RateReport RateThm7(const PrimalDualProblem& p, const SolverConfig& cfg);
RateReport RateThm8(const PrimalDualProblem& p, const SolverConfig& cfg);
RateReport RateThm9(const PrimalDualProblem& p, const SolverConfig& cfg);
RateReport RateThm10(double gamma, double mu, double L, double omega);
RateReport RateThm10(const PrimalDualProblem& p, const SolverConfig& cfg);
// Lemma on the gradient step: c = GdContraction, weights (1, 0).
RateReport RateLemma1(double gamma, double mu_f, double L_f);

RateReport RateFor(TheoremId id, const PrimalDualProblem& p,
                   const SolverConfig& cfg);

// The theorem whose Lyapunov function and rate belong to an algorithm run on
// a problem of this shape. Hypotheses are not checked here.
TheoremId MatchingTheorem(Algorithm a, const PrimalDualProblem& p);

// Evaluates the theorem's Psi at the state. T4 measures the dual part on
// P_ran(K) u; T6 on the element of ran(W) representing v.
double Lyapunov(TheoremId id, const PrimalDualProblem& p,
                const SolverConfig& cfg, const SolverState& s,
                const KnownSolution& star);
// Same, with the solution stored in the problem.
double Lyapunov(TheoremId id, const PrimalDualProblem& p,
                const SolverConfig& cfg, const SolverState& s);

// Weights of Psi without hypothesis checks: (primal, dual).
std::pair<double, double> LyapunovWeights(TheoremId id,
                                          const PrimalDualProblem& p,
                                          const SolverConfig& cfg);

// Psi^0 / ((2 gamma - gamma^2 L) t), the ergodic Bregman bound.
double ErgodicBound(double psi0, double gamma, double L_f, int64_t t);

enum class ComplexityKind { kScaffnew, kPersonalizedFL, kRandK };

struct Complexity {
  // p for Scaffnew and personalized FL, k for rand-k.
  double parameter = 0.0;
  // Expected cost per log(1/eps), up to constants: p kappa + 1/p for the
  // probabilistic schemes, k kappa + d^2 / k floats for rand-k.
  double cost = 0.0;
};

// kappa = L / mu >= 1. Personalized FL needs lambda; rand-k needs d.
Complexity ComplexitySummary(ComplexityKind kind, double kappa,
                             double lambda_over_mu = 0.0, int64_t d = 0);

}  // namespace randprox

#endif  // RANDPROX_RATES_H_
