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

// Iteration rules of PDDY, RandProx and its specializations, and the driver
// loop that records traces.
//
// Every step is a pure function of (problem, config, state, draw). The draw
// for iteration t is NextDraw(...), which depends only on the seed, t and the
// coin history, so two algorithms fed the same seed are coupled.

#ifndef RANDPROX_SOLVERS_H_
#define RANDPROX_SOLVERS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "randprox/estimators.h"
#include "randprox/problem.h"
#include "randprox/rates.h"
#include "randprox/solver_types.h"

namespace randprox {

// 1 / (gamma ((1 - zeta)|K|^2 + omega_ran)).
double DefaultTau(double gamma, const LinearMap& K,
                  const EstimatorParams& params);

// Config with the tau each algorithm is analyzed with. gamma defaults to
// 1/L_f, or 1 when f = 0. Point-SAGA always samples one block.
SolverConfig MakeConfig(const PrimalDualProblem& p, Algorithm alg,
                        RandomEstimator estimator,
                        std::optional<double> gamma = std::nullopt,
                        std::optional<double> tau = std::nullopt);

// Shape requirements of the algorithm; UsageError names the first violated.
void CheckShape(const PrimalDualProblem& p, const SolverConfig& cfg,
                Algorithm alg);
// Shape plus step-size hypotheses; ParameterError on violation.
void ValidateConfig(const PrimalDualProblem& p, const SolverConfig& cfg,
                    Algorithm alg);

// u0 = 0 unless given; v0 = K* u0. The CP form also precomputes x-hat^0.
SolverState InitialState(const PrimalDualProblem& p, const SolverConfig& cfg,
                         Algorithm alg,
                         const std::optional<Vector>& x0 = std::nullopt,
                         const std::optional<Vector>& u0 = std::nullopt);

// Draw for the state's iteration. Point-SAGA samples one block uniformly.
EstimatorDraw NextDraw(const PrimalDualProblem& p, const SolverConfig& cfg,
                       Algorithm alg, const SolverState& s);

SolverState PddyStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                     const SolverState& s);
SolverState RandProxStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                         const SolverState& s, const EstimatorDraw& draw);
SolverState FbStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                   const SolverState& s, const EstimatorDraw& draw);
SolverState LcStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                   const SolverState& s, const EstimatorDraw& draw);
// theta is the coin; the correction factor uses p_min of the estimator.
SolverState SkipStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                     const SolverState& s, bool theta);
// subset: sorted distinct block indices of size k.
SolverState MinibatchStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                          const SolverState& s,
                          const std::vector<int64_t>& subset);
SolverState PointSagaStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                          const SolverState& s, int64_t index);
SolverState CpStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                   const SolverState& s, const EstimatorDraw& draw);
SolverState AdmmStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                     const SolverState& s, const EstimatorDraw& draw);
SolverState DyStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                   const SolverState& s, const EstimatorDraw& draw);
// Works on p.gram; the state keeps v in ran(W) and u = sqrt(W)^+ v.
SolverState PriLiCoStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                        const SolverState& s, const EstimatorDraw& draw);

// Federated form: n nodes, each holding its own f_i on R^d.
struct FederatedNodes {
  BlockLayout layout;
  std::vector<SmoothOracle> local;
};

// Node oracles of a consensus problem with a quadratic model.
FederatedNodes NodesFromProblem(const PrimalDualProblem& p);

// Receives the compressed uploads a_i and returns what is broadcast.
using ServerFn = std::function<Vector(const std::vector<Vector>& uploads)>;
// Mean of the uploads.
Vector ServerAggregate(const std::vector<Vector>& uploads);

// One communication round. Gradients are evaluated only inside the per-node
// loop; the server sees the uploads alone. Adds n (support + d) floats when
// anything is sent.
SolverState FlRound(const FederatedNodes& nodes, double gamma, double omega,
                    const SolverState& s, const EstimatorDraw& draw,
                    const ServerFn& server = ServerAggregate);

// Dispatches to the step of the algorithm.
SolverState Step(const PrimalDualProblem& p, const SolverConfig& cfg,
                 Algorithm alg, const SolverState& s,
                 const EstimatorDraw& draw);

struct StopCriteria {
  int64_t max_iters = 1000;
  // Stop once CheckOptimalityResidual <= residual_tol; 0 disables.
  double residual_tol = 0.0;
};

// Missing diagnostics stay empty.
struct TraceRow {
  int64_t t = 0;
  std::optional<double> psi;
  std::optional<double> dist_x_sq;
  std::optional<double> dist_u_sq;
  std::optional<double> bregman;
  int64_t prox_h_calls = 0;
  int64_t floats_comm = 0;
};

struct Trace {
  std::vector<TraceRow> rows;
  std::optional<TheoremId> theorem;
  SolverState final_state;
  double final_residual = 0.0;
};

struct RunOptions {
  // Psi of this theorem instead of the matching one.
  std::optional<TheoremId> lyapunov;
  std::optional<Vector> x0;
  std::optional<Vector> u0;
  // Called with every state, the initial one included.
  std::function<void(const SolverState&)> observer;
};

// Validates, then iterates. Rows are recorded every iteration when
// cfg.record_trace, otherwise only the first and last.
Trace Run(const PrimalDualProblem& p, const SolverConfig& cfg, Algorithm alg,
          const StopCriteria& stop, const RunOptions& options = {});

// D_f(x, x*) = f(x) - f(x*) - <grad f(x*), x - x*>.
double Bregman(const SmoothOracle& f, const Vector& x, const Vector& x_star);

}  // namespace randprox

#endif  // RANDPROX_SOLVERS_H_
