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

// In-process client/server simulation of the federated form with
// communication accounting.

#ifndef RANDPROX_FLSIM_H_
#define RANDPROX_FLSIM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "randprox/estimators.h"
#include "randprox/solvers.h"

namespace randprox {

struct FLConfig {
  FederatedNodes nodes;  // n nodes of dimension d
  double mu = 1.0;
  double L = 1.0;
  RandomEstimator estimator;
  double gamma = 1.0;
  // Stop once Psi^t <= target_eps Psi^0.
  double target_eps = 1e-6;
  // Consensus solution, stacked, and the matching duals u_i* = -grad f_i(x*).
  Vector x_star;
  Vector u_star;

  int64_t n() const { return nodes.layout.num_blocks; }
  int64_t d() const { return nodes.layout.block_dim; }
  double kappa() const { return L / mu; }
};

// Heterogeneous quadratic nodes with spectra in [mu, kappa mu] (both ends
// attained) and gamma = 1/L.
FLConfig MakeFLConfig(int64_t n, int64_t d, double kappa,
                      RandomEstimator estimator, uint64_t seed,
                      double mu = 1.0, double target_eps = 1e-6);

struct CommLedger {
  int64_t rounds = 0;
  int64_t uplink_floats = 0;
  int64_t downlink_floats = 0;
  int64_t communication_events = 0;
};

struct FLResult {
  Trace trace;  // psi column is the federated Lyapunov function
  CommLedger ledger;
  bool reached_target = false;
};

// Psi = (1/gamma)|x - x*|^2 + gamma (1 + omega)^2 |u - u*|^2.
double FLLyapunov(const FLConfig& fl, const SolverState& s);

// Throws UsageError for estimators whose randomness is not shared by the
// nodes and ParameterError unless gamma < 2/L.
FLResult RunFL(const FLConfig& fl, int64_t max_rounds, uint64_t seed);

enum class SweepKind { kScaffnew, kRandK };
const char* SweepKindName(SweepKind k);
SweepKind ParseSweepKind(const std::string& name);

struct SweepRow {
  double kappa = 0.0;
  double parameter = 0.0;  // p or k
  double mean_cost = 0.0;  // communicating rounds, or uplink floats
  double std_cost = 0.0;
  int64_t trials = 0;
  int64_t unfinished = 0;  // trials that hit max_rounds
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double slope = 0.0;  // least-squares slope of log cost against log kappa
};

struct SweepOptions {
  int64_t n = 5;
  int64_t d = 20;
  double target_eps = 1e-6;
  int64_t max_rounds = 1000000;
};

// Tunes p = 1/sqrt(kappa) or k = ceil(d / sqrt(kappa)) and measures the mean
// cost to reach target_eps. Trials run in parallel and merge by index.
SweepResult KappaSweep(SweepKind kind, const std::vector<double>& kappas,
                       int64_t trials, uint64_t seed,
                       const SweepOptions& options = {});

// Least-squares slope of log y against log x.
double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace randprox

#endif  // RANDPROX_FLSIM_H_
