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

// Multi-trial experiments shared by the command line tool and the acceptance
// suite: rate certification, the ergodic convex bench and CSV output.

#ifndef RANDPROX_EXPERIMENTS_H_
#define RANDPROX_EXPERIMENTS_H_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <future>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "randprox/reference_oracle.h"
#include "randprox/solvers.h"

namespace randprox {

// Runs fn(0..count-1) on worker threads, at most hardware_concurrency at a
// time, and returns the results by index.
template <typename T>
std::vector<T> ParallelMap(int64_t count,
                           const std::function<T(int64_t)>& fn) {
  const int64_t width =
      std::max<int64_t>(1, std::thread::hardware_concurrency());
  std::vector<T> out;
  out.reserve(count);
  for (int64_t start = 0; start < count; start += width) {
    std::vector<std::future<T>> jobs;
    const int64_t stop = std::min(count, start + width);
    for (int64_t i = start; i < stop; ++i) {
      jobs.push_back(std::async(std::launch::async, fn, i));
    }
    for (auto& job : jobs) out.push_back(job.get());
  }
  return out;
}

// Seed of trial i for a base seed.
uint64_t TrialSeed(uint64_t seed, int64_t trial);

struct CertifyOptions {
  int64_t trials = 1;
  int64_t iterations = 1000;
  uint64_t seed = 0;
  // Relative slack on c^t Psi^0, on top of sigmas standard errors.
  double rel_slack = 1e-9;
  double sigmas = 3.0;
  int64_t probe_states = 5;
  int64_t probe_draws = 10000;
};

struct CertifyReport {
  TheoremId theorem = TheoremId::kT1;
  RateReport rate;
  std::vector<double> mean_psi;  // by t
  std::vector<double> se_psi;    // cross-trial standard error
  // min over t of (bound_t - mean_t) / (c^t Psi^0), bound_t including slack.
  double worst_margin = 0.0;
  int64_t worst_t = 0;
  bool trajectory_passed = false;
  std::vector<ContractionProbe> probes;
  bool probes_passed = true;
  bool passed = false;
};

// mean_t Psi^t <= c^t Psi^0 (1 + rel_slack) + sigmas SE_t for every t, plus
// conditional probes at states visited by the first trial. Throws
// RateUnavailableError when the theorem does not apply.
CertifyReport Certify(const PrimalDualProblem& p, const SolverConfig& cfg,
                      Algorithm alg, TheoremId theorem,
                      const CertifyOptions& options);

struct ConvexBenchReport {
  std::vector<double> mean_bregman_avg;  // D_f(x-bar^t, x*), t = 1..T
  std::vector<double> bound;             // Psi^0 / ((2 gamma - gamma^2 L) t)
  bool bound_holds = false;
  double final_bregman = 0.0;  // trial mean of D_f(x^T, x*)
  // D_f(x^t, x*) >= |grad f(x^t) - grad f(x*)|^2 / (2 L) at every t.
  bool cocoercivity_holds = false;
  std::vector<double> mean_dual_dist_sq;  // |u^t - u*|^2, t = 0..T
  bool strongly_convex_warning = false;
  double psi0 = 0.0;
};

ConvexBenchReport ConvexBench(const PrimalDualProblem& p,
                              const SolverConfig& cfg, Algorithm alg,
                              int64_t iterations, int64_t trials,
                              uint64_t seed);

// "# key: value" lines followed by the fixed columns
// t,psi,dist_x_sq,dist_u_sq,bregman,prox_h_calls,floats_comm. Missing
// diagnostics are empty fields.
void WriteTraceCsv(std::ostream& out, const Trace& trace,
                   const std::vector<std::pair<std::string, std::string>>&
                       header);

// Shortest round-trip decimal form.
std::string FormatDouble(double v);

}  // namespace randprox

#endif  // RANDPROX_EXPERIMENTS_H_
