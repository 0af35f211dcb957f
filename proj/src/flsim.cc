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

#include "randprox/flsim.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <future>

#include "randprox/catalog.h"
#include "randprox/rates.h"
#include "randprox/rng.h"

namespace randprox {
namespace {

void CheckSharedEstimator(const FLConfig& fl) {
  const RandomEstimator& e = fl.estimator;
  const bool ok =
      e.is_linear() &&
      (e.kind() == EstimatorKind::kIdentity ||
       e.kind() == EstimatorKind::kBernoulli ||
       (e.kind() == EstimatorKind::kRandK && e.d() == fl.d()) ||
       (e.kind() == EstimatorKind::kSharedRandK && e.d() == fl.d() &&
        e.n() == fl.n()));
  if (!ok) {
    throw UsageError("fl: estimator '" + e.spec() +
                     "' is not a linear law shared by the nodes");
  }
}

}  // namespace

FLConfig MakeFLConfig(int64_t n, int64_t d, double kappa,
                      RandomEstimator estimator, uint64_t seed, double mu,
                      double target_eps) {
  if (!(kappa >= 1.0)) throw ParameterError("MakeFLConfig: kappa must be >= 1");
  if (!(target_eps > 0.0)) {
    throw ParameterError("MakeFLConfig: target_eps must be positive");
  }
  QuadraticProblemOptions o;
  o.dim = d;
  o.num_blocks = n;
  o.mu = mu;
  o.L = kappa * mu;
  o.seed = seed;
  o.variant = QuadraticVariant::kConsensusFL;
  const PrimalDualProblem p = MakeQuadraticProblem(o);
  FLConfig fl;
  fl.nodes = NodesFromProblem(p);
  fl.mu = mu;
  fl.L = o.L;
  fl.estimator = std::move(estimator);
  fl.gamma = 1.0 / fl.L;
  fl.target_eps = target_eps;
  fl.x_star = p.known_solution->x_star;
  fl.u_star = p.known_solution->u_star;
  return fl;
}

double FLLyapunov(const FLConfig& fl, const SolverState& s) {
  const double w = 1.0 + fl.estimator.omega();
  return (s.x - fl.x_star).squaredNorm() / fl.gamma +
         fl.gamma * w * w * (s.u - fl.u_star).squaredNorm();
}

FLResult RunFL(const FLConfig& fl, int64_t max_rounds, uint64_t seed) {
  CheckSharedEstimator(fl);
  if (!(fl.gamma > 0.0 && fl.gamma * fl.L < 2.0 * (1.0 - 1e-12))) {
    throw ParameterError("fl: gamma must be in (0, 2/L)");
  }
  if (max_rounds < 0) throw ParameterError("fl: max_rounds must be >= 0");
  const BlockLayout& l = fl.nodes.layout;
  CheckSameSize(fl.x_star, l.size(), "fl(x*)");
  const double omega = fl.estimator.omega();

  FLResult out;
  SolverState s;
  s.x = Vector::Zero(l.size());
  s.u = Vector::Zero(l.size());
  s.v = s.u;
  auto row_of = [&](const SolverState& st, double psi) {
    TraceRow row;
    row.t = st.t;
    row.psi = psi;
    row.dist_x_sq = (st.x - fl.x_star).squaredNorm();
    row.dist_u_sq = (st.u - fl.u_star).squaredNorm();
    row.prox_h_calls = st.prox_h_calls;
    row.floats_comm = st.floats_communicated;
    return row;
  };
  const double psi0 = FLLyapunov(fl, s);
  out.trace.rows.push_back(row_of(s, psi0));
  out.reached_target = psi0 == 0.0;
  while (!out.reached_target && s.t < max_rounds) {
    const EstimatorDraw draw = fl.estimator.Draw(seed, s.t, s.coin_history);
    s = FlRound(fl.nodes, fl.gamma, omega, s, draw);
    out.ledger.rounds += 1;
    if (!draw.IsZero()) {
      out.ledger.communication_events += 1;
      const int64_t per_node =
          draw.kind == EstimatorKind::kSharedRandK
              ? static_cast<int64_t>(draw.selected.size())
              : draw.SupportSize(l.block_dim);
      out.ledger.uplink_floats += l.num_blocks * per_node;
      out.ledger.downlink_floats += l.num_blocks * l.block_dim;
    }
    const double psi = FLLyapunov(fl, s);
    out.trace.rows.push_back(row_of(s, psi));
    out.reached_target = psi <= fl.target_eps * psi0;
  }
  out.trace.final_state = s;
  return out;
}

const char* SweepKindName(SweepKind k) {
  return k == SweepKind::kScaffnew ? "scaffnew" : "rand_k";
}

SweepKind ParseSweepKind(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "scaffnew") return SweepKind::kScaffnew;
  if (lower == "rand_k" || lower == "randk") return SweepKind::kRandK;
  throw ParameterError("unknown sweep kind '" + name + "'");
}

double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ParameterError("LogLogSlope: need two or more matching points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) {
      throw ParameterError("LogLogSlope: values must be positive");
    }
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ParameterError("LogLogSlope: x values are all equal");
  return sxy / sxx;
}

SweepResult KappaSweep(SweepKind kind, const std::vector<double>& kappas,
                       int64_t trials, uint64_t seed,
                       const SweepOptions& options) {
  if (trials < 10) throw ParameterError("KappaSweep: trials must be >= 10");
  if (kappas.empty()) throw ParameterError("KappaSweep: no kappa values");
  SweepResult result;
  for (size_t ki = 0; ki < kappas.size(); ++ki) {
    const double kappa = kappas[ki];
    if (!(kappa >= 1.0)) throw ParameterError("KappaSweep: kappa must be >= 1");
    SweepRow row;
    row.kappa = kappa;
    row.trials = trials;
    RandomEstimator estimator;
    if (kind == SweepKind::kScaffnew) {
      row.parameter = ComplexitySummary(ComplexityKind::kScaffnew, kappa).parameter;
      estimator = RandomEstimator::Bernoulli(row.parameter);
    } else {
      row.parameter =
          ComplexitySummary(ComplexityKind::kRandK, kappa, 0.0, options.d)
              .parameter;
      estimator = RandomEstimator::RandK(static_cast<int64_t>(row.parameter),
                                         options.d);
    }
    std::vector<std::future<std::pair<double, bool>>> jobs;
    for (int64_t trial = 0; trial < trials; ++trial) {
      const uint64_t trial_seed =
          SplitMix64(seed ^ SplitMix64(ki * 1000003ULL + trial));
      jobs.push_back(std::async(std::launch::async, [=, &options]() {
        const FLConfig fl = MakeFLConfig(options.n, options.d, kappa,
                                         estimator, trial_seed, 1.0,
                                         options.target_eps);
        const FLResult r = RunFL(fl, options.max_rounds, trial_seed);
        const double cost =
            kind == SweepKind::kScaffnew
                ? static_cast<double>(r.ledger.communication_events)
                : static_cast<double>(r.ledger.uplink_floats);
        return std::make_pair(cost, r.reached_target);
      }));
    }
    double sum = 0.0, sum_sq = 0.0;
    for (auto& job : jobs) {
      const auto [cost, reached] = job.get();
      sum += cost;
      sum_sq += cost * cost;
      if (!reached) row.unfinished += 1;
    }
    const double t = static_cast<double>(trials);
    row.mean_cost = sum / t;
    row.std_cost =
        std::sqrt(std::max(0.0, (sum_sq - t * row.mean_cost * row.mean_cost) /
                                    (t - 1.0)));
    result.rows.push_back(row);
  }
  if (result.rows.size() >= 2) {
    std::vector<double> x, y;
    for (const SweepRow& r : result.rows) {
      x.push_back(r.kappa);
      y.push_back(std::max(r.mean_cost, 1e-300));
    }
    result.slope = LogLogSlope(x, y);
  }
  return result;
}

}  // namespace randprox
