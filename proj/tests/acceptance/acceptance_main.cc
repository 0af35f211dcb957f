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

// Acceptance suite: one PASS/FAIL line per criterion. Seeds are fixed here
// once and never tuned to the outcome.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "randprox/catalog.h"
#include "randprox/estimators.h"
#include "randprox/experiments.h"
#include "randprox/flsim.h"
#include "randprox/rates.h"
#include "randprox/reference_oracle.h"
#include "randprox/rng.h"
#include "randprox/solvers.h"
#include "support/harness.h"

namespace randprox {
namespace {

constexpr uint64_t kSeed = 1;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

PrimalDualProblem Problem(QuadraticVariant v, int64_t dim, double mu, double L,
                          const std::function<void(QuadraticProblemOptions*)>&
                              tweak = nullptr) {
  QuadraticProblemOptions o;
  o.variant = v;
  o.dim = dim;
  o.mu = mu;
  o.L = L;
  o.seed = kSeed;
  if (tweak) tweak(&o);
  return MakeQuadraticProblem(o);
}

// 1. Deterministic linear convergence of PDDY on a constrained QP.
Outcome Criterion1() {
  const PrimalDualProblem p =
      Problem(QuadraticVariant::kLinearConstraint, 20, 0.1, 10.0);
  const SolverConfig cfg =
      MakeConfig(p, Algorithm::kPddy, RandomEstimator::Identity());
  CertifyOptions co;
  co.iterations = 2000;
  co.trials = 1;
  co.probe_states = 0;
  const CertifyReport r = Certify(p, cfg, Algorithm::kPddy, TheoremId::kT4, co);
  SolverConfig run_cfg = cfg;
  run_cfg.record_trace = false;
  const Trace trace = Run(p, run_cfg, Algorithm::kPddy, {2000, 0.0});
  Outcome o;
  o.passed = r.trajectory_passed && trace.final_residual < 1e-8;
  o.detail = "c=" + Fmt(r.rate.c) + " worst margin " + Fmt(r.worst_margin) +
             " at t=" + std::to_string(r.worst_t) + ", final residual " +
             Fmt(trace.final_residual);
  return o;
}

// 2. Minibatch contraction in trial mean, and k = n equals PDDY bitwise.
Outcome Criterion2() {
  const PrimalDualProblem p = Problem(
      QuadraticVariant::kProductSpace, 5, 0.1, 10.0,
      [](QuadraticProblemOptions* o) { o->num_blocks = 10; });
  Outcome o;
  o.passed = true;
  for (int64_t k : {1, 3, 10}) {
    SolverConfig cfg = MakeConfig(p, Algorithm::kMinibatch,
                                  RandomEstimator::RandKBlocks(k, 10));
    CertifyOptions co;
    co.iterations = 500;
    co.trials = 200;
    co.seed = kSeed;
    co.probe_states = 0;
    const CertifyReport r =
        Certify(p, cfg, Algorithm::kMinibatch, TheoremId::kT5, co);
    o.passed = o.passed && r.trajectory_passed;
    o.detail += "k=" + std::to_string(k) + " c=" + Fmt(r.rate.c) +
                " margin " + Fmt(r.worst_margin) + "; ";
    if (k == 10) {
      cfg.seed = kSeed;
      SolverConfig pddy =
          MakeConfig(p, Algorithm::kPddy, RandomEstimator::Identity(),
                     std::nullopt, cfg.tau);
      const auto a = testing::Collect(p, cfg, Algorithm::kMinibatch, 500);
      const auto b = testing::Collect(p, pddy, Algorithm::kPddy, 500);
      bool same = a.size() == b.size();
      for (size_t t = 0; same && t < a.size(); ++t) {
        same = testing::Bitwise(a[t].x, b[t].x) &&
               testing::Bitwise(a[t].u, b[t].u);
      }
      o.passed = o.passed && same;
      o.detail += std::string("k=10 vs pddy ") +
                  (same ? "bitwise equal" : "DIFFERENT");
    }
  }
  return o;
}

// 3. Conditional contraction at frozen states, and the exact two-outcome
// expectation in dimension one.
Outcome Criterion3() {
  Outcome o;
  o.passed = true;
  const PrimalDualProblem lc = Problem(
      QuadraticVariant::kLinearConstraint, 20, 0.1, 10.0,
      [](QuadraticProblemOptions* q) { q->rows = 10; });
  const PrimalDualProblem comp = Problem(
      QuadraticVariant::kComposite, 20, 0.1, 10.0,
      [](QuadraticProblemOptions* q) { q->rows = 10; });
  int probes = 0;
  double worst = -1e300;  // max of (mean - bound) / (3 se + tiny)
  for (const PrimalDualProblem* p : {&lc, &comp}) {
    for (const char* spec : {"bernoulli:p=0.3", "rand_k:k=3,d=10"}) {
      SolverConfig cfg = MakeConfig(*p, Algorithm::kRandProx,
                                    RandomEstimator::Parse(spec));
      cfg.seed = kSeed + 17;
      const TheoremId th = MatchingTheorem(Algorithm::kRandProx, *p);
      const auto traj = testing::Collect(*p, cfg, Algorithm::kRandProx, 100);
      for (int64_t t : {0, 10, 30, 60, 100}) {
        const ContractionProbe pr = ConditionalContractionProbe(
            *p, cfg, Algorithm::kRandProx, traj[t], 10000, th,
            TrialSeed(kSeed, t));
        ++probes;
        o.passed = o.passed && pr.Passes(3.0);
        worst = std::max(worst, (pr.mean_psi_next - pr.bound) /
                                    (3.0 * pr.std_error + 1e-300));
      }
    }
  }
  const PrimalDualProblem one = Problem(
      QuadraticVariant::kComposite, 1, 1.0, 4.0,
      [](QuadraticProblemOptions* q) { q->identity_k = true; });
  SolverConfig cfg = MakeConfig(one, Algorithm::kRandProx,
                                RandomEstimator::Bernoulli(0.3));
  SolverState s = InitialState(one, cfg, Algorithm::kRandProx,
                               Vector::Constant(1, 1.3),
                               Vector::Constant(1, -0.7));
  const TheoremId th = MatchingTheorem(Algorithm::kRandProx, one);
  const ContractionProbe mc = ConditionalContractionProbe(
      one, cfg, Algorithm::kRandProx, s, 10000, th, kSeed);
  const double exact =
      ExactNextPsiExpectation(one, cfg, Algorithm::kRandProx, s, th);
  const bool exact_ok = std::abs(mc.mean_psi_next - exact) <= 3.0 * mc.std_error;
  o.passed = o.passed && exact_ok && exact <= mc.bound * (1.0 + 1e-12);
  o.detail = std::to_string(probes) + " probes, worst (mean - c psi)/3se = " +
             Fmt(worst) + "; 1-D: MC " + Fmt(mc.mean_psi_next) + " vs exact " +
             Fmt(exact) + " (se " + Fmt(mc.std_error) + "), c psi " +
             Fmt(mc.bound);
  return o;
}

// 4. Estimator constants of rand_k_blocks(3, 10).
Outcome Criterion4() {
  const int64_t n = 10, k = 3, d = 2;
  const RandomEstimator e = RandomEstimator::RandKBlocks(k, n);
  const LinearMap K = LinearMap::Stacking(d, n);
  Rng rng(kSeed, 4);
  const Vector r = rng.NormalVector(n * d);
  const EstimatorStats s = EmpiricalEstimatorStats(e, r, K, 100000, kSeed);
  const double omega = 7.0 / 3.0, omega_ran = 70.0 / 27.0;
  const bool omega_ok = s.variance_ratio <= omega + 3.0 * s.variance_ratio_se;
  const bool ran_ok = s.omega_ran_hat <= omega_ran + 3.0 * s.omega_ran_hat_se;
  const bool slack_ok = s.range_slack >= -3.0 * s.range_slack_se;
  double identity_err = 0.0;
  for (int64_t kk = 1; kk <= n; ++kk) {
    const EstimatorParams ep = RandomEstimator::RandKBlocks(kk, n).Params(K);
    identity_err = std::max(
        identity_err,
        std::abs((1.0 - ep.zeta) * K.norm_sq() + ep.omega_ran - n));
  }
  const EstimatorParams ep = e.Params(K);
  const bool declared_ok = std::abs(ep.omega - omega) <= 1e-12 &&
                           std::abs(ep.omega_ran - omega_ran) <= 1e-12;
  Outcome o;
  o.passed = omega_ok && ran_ok && slack_ok && identity_err <= 1e-12 &&
             declared_ok;
  o.detail = "omega_hat " + Fmt(s.variance_ratio) + " (se " +
             Fmt(s.variance_ratio_se) + ") vs 7/3, omega_ran_hat " +
             Fmt(s.omega_ran_hat) + " (se " + Fmt(s.omega_ran_hat_se) +
             ") vs 70/27, range slack " + Fmt(s.range_slack) + " (se " +
             Fmt(s.range_slack_se) + "), identity error " + Fmt(identity_err);
  return o;
}

// 5. Reduction lattice over 100 coupled steps.
Outcome Criterion5() {
  Outcome o;
  o.passed = true;
  int ok = 0;
  for (const testing::LatticeCheck& c : testing::ReductionLattice(100, kSeed)) {
    o.passed = o.passed && c.passed;
    if (c.passed) {
      ++ok;
    } else {
      o.detail += "failed: " + c.name + " (" + Fmt(c.max_rel_diff) + "); ";
    }
  }
  o.detail += std::to_string(ok) + "/8 equivalences hold";
  o.passed = o.passed && ok == 8;
  return o;
}

// 6. Contraction of the gradient step.
Outcome Criterion6() {
  const double mu = 1.0, L = 10.0;
  const Matrix a = RandomSpdMatrix(10, mu, L, kSeed);
  const SmoothOracle f = QuadraticOracle(a, Vector::Zero(10));
  Rng rng(kSeed, 6);
  Outcome o;
  o.passed = true;
  double worst = -1e300;
  for (double gamma : {0.05, 2.0 / (L + mu), 0.19}) {
    const double bound = GdContraction(gamma, mu, L);
    for (int i = 0; i < 1000; ++i) {
      const Vector x = rng.NormalVector(10), y = rng.NormalVector(10);
      const double ratio =
          ((x - gamma * f.grad(x)) - (y - gamma * f.grad(y))).norm() /
          (x - y).norm();
      worst = std::max(worst, ratio - bound);
      if (ratio > bound + 1e-12) o.passed = false;
    }
  }
  o.detail = "max ratio - bound = " + Fmt(worst) + " over 3000 pairs";
  return o;
}

// 7. Moreau identity for every catalog entry.
Outcome Criterion7() {
  Rng rng(kSeed, 7);
  double worst = 0.0;
  int entries = 0;
  for (const CatalogEntry& e : AllCatalogEntries(6, kSeed)) {
    ++entries;
    for (int i = 0; i < 100; ++i) {
      const double gamma = std::pow(10.0, 4.0 * rng.Uniform() - 2.0);
      const Vector x = 3.0 * rng.NormalVector(6);
      const Vector closed = e.conjugate_prox.Prox(x, gamma);
      const Vector moreau = MoreauConjugateProx(e.prox, gamma, x);
      worst = std::max(worst, (closed - moreau).lpNorm<Eigen::Infinity>());
    }
  }
  Outcome o;
  o.passed = worst <= 1e-10;
  o.detail = std::to_string(entries) + " entries, max deviation " + Fmt(worst);
  return o;
}

// 8. Ergodic rate without strong convexity.
Outcome Criterion8() {
  const PrimalDualProblem p =
      Problem(QuadraticVariant::kLeastSquaresConstrained, 20, 0.1, 10.0);
  const SolverConfig cfg =
      MakeConfig(p, Algorithm::kPddy, RandomEstimator::Identity());
  const ConvexBenchReport r =
      ConvexBench(p, cfg, Algorithm::kPddy, 10000, 1, kSeed);
  Outcome o;
  o.passed = r.bound_holds && r.final_bregman < 1e-10 && r.cocoercivity_holds;
  o.detail = std::string("bound ") + (r.bound_holds ? "holds" : "VIOLATED") +
             " at all t, final D_f " + Fmt(r.final_bregman) +
             ", cocoercivity " + (r.cocoercivity_holds ? "holds" : "VIOLATED");
  return o;
}

std::string SweepDetail(const SweepResult& r) {
  std::string s;
  for (const SweepRow& row : r.rows) {
    s += "kappa " + Fmt(row.kappa) + ": " + Fmt(row.mean_cost);
    if (row.unfinished) s += " (" + std::to_string(row.unfinished) + " capped)";
    s += "; ";
  }
  return s + "slope " + Fmt(r.slope);
}

const std::vector<double> kKappas = {16, 64, 256, 1024};

// 9. Scaffnew communication rounds against kappa.
Outcome Criterion9() {
  const SweepResult r = KappaSweep(SweepKind::kScaffnew, kKappas, 10, kSeed);
  Outcome o;
  bool capped = false;
  for (const SweepRow& row : r.rows) capped = capped || row.unfinished > 0;
  o.passed = !capped && r.slope >= 0.35 && r.slope <= 0.65;
  o.detail = SweepDetail(r);
  return o;
}

// 10. Rand-k uplink floats against kappa, and k n floats per round.
Outcome Criterion10() {
  const SweepResult r = KappaSweep(SweepKind::kRandK, kKappas, 10, kSeed);
  bool capped = false;
  for (const SweepRow& row : r.rows) capped = capped || row.unfinished > 0;
  bool per_round = true;
  const SweepOptions so;
  for (double kappa : kKappas) {
    const int64_t k = static_cast<int64_t>(
        ComplexitySummary(ComplexityKind::kRandK, kappa, 0.0, so.d).parameter);
    const FLConfig fl = MakeFLConfig(
        so.n, so.d, kappa, RandomEstimator::RandK(k, so.d), kSeed);
    const FLResult res = RunFL(fl, 100000, kSeed);
    per_round = per_round && res.ledger.communication_events > 0 &&
                res.ledger.uplink_floats ==
                    res.ledger.communication_events * k * so.n;
  }
  Outcome o;
  o.passed = !capped && per_round && r.slope >= 0.35 && r.slope <= 0.65;
  o.detail = SweepDetail(r) + "; uplink per round = k n: " +
             (per_round ? "yes" : "NO");
  return o;
}

// 11. Sharper forward-backward rate from the smoothness of h.
Outcome Criterion11() {
  const double lambda = 2.0, gamma = 0.1, p_coin = 0.2;
  const PrimalDualProblem p = Problem(
      QuadraticVariant::kPersonalizedFL, 4, 1.0, 10.0,
      [&](QuadraticProblemOptions* q) {
        q->num_blocks = 5;
        q->penalty = lambda;
      });
  const SolverConfig cfg =
      MakeConfig(p, Algorithm::kFb, RandomEstimator::Bernoulli(p_coin), gamma);
  const double omega = 1.0 / p_coin - 1.0;
  const RateReport sharp = RateThm3(p, cfg);
  const double blunt = 1.0 - 1.0 / ((1.0 + omega) * (1.0 + omega));
  CertifyOptions co;
  co.iterations = 300;
  co.trials = 200;
  co.seed = kSeed;
  const CertifyReport r = Certify(p, cfg, Algorithm::kFb, TheoremId::kT3, co);
  Outcome o;
  o.passed = p.mu_hc() == 1.0 / lambda && sharp.c < blunt && r.passed;
  o.detail = "c(mu_h* = 1/lambda) = " + Fmt(sharp.c) + " < " + Fmt(blunt) +
             " = c(mu_h* = 0); certification margin " + Fmt(r.worst_margin) +
             ", probes " + (r.probes_passed ? "pass" : "FAIL");
  return o;
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;  // 0 means no runtime requirement
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace randprox

int main() {
  using randprox::Criterion;
  const std::vector<Criterion> criteria = {
      {1, "deterministic linear convergence", 1.0, randprox::Criterion1},
      {2, "minibatch stochastic contraction", 30.0, randprox::Criterion2},
      {3, "conditional contraction probes", 0.0, randprox::Criterion3},
      {4, "estimator constants", 10.0, randprox::Criterion4},
      {5, "reduction lattice", 5.0, randprox::Criterion5},
      {6, "gradient step contraction", 0.0, randprox::Criterion6},
      {7, "Moreau identity", 0.0, randprox::Criterion7},
      {8, "ergodic convex rate", 5.0, randprox::Criterion8},
      {9, "Scaffnew communication scaling", 120.0, randprox::Criterion9},
      {10, "rand-k float complexity", 120.0, randprox::Criterion10},
      {11, "sharper personalized FL rate", 0.0, randprox::Criterion11},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    randprox::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    const bool in_time = c.budget_s == 0.0 || secs < c.budget_s;
    const bool ok = o.passed && in_time;
    if (!ok) ++failed;
    std::printf("criterion %d: %s  %s: %s [%.2f s%s]\n", c.id,
                ok ? "PASS" : "FAIL", c.title, o.detail.c_str(), secs,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
