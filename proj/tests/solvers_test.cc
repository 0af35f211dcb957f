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

#include <gtest/gtest.h>

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "randprox/catalog.h"
#include "randprox/solvers.h"
#include "support/harness.h"

namespace randprox {
namespace {

using testing::Bitwise;
using testing::Collect;
using testing::RelDiff;

PrimalDualProblem Make(QuadraticVariant v, int64_t dim,
                       const std::function<void(QuadraticProblemOptions*)>&
                           tweak = nullptr) {
  QuadraticProblemOptions o;
  o.variant = v;
  o.dim = dim;
  o.seed = 3;
  if (tweak) tweak(&o);
  return MakeQuadraticProblem(o);
}

class LatticeTest : public ::testing::TestWithParam<int> {
 protected:
  static const std::vector<testing::LatticeCheck>& Checks() {
    static const std::vector<testing::LatticeCheck> checks =
        testing::ReductionLattice(200, 5);
    return checks;
  }
};

TEST_P(LatticeTest, Equivalence) {
  ASSERT_EQ(Checks().size(), 8u);
  const testing::LatticeCheck& c = Checks()[GetParam()];
  EXPECT_TRUE(c.passed) << c.name << ": max relative difference "
                        << c.max_rel_diff
                        << (c.bitwise ? " (bitwise required)" : "");
}

INSTANTIATE_TEST_SUITE_P(ReductionLattice, LatticeTest, ::testing::Range(0, 8));

struct ConvergenceCase {
  std::string label;
  Algorithm alg;
  std::function<PrimalDualProblem()> problem;
  std::string estimator;
};

void PrintTo(const ConvergenceCase& c, std::ostream* os) {
  *os << c.label << " with " << c.estimator;
}

std::vector<ConvergenceCase> ConvergenceCases() {
  const auto lc = [] { return Make(QuadraticVariant::kLinearConstraint, 10); };
  return {
      {"pddy", Algorithm::kPddy, lc, "identity"},
      {"randprox", Algorithm::kRandProx, lc, "bernoulli:p=0.5"},
      {"randprox_rand_k", Algorithm::kRandProx, lc, "rand_k:k=2,d=5"},
      {"skip", Algorithm::kSkip, lc, "bernoulli:p=0.5"},
      {"lc", Algorithm::kLc, lc, "rand_k:k=3,d=5"},
      {"fb", Algorithm::kFb, [] { return Make(QuadraticVariant::kL1, 6); },
       "rand_k:k=2,d=6"},
      {"minibatch", Algorithm::kMinibatch,
       [] {
         return Make(QuadraticVariant::kProductSpace, 3,
                     [](QuadraticProblemOptions* o) { o->num_blocks = 5; });
       },
       "rand_k_blocks:k=2,n=5"},
      {"point_saga", Algorithm::kPointSaga,
       [] {
         return Make(QuadraticVariant::kFiniteSum, 3,
                     [](QuadraticProblemOptions* o) {
                       o->num_blocks = 4;
                       o->mu = 1.0;
                       o->shift_strong_convexity = true;
                     });
       },
       "identity"},
      {"cp", Algorithm::kCp,
       [] {
         return Make(QuadraticVariant::kComposite, 6,
                     [](QuadraticProblemOptions* o) {
                       o->zero_f = true;
                       o->g_weight = 1.0;
                       o->rows = 4;
                     });
       },
       "bernoulli:p=0.5"},
      {"admm", Algorithm::kAdmm,
       [] {
         return Make(QuadraticVariant::kComposite, 6,
                     [](QuadraticProblemOptions* o) {
                       o->zero_f = true;
                       o->identity_k = true;
                       o->g_weight = 1.0;
                     });
       },
       "rand_k:k=2,d=6"},
      {"dy", Algorithm::kDy,
       [] {
         return Make(QuadraticVariant::kComposite, 6,
                     [](QuadraticProblemOptions* o) {
                       o->identity_k = true;
                       o->g_weight = 0.5;
                     });
       },
       "rand_k:k=2,d=6"},
      {"prilico", Algorithm::kPriLiCo,
       [] {
         return MakeGramProblem(Make(QuadraticVariant::kLinearConstraint, 10));
       },
       "bernoulli:p=0.5"},
      {"fl", Algorithm::kFl,
       [] {
         return Make(QuadraticVariant::kConsensusFL, 3,
                     [](QuadraticProblemOptions* o) {
                       o->num_blocks = 4;
                       o->mu = 1.0;
                     });
       },
       "bernoulli:p=0.3"},
  };
}

class ConvergenceTest : public ::testing::TestWithParam<ConvergenceCase> {};

TEST_P(ConvergenceTest, ReachesKnownSolution) {
  const ConvergenceCase& c = GetParam();
  const PrimalDualProblem p = c.problem();
  SolverConfig cfg =
      MakeConfig(p, c.alg, RandomEstimator::Parse(c.estimator));
  cfg.seed = 11;
  cfg.record_trace = false;
  const Trace tr = randprox::Run(p, cfg, c.alg, {20000, 0.0});
  const Vector& x_star = p.known_solution->x_star;
  EXPECT_LE((tr.final_state.x - x_star).norm(), 1e-6 * (1.0 + x_star.norm()))
      << c.label;
  EXPECT_LE(tr.final_residual, 1e-6) << c.label;
}

INSTANTIATE_TEST_SUITE_P(
    Algorithms, ConvergenceTest, ::testing::ValuesIn(ConvergenceCases()),
    [](const ::testing::TestParamInfo<ConvergenceCase>& info) {
      return info.param.label;
    });

TEST(SolverTest, ChambollePockMatchesReference) {
  const PrimalDualProblem p = Make(
      QuadraticVariant::kComposite, 6, [](QuadraticProblemOptions* o) {
        o->zero_f = true;
        o->g_weight = 1.0;
        o->rows = 4;
      });
  const SolverConfig cfg =
      MakeConfig(p, Algorithm::kCp, RandomEstimator::Identity());
  const std::vector<SolverState> lib = Collect(p, cfg, Algorithm::kCp, 50);
  const std::vector<testing::PrimalDualPoint> ref =
      testing::ChambollePockReference(p, cfg.gamma, cfg.tau, 50);
  ASSERT_EQ(lib.size(), ref.size());
  for (size_t t = 0; t < lib.size(); ++t) {
    EXPECT_LE(RelDiff(lib[t].last_xhat, ref[t].x), 1e-12) << t;
    EXPECT_LE(RelDiff(lib[t].u, ref[t].u), 1e-12) << t;
  }
}

TEST(SolverTest, CachedAdjointMatchesDual) {
  const PrimalDualProblem p = Make(QuadraticVariant::kLinearConstraint, 10);
  SolverConfig cfg = MakeConfig(p, Algorithm::kRandProx,
                                RandomEstimator::Parse("rand_k:k=2,d=5"));
  for (const SolverState& s : Collect(p, cfg, Algorithm::kRandProx, 100)) {
    EXPECT_LE((s.v - p.K.Adjoint(s.u)).norm(), 1e-12 * (1.0 + s.v.norm()));
  }
}

TEST(SolverTest, SolutionIsFixedPointForEveryDraw) {
  for (const auto& [alg, est] :
       std::vector<std::pair<Algorithm, std::string>>{
           {Algorithm::kRandProx, "rand_k:k=2,d=5"},
           {Algorithm::kSkip, "bernoulli:p=0.3"},
           {Algorithm::kLc, "rand_k:k=1,d=5"}}) {
    const PrimalDualProblem p = Make(QuadraticVariant::kLinearConstraint, 10);
    const SolverConfig cfg = MakeConfig(p, alg, RandomEstimator::Parse(est));
    RunOptions ro;
    ro.x0 = p.known_solution->x_star;
    ro.u0 = p.known_solution->u_star;
    const Trace tr = randprox::Run(p, cfg, alg, {30, 0.0}, ro);
    EXPECT_LE((tr.final_state.x - *ro.x0).norm(), 1e-9) << AlgorithmName(alg);
    EXPECT_LE((tr.final_state.u - *ro.u0).norm(), 1e-9) << AlgorithmName(alg);
  }
}

TEST(SolverTest, FederatedDualsStayBalanced) {
  const PrimalDualProblem p = Make(
      QuadraticVariant::kConsensusFL, 3, [](QuadraticProblemOptions* o) {
        o->num_blocks = 4;
        o->mu = 1.0;
      });
  const BlockLayout l = *p.structure.primal_blocks;
  const SolverConfig cfg = MakeConfig(p, Algorithm::kFl,
                                      RandomEstimator::Parse("rand_k:k=1,d=3"));
  for (const SolverState& s : Collect(p, cfg, Algorithm::kFl, 100)) {
    Vector sum = Vector::Zero(l.block_dim);
    for (int64_t i = 0; i < l.num_blocks; ++i) sum += l.Block(s.u, i);
    EXPECT_LE(sum.norm(), 1e-12 * (1.0 + s.u.norm()));
  }
  RunOptions ro;
  ro.u0 = Vector::Ones(l.size());
  EXPECT_THROW(randprox::Run(p, cfg, Algorithm::kFl, {1, 0.0}, ro), UsageError);
}

// Nodes only ever send compressed vectors to the server.
TEST(SolverTest, FederatedUploadsAreCompressed) {
  const PrimalDualProblem p = Make(
      QuadraticVariant::kConsensusFL, 4, [](QuadraticProblemOptions* o) {
        o->num_blocks = 3;
        o->mu = 1.0;
      });
  const FederatedNodes nodes = NodesFromProblem(p);
  const RandomEstimator e = RandomEstimator::RandK(1, 4);
  SolverConfig cfg = MakeConfig(p, Algorithm::kFl, e);
  SolverState s = InitialState(p, cfg, Algorithm::kFl);
  for (int64_t t = 0; t < 20; ++t) {
    const EstimatorDraw draw = e.Draw(1, t);
    std::vector<Vector> seen;
    s = FlRound(nodes, cfg.gamma, e.omega(), s, draw,
                [&seen](const std::vector<Vector>& up) {
                  seen = up;
                  return ServerAggregate(up);
                });
    ASSERT_EQ(seen.size(), 3u);
    for (const Vector& v : seen) {
      int64_t nonzero = 0;
      for (int64_t j = 0; j < v.size(); ++j) nonzero += v[j] != 0.0;
      EXPECT_LE(nonzero, 1);
    }
  }
}

TEST(SolverTest, ProxCallsFollowCoins) {
  const PrimalDualProblem p = Make(QuadraticVariant::kLinearConstraint, 10);
  SolverConfig cfg =
      MakeConfig(p, Algorithm::kSkip, RandomEstimator::Bernoulli(0.3));
  cfg.seed = 4;
  const std::vector<SolverState> states =
      Collect(p, cfg, Algorithm::kSkip, 300);
  const SolverState& last = states.back();
  int64_t heads = 0;
  for (bool c : last.coin_history) heads += c;
  EXPECT_EQ(last.coin_history.size(), 300u);
  EXPECT_EQ(last.prox_h_calls, heads);
  EXPECT_GT(heads, 0);
  EXPECT_LT(heads, 300);
}

TEST(SolverTest, SameSeedSameTrajectory) {
  const PrimalDualProblem p = Make(QuadraticVariant::kLinearConstraint, 10);
  SolverConfig cfg = MakeConfig(p, Algorithm::kRandProx,
                                RandomEstimator::Parse("rand_k:k=2,d=5"));
  cfg.seed = 9;
  const auto a = Collect(p, cfg, Algorithm::kRandProx, 50);
  const auto b = Collect(p, cfg, Algorithm::kRandProx, 50);
  EXPECT_TRUE(Bitwise(a.back().x, b.back().x));
  cfg.seed = 10;
  const auto c = Collect(p, cfg, Algorithm::kRandProx, 50);
  EXPECT_FALSE(Bitwise(a.back().x, c.back().x));
}

TEST(SolverTest, ExplicitDefaultRelaxation) {
  const PrimalDualProblem p = Make(QuadraticVariant::kLinearConstraint, 10);
  SolverConfig cfg =
      MakeConfig(p, Algorithm::kRandProx, RandomEstimator::Bernoulli(0.25));
  const auto a = Collect(p, cfg, Algorithm::kRandProx, 100);
  cfg.relaxation = 0.25;  // 1 / (1 + omega)
  const auto b = Collect(p, cfg, Algorithm::kRandProx, 100);
  for (size_t t = 0; t < a.size(); ++t) {
    EXPECT_LE(RelDiff(a[t].x, b[t].x), 1e-12);
    EXPECT_LE(RelDiff(a[t].u, b[t].u), 1e-12);
  }
}

TEST(SolverTest, ClaimingTheTrueOmegaChangesNothing) {
  const PrimalDualProblem p = Make(QuadraticVariant::kLinearConstraint, 10);
  SolverConfig cfg =
      MakeConfig(p, Algorithm::kRandProx, RandomEstimator::Bernoulli(0.5));
  const auto a = Collect(p, cfg, Algorithm::kRandProx, 50);
  cfg.claimed_omega = 1.0;
  const auto b = Collect(p, cfg, Algorithm::kRandProx, 50);
  EXPECT_TRUE(Bitwise(a.back().x, b.back().x));
  EXPECT_TRUE(Bitwise(a.back().u, b.back().u));
}

TEST(SolverTest, ResidualToleranceStopsEarly) {
  const PrimalDualProblem p = Make(QuadraticVariant::kLinearConstraint, 10);
  const SolverConfig cfg =
      MakeConfig(p, Algorithm::kPddy, RandomEstimator::Identity());
  const Trace tr = randprox::Run(p, cfg, Algorithm::kPddy, {100000, 1e-6});
  EXPECT_LT(tr.final_state.t, 100000);
  EXPECT_LE(tr.final_residual, 1e-6);
  EXPECT_EQ(tr.rows.back().t, tr.final_state.t);
}

TEST(SolverTest, TraceRowsCoverEveryIteration) {
  const PrimalDualProblem p = Make(QuadraticVariant::kLinearConstraint, 10);
  const SolverConfig cfg =
      MakeConfig(p, Algorithm::kRandProx, RandomEstimator::Bernoulli(0.5));
  const Trace tr = randprox::Run(p, cfg, Algorithm::kRandProx, {40, 0.0});
  ASSERT_EQ(tr.rows.size(), 41u);
  for (size_t t = 0; t < tr.rows.size(); ++t) {
    EXPECT_EQ(tr.rows[t].t, static_cast<int64_t>(t));
    EXPECT_TRUE(tr.rows[t].psi.has_value());
  }
  EXPECT_EQ(tr.theorem, TheoremId::kT4);
}

TEST(SolverTest, ConfigurationErrors) {
  const PrimalDualProblem lc = Make(QuadraticVariant::kLinearConstraint, 10);
  SolverConfig cfg =
      MakeConfig(lc, Algorithm::kPddy, RandomEstimator::Bernoulli(0.5));
  EXPECT_THROW(randprox::Run(lc, cfg, Algorithm::kPddy, {1, 0.0}), UsageError);
  EXPECT_THROW(randprox::Run(lc, cfg, Algorithm::kFb, {1, 0.0}), UsageError);
  EXPECT_THROW(randprox::Run(lc, cfg, Algorithm::kPriLiCo, {1, 0.0}), UsageError);

  cfg = MakeConfig(lc, Algorithm::kRandProx, RandomEstimator::Bernoulli(0.5));
  SolverConfig bad = cfg;
  bad.gamma = 0.25;  // gamma L = 2.5
  EXPECT_THROW(randprox::Run(lc, bad, Algorithm::kRandProx, {1, 0.0}), ParameterError);
  bad = cfg;
  bad.tau *= 2.0;
  EXPECT_THROW(randprox::Run(lc, bad, Algorithm::kRandProx, {1, 0.0}), ParameterError);
  bad = cfg;
  bad.relaxation = 1.5;
  EXPECT_THROW(randprox::Run(lc, bad, Algorithm::kRandProx, {1, 0.0}), ParameterError);
  bad = cfg;
  bad.relaxation = 0.5;
  EXPECT_THROW(randprox::Run(lc, bad, Algorithm::kSkip, {1, 0.0}), UsageError);
  bad = cfg;
  bad.claimed_omega = -1.0;
  EXPECT_THROW(randprox::Run(lc, bad, Algorithm::kRandProx, {1, 0.0}), ParameterError);
  EXPECT_THROW(randprox::Run(lc, cfg, Algorithm::kRandProx, {-1, 0.0}), ParameterError);

  // rand_k over the wrong dimension.
  const SolverConfig wrong = MakeConfig(
      lc, Algorithm::kRandProx, RandomEstimator::Parse("rand_k:k=2,d=7"));
  EXPECT_THROW(randprox::Run(lc, wrong, Algorithm::kRandProx, {1, 0.0}), UsageError);
  EXPECT_THROW(ParseAlgorithm("newton"), ParameterError);
}

TEST(SolverTest, AlgorithmNamesRoundTrip) {
  for (Algorithm a : AllAlgorithms()) {
    EXPECT_EQ(ParseAlgorithm(AlgorithmName(a)), a);
  }
  EXPECT_EQ(AllAlgorithms().size(), 12u);
}

}  // namespace
}  // namespace randprox
