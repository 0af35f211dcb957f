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

#include "randprox/catalog.h"
#include "randprox/reference_oracle.h"
#include "randprox/solvers.h"
#include "support/harness.h"

namespace randprox {
namespace {

PrimalDualProblem Constraint(int64_t dim, int64_t rows = 0) {
  QuadraticProblemOptions o;
  o.variant = QuadraticVariant::kLinearConstraint;
  o.dim = dim;
  o.rows = rows;
  return MakeQuadraticProblem(o);
}

// The iterative oracle only sees the operators, never the model matrices.
TEST(OracleTest, KktAgreesWithLongRun) {
  PrimalDualProblem p = Constraint(10);
  const OracleSolution kkt = KktSolveQuadratic(p);
  EXPECT_EQ(kkt.method, OracleMethod::kKktSolve);
  EXPECT_THROW(LongDeterministicRun(p), UsageError);
  p.quadratic.reset();
  EXPECT_THROW(KktSolveQuadratic(p), OracleUnavailableError);
  const OracleSolution run = LongDeterministicRun(p, 200000);
  EXPECT_EQ(run.method, OracleMethod::kLongDeterministicRun);
  EXPECT_LE((run.x_star - kkt.x_star).norm(), 1e-7 * (1.0 + kkt.x_star.norm()));
  EXPECT_LE((p.K.ProjectOntoRange(run.u_star) - p.K.ProjectOntoRange(kkt.u_star))
                .norm(),
            1e-6 * (1.0 + kkt.u_star.norm()));
}

TEST(OracleTest, KktMatchesKnownSolutions) {
  for (QuadraticVariant v :
       {QuadraticVariant::kPlain, QuadraticVariant::kLinearConstraint,
        QuadraticVariant::kPersonalizedFL, QuadraticVariant::kConsensusFL,
        QuadraticVariant::kProductSpace, QuadraticVariant::kFiniteSum,
        QuadraticVariant::kComposite}) {
    QuadraticProblemOptions o;
    o.variant = v;
    o.dim = 6;
    o.g_weight = 0.5;
    const PrimalDualProblem p = MakeQuadraticProblem(o);
    const OracleSolution s = KktSolveQuadratic(p);
    EXPECT_LE(CheckOptimalityResidual(p, s.x_star, s.u_star),
              kKnownSolutionTolerance)
        << VariantName(v);
  }
}

TEST(OracleTest, EnumerationIsLimited) {
  EXPECT_THROW(KktSolveQuadratic(MakeQuadraticProblem(
                   12, 0.5, 2.0, 1, QuadraticVariant::kL1)),
               OracleUnavailableError);
  EXPECT_NO_THROW(KktSolveQuadratic(
      MakeQuadraticProblem(10, 0.5, 2.0, 1, QuadraticVariant::kL1)));
}

TEST(OracleTest, FiniteDiffStepRange) {
  const SmoothOracle f = LogSumExpOracle(3);
  EXPECT_THROW(FiniteDiffCheck(f, Vector::Zero(3), 1e-9), ParameterError);
  EXPECT_THROW(FiniteDiffCheck(f, Vector::Zero(3), 1e-2), ParameterError);
  SmoothOracle no_value = f;
  no_value.value = nullptr;
  EXPECT_THROW(FiniteDiffCheck(no_value, Vector::Zero(3), 1e-5), UsageError);
}

TEST(OracleTest, ProbeNeedsEnoughDraws) {
  const PrimalDualProblem p = Constraint(6);
  const SolverConfig cfg =
      MakeConfig(p, Algorithm::kRandProx, RandomEstimator::Bernoulli(0.5));
  const SolverState s = InitialState(p, cfg, Algorithm::kRandProx);
  EXPECT_THROW(ConditionalContractionProbe(p, cfg, Algorithm::kRandProx, s,
                                           9999, TheoremId::kT4, 1),
               ParameterError);
}

TEST(OracleTest, ProbeAgreesWithExactExpectation) {
  const PrimalDualProblem p = Constraint(10, 5);
  for (const char* spec : {"bernoulli:p=0.3", "rand_k:k=2,d=5"}) {
    SolverConfig cfg =
        MakeConfig(p, Algorithm::kRandProx, RandomEstimator::Parse(spec));
    cfg.seed = 2;
    const SolverState s =
        testing::Collect(p, cfg, Algorithm::kRandProx, 20).back();
    const ContractionProbe probe = ConditionalContractionProbe(
        p, cfg, Algorithm::kRandProx, s, 20000, TheoremId::kT4, 8);
    const double exact =
        ExactNextPsiExpectation(p, cfg, Algorithm::kRandProx, s, TheoremId::kT4);
    EXPECT_NEAR(probe.mean_psi_next, exact, 4.0 * probe.std_error + 1e-12 * exact)
        << spec;
    EXPECT_LE(exact, probe.bound * (1.0 + 1e-12)) << spec;
    EXPECT_TRUE(probe.Passes()) << spec;
  }
}

TEST(OracleTest, OracleMethodNames) {
  EXPECT_STREQ(OracleMethodName(OracleMethod::kKktSolve), "kkt-solve");
  EXPECT_STREQ(OracleMethodName(OracleMethod::kDenseEnumeration),
               "dense-enumeration");
  EXPECT_STREQ(OracleMethodName(OracleMethod::kLongDeterministicRun),
               "long-deterministic-run");
}

}  // namespace
}  // namespace randprox
