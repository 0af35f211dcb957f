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

#include <cmath>

#include <Eigen/Dense>

#include "randprox/catalog.h"
#include "randprox/reference_oracle.h"
#include "randprox/rng.h"

namespace randprox {
namespace {

TEST(ProxTest, SoftThresholding) {
  Vector x(4);
  x << 3.0, -0.5, 1.0, -2.5;
  Vector expected(4);
  expected << 2.0, 0.0, 0.0, -1.5;
  EXPECT_EQ(ProxL1(x, 1.0), expected);
}

TEST(ProxTest, PointIndicatorIgnoresStep) {
  Vector b(2);
  b << 1.0, -1.0;
  EXPECT_EQ(ProxIndicatorPoint(Vector::Zero(2), b), b);
  const CatalogEntry e = PointIndicatorEntry(b);
  EXPECT_EQ(e.prox.Prox(Vector::Ones(2), 10.0), b);
  // h* = <b, .>, so prox_{g h*}(x) = x - g b.
  EXPECT_TRUE(e.conjugate_prox.Prox(Vector::Ones(2), 2.0)
                  .isApprox(Vector::Ones(2) - 2.0 * b));
}

TEST(ProxTest, SquaredNormClosedForm) {
  Rng rng(1);
  const Vector c = rng.NormalVector(3), x = rng.NormalVector(3);
  const double gamma = 0.7, lambda = 2.0;
  // Stationarity: (p - x)/gamma + lambda (p - c) = 0.
  const Vector p = ProxSqNorm(x, gamma, lambda, c);
  EXPECT_LE(((p - x) / gamma + lambda * (p - c)).norm(), 1e-12);
}

TEST(ProxTest, ConsensusIsBlockMean) {
  const BlockLayout l{3, 2};
  Vector x(6);
  x << 1, 2, 3, 4, 5, 6;
  Vector expected(6);
  expected << 3, 4, 3, 4, 3, 4;
  EXPECT_TRUE(ProxConsensus(x, l).isApprox(expected));
}

// Moreau identity for every entry, random steps over four decades.
TEST(CatalogTest, MoreauIdentity) {
  Rng rng(2);
  for (int64_t dim : {1, 4, 7}) {
    for (const CatalogEntry& e : AllCatalogEntries(dim, 3)) {
      for (int i = 0; i < 100; ++i) {
        const double gamma = std::pow(10.0, 4.0 * rng.Uniform() - 2.0);
        const Vector x = 3.0 * rng.NormalVector(dim);
        const Vector diff = e.conjugate_prox.Prox(x, gamma) -
                            MoreauConjugateProx(e.prox, gamma, x);
        EXPECT_LE(diff.lpNorm<Eigen::Infinity>(), 1e-10)
            << e.name << " dim " << dim << " gamma " << gamma;
      }
    }
  }
}

// Proximity operators are firmly nonexpansive.
TEST(CatalogTest, FirmNonexpansiveness) {
  Rng rng(4);
  for (const CatalogEntry& e : AllCatalogEntries(6, 5)) {
    for (const ProxOracle* op : {&e.prox, &e.conjugate_prox}) {
      for (int i = 0; i < 50; ++i) {
        const double gamma = std::pow(10.0, 2.0 * rng.Uniform() - 1.0);
        const Vector x = rng.NormalVector(6), y = rng.NormalVector(6);
        const Vector px = op->Prox(x, gamma), py = op->Prox(y, gamma);
        EXPECT_LE((px - py).squaredNorm(),
                  (px - py).dot(x - y) + 1e-12 * (1.0 + (x - y).squaredNorm()))
            << e.name;
      }
    }
  }
}

TEST(CatalogTest, BlockProxAgreesWithFullProx) {
  Rng rng(6);
  for (const CatalogEntry& e : AllCatalogEntries(6, 7)) {
    if (!e.prox.block_prox) continue;
    const BlockLayout l = *e.prox.layout;
    const Vector x = rng.NormalVector(6);
    const Vector full = e.prox.Prox(x, 0.3);
    for (int64_t i = 0; i < l.num_blocks; ++i) {
      EXPECT_TRUE(e.prox.BlockProx(i, l.Block(x, i), 0.3)
                      .isApprox(l.Block(full, i), 1e-14))
          << e.name;
    }
  }
}

TEST(CatalogTest, ConjugateModuli) {
  // (lambda/2)|.|^2 has conjugate modulus 1/lambda.
  const CatalogEntry sq = SquaredNormEntry(2.5, Vector::Zero(3));
  EXPECT_DOUBLE_EQ(sq.conjugate_prox.mu, 1.0 / 2.5);
  EXPECT_DOUBLE_EQ(sq.mu, 2.5);
  EXPECT_DOUBLE_EQ(L1Entry(1.0).conjugate_prox.mu, 0.0);
}

TEST(CatalogTest, RandomSpdMatrixSpectrum) {
  const Matrix a = RandomSpdMatrix(9, 0.3, 7.0, 12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  EXPECT_NEAR(es.eigenvalues().minCoeff(), 0.3, 1e-10);
  EXPECT_NEAR(es.eigenvalues().maxCoeff(), 7.0, 1e-10);
  EXPECT_TRUE(a.isApprox(a.transpose()));
}

TEST(CatalogTest, GradientsMatchFiniteDifferences) {
  const SmoothOracle q =
      QuadraticOracle(RandomSpdMatrix(5, 1.0, 3.0, 1), Vector::Ones(5));
  const SmoothOracle lse = LogSumExpOracle(5);
  Rng rng(8);
  for (int i = 0; i < 5; ++i) {
    const Vector x = rng.NormalVector(5);
    EXPECT_LE(FiniteDiffCheck(q, x, 1e-5), 1e-7);
    EXPECT_LE(FiniteDiffCheck(lse, x, 1e-5), 1e-7);
  }
  EXPECT_DOUBLE_EQ(lse.L, 1.0);
  EXPECT_DOUBLE_EQ(lse.mu, 0.0);
}

TEST(CatalogTest, VariantNamesRoundTrip) {
  for (QuadraticVariant v :
       {QuadraticVariant::kPlain, QuadraticVariant::kL1,
        QuadraticVariant::kLinearConstraint,
        QuadraticVariant::kLinearConstraintDeficient,
        QuadraticVariant::kPersonalizedFL, QuadraticVariant::kConsensusFL,
        QuadraticVariant::kProductSpace, QuadraticVariant::kFiniteSum,
        QuadraticVariant::kComposite,
        QuadraticVariant::kLeastSquaresConstrained}) {
    EXPECT_EQ(ParseVariant(VariantName(v)), v);
  }
  EXPECT_THROW(ParseVariant("nope"), ParameterError);
}

TEST(CatalogTest, GeneratorArgumentErrors) {
  EXPECT_THROW(MakeQuadraticProblem(4, 0.0, 1.0, 1, QuadraticVariant::kPlain),
               ParameterError);
  EXPECT_THROW(MakeQuadraticProblem(4, 2.0, 1.0, 1, QuadraticVariant::kPlain),
               ParameterError);
  QuadraticProblemOptions o;
  o.variant = QuadraticVariant::kComposite;
  o.zero_f = true;
  EXPECT_THROW(MakeQuadraticProblem(o), ParameterError);
}

TEST(CatalogTest, L1SolutionMatchesEnumeration) {
  const PrimalDualProblem p =
      MakeQuadraticProblem(8, 0.5, 5.0, 3, QuadraticVariant::kL1);
  const OracleSolution s = KktSolveQuadratic(p);
  EXPECT_EQ(s.method, OracleMethod::kDenseEnumeration);
  EXPECT_LE((s.x_star - p.known_solution->x_star).norm(), 1e-9);
  EXPECT_LE((s.u_star - p.known_solution->u_star).norm(), 1e-9);
}

TEST(CatalogTest, GramProblemKeepsFeasibleSetAndSolution) {
  QuadraticProblemOptions o;
  o.variant = QuadraticVariant::kLinearConstraint;
  o.dim = 10;
  const PrimalDualProblem lc = MakeQuadraticProblem(o);
  const PrimalDualProblem gp = MakeGramProblem(lc);
  ASSERT_TRUE(gp.gram);
  const Matrix& k = lc.quadratic->k_matrix;
  EXPECT_TRUE(gp.gram->w.isApprox(k.transpose() * k, 1e-12));
  EXPECT_TRUE(gp.gram->a.isApprox(k.transpose() * *lc.structure.h_point));
  EXPECT_LE((gp.known_solution->x_star - lc.known_solution->x_star).norm(),
            1e-8);
  // x* is feasible for W x = a.
  EXPECT_LE((gp.gram->w * gp.known_solution->x_star - gp.gram->a).norm(), 1e-8);
  EXPECT_THROW(MakeGramProblem(MakeQuadraticProblem(
                   4, 0.5, 2.0, 1, QuadraticVariant::kPlain)),
               UsageError);
}

}  // namespace
}  // namespace randprox
