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

#include <Eigen/Dense>

#include "randprox/catalog.h"
#include "randprox/problem.h"
#include "randprox/rng.h"

namespace randprox {
namespace {

Matrix RandomMatrix(int64_t rows, int64_t cols, uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (int64_t j = 0; j < cols; ++j) m.col(j) = rng.NormalVector(rows);
  return m;
}

TEST(LinearMapTest, AdjointPairing) {
  Rng rng(3);
  const std::vector<LinearMap> maps = {
      LinearMap::Identity(6), LinearMap::FromMatrix(RandomMatrix(4, 6, 1)),
      LinearMap::Stacking(3, 2)};
  for (const LinearMap& k : maps) {
    for (int i = 0; i < 20; ++i) {
      const Vector x = rng.NormalVector(k.in_dim());
      const Vector u = rng.NormalVector(k.out_dim());
      EXPECT_NEAR(k.Apply(x).dot(u), x.dot(k.Adjoint(u)),
                  1e-12 * (1.0 + x.norm() * u.norm()));
    }
  }
}

TEST(LinearMapTest, StackingConstants) {
  const LinearMap k = LinearMap::Stacking(3, 5);
  EXPECT_EQ(k.in_dim(), 3);
  EXPECT_EQ(k.out_dim(), 15);
  EXPECT_DOUBLE_EQ(k.norm_sq(), 5.0);
  Vector x(3);
  x << 1, -2, 0.5;
  const Vector kx = k.Apply(x);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(kx.segment(3 * i, 3), x);
  EXPECT_TRUE(k.Adjoint(kx).isApprox(5.0 * x));
}

TEST(LinearMapTest, MatrixNormMatchesSingularValues) {
  const Matrix m = RandomMatrix(5, 8, 9);
  const LinearMap k = LinearMap::FromMatrix(m);
  Eigen::JacobiSVD<Matrix> svd(m);
  const double s_max = svd.singularValues()(0);
  const double s_min = svd.singularValues()(4);
  EXPECT_NEAR(k.norm_sq(), s_max * s_max, 1e-10);
  EXPECT_NEAR(k.lambda_min(), s_min * s_min, 1e-10);
  EXPECT_FALSE(k.norm_is_estimated());
}

TEST(LinearMapTest, PowerIterationNeverExceedsNorm) {
  const LinearMap k = LinearMap::FromMatrix(RandomMatrix(6, 6, 4));
  for (int iters : {1, 5, 50, 500}) {
    const double est = EstimateNormSq(k, iters, 11);
    EXPECT_LE(est, k.norm_sq() * (1.0 + 1e-12));
  }
  EXPECT_NEAR(EstimateNormSq(k, 2000, 11), k.norm_sq(), 1e-6 * k.norm_sq());
}

TEST(LinearMapTest, RangeProjectorIsOrthogonal) {
  // Rank-deficient: 6 x 4 has a range of dimension at most 4 in R^6.
  const LinearMap k = LinearMap::FromMatrix(RandomMatrix(6, 4, 2));
  ASSERT_TRUE(k.has_range_projector());
  Rng rng(5);
  const Vector u = rng.NormalVector(6);
  const Vector pu = k.ProjectOntoRange(u);
  EXPECT_TRUE(k.ProjectOntoRange(pu).isApprox(pu, 1e-10));
  // The residual is orthogonal to the range.
  for (int j = 0; j < 4; ++j) {
    Vector e = Vector::Zero(4);
    e[j] = 1.0;
    EXPECT_NEAR((u - pu).dot(k.Apply(e)), 0.0, 1e-10);
  }
}

TEST(LinearMapTest, ShapeErrors) {
  const LinearMap k = LinearMap::Identity(3);
  EXPECT_THROW(k.Apply(Vector::Zero(4)), ShapeError);
  EXPECT_THROW(k.Adjoint(Vector::Zero(2)), ShapeError);
  EXPECT_THROW(EstimateNormSq(k, 0, 1), ParameterError);
}

TEST(ProblemTest, KnownSolutionsHaveZeroResidual) {
  for (QuadraticVariant v :
       {QuadraticVariant::kPlain, QuadraticVariant::kL1,
        QuadraticVariant::kLinearConstraint,
        QuadraticVariant::kLinearConstraintDeficient,
        QuadraticVariant::kPersonalizedFL, QuadraticVariant::kConsensusFL,
        QuadraticVariant::kProductSpace, QuadraticVariant::kFiniteSum,
        QuadraticVariant::kComposite,
        QuadraticVariant::kLeastSquaresConstrained}) {
    QuadraticProblemOptions o;
    o.variant = v;
    o.dim = 8;
    o.g_weight = v == QuadraticVariant::kComposite ? 0.5 : 0.0;
    const PrimalDualProblem p = MakeQuadraticProblem(o);
    ASSERT_TRUE(p.known_solution) << VariantName(v);
    EXPECT_LE(CheckOptimalityResidual(p, p.known_solution->x_star,
                                      p.known_solution->u_star),
              kKnownSolutionTolerance)
        << VariantName(v);
  }
}

TEST(ProblemTest, ValidateKnownSolutionRejectsWrongSolution) {
  PrimalDualProblem p = MakeQuadraticProblem(6, 0.5, 5.0, 2,
                                             QuadraticVariant::kPlain);
  EXPECT_NO_THROW(ValidateKnownSolution(p));
  p.known_solution->x_star[0] += 1e-3;
  EXPECT_THROW(ValidateKnownSolution(p), ProblemConstructionError);
}

TEST(ProblemTest, PlainSolutionSolvesNormalEquations) {
  const PrimalDualProblem p =
      MakeQuadraticProblem(7, 0.2, 4.0, 8, QuadraticVariant::kPlain);
  const Matrix& a = p.quadratic->hessian;
  const Vector x = a.llt().solve(p.quadratic->linear);
  EXPECT_LE((x - p.known_solution->x_star).norm(), 1e-10);
  EXPECT_LE(p.known_solution->u_star.norm(), 0.0);
}

TEST(ProblemTest, ModuliAreExposed) {
  QuadraticProblemOptions o;
  o.variant = QuadraticVariant::kPersonalizedFL;
  o.dim = 3;
  o.num_blocks = 4;
  o.mu = 1.0;
  o.L = 10.0;
  o.penalty = 2.0;
  const PrimalDualProblem p = MakeQuadraticProblem(o);
  EXPECT_DOUBLE_EQ(p.mu_f(), 1.0);
  EXPECT_DOUBLE_EQ(p.L_f(), 10.0);
  EXPECT_DOUBLE_EQ(p.mu_hc(), 0.5);
  EXPECT_EQ(p.primal_dim(), 12);
  EXPECT_EQ(p.dual_dim(), 12);
}

TEST(SmoothOracleTest, ZeroOracle) {
  const SmoothOracle f = SmoothOracle::Zero(4);
  EXPECT_TRUE(f.is_zero());
  EXPECT_EQ(f.grad(Vector::Ones(4)), Vector::Zero(4));
  EXPECT_EQ(f.value(Vector::Ones(4)), 0.0);
}

}  // namespace
}  // namespace randprox
