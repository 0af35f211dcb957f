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

// Closed-form proximity operators and synthetic problem generators whose
// solutions are known exactly.

#ifndef RANDPROX_CATALOG_H_
#define RANDPROX_CATALOG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "randprox/problem.h"
#include "randprox/types.h"

namespace randprox {

// Soft thresholding: sign(x_i) max(|x_i| - gamma, 0).
Vector ProxL1(const Vector& x, double gamma);
// Projection onto {b}; independent of the step.
Vector ProxIndicatorPoint(const Vector& x, const Vector& b);
// prox of gamma * (lambda/2)|. - center|^2.
Vector ProxSqNorm(const Vector& x, double gamma, double lambda,
                  const Vector& center);
// Replaces every block by the blockwise mean.
Vector ProxConsensus(const Vector& x, const BlockLayout& layout);

// A function with both its prox and the prox of its conjugate in closed form.
struct CatalogEntry {
  std::string name;
  ProxOracle prox;
  ProxOracle conjugate_prox;
  double mu = 0.0;  // modulus of the function itself
};

CatalogEntry ZeroEntry();
CatalogEntry L1Entry(double weight);
CatalogEntry PointIndicatorEntry(Vector b);
// (lambda/2)|. - center|^2; block separable when a layout is given.
CatalogEntry SquaredNormEntry(double lambda, Vector center,
                              std::optional<BlockLayout> layout = std::nullopt);
CatalogEntry ConsensusEntry(BlockLayout layout);
// (lambda/2) sum_i |x_i - mean(x)|^2.
CatalogEntry PersonalizationEntry(BlockLayout layout, double lambda);
// sum_i 1/2 (y_i - c_i)' B_i (y_i - c_i) on a product space, B_i positive
// semidefinite. centers holds the c_i stacked.
CatalogEntry BlockQuadraticEntry(BlockLayout layout, std::vector<Matrix> hessians,
                                 Vector centers);

// Every entry above, instantiated at the given dimension, for conformance
// sweeps.
std::vector<CatalogEntry> AllCatalogEntries(int64_t dim, uint64_t seed);

// f(x) = 1/2 x'Ax - c'x; L and mu are the extreme eigenvalues of A.
SmoothOracle QuadraticOracle(Matrix a, Vector c);
// f(x) = log sum_i exp(x_i); 1-smooth, not strongly convex.
SmoothOracle LogSumExpOracle(int64_t dim);

// Random symmetric matrix with eigenvalues spread over [mu, L], both
// endpoints included.
Matrix RandomSpdMatrix(int64_t dim, double mu, double L, uint64_t seed);

enum class QuadraticVariant {
  kPlain,                      // f only (h = 0, K = Id)
  kL1,                         // f + w|.|_1, K = Id
  kLinearConstraint,           // f s.t. Kx = b, K full row rank
  kLinearConstraintDeficient,  // f s.t. Kx = b, K rank deficient
  kPersonalizedFL,             // sum f_i(x_i) + (lambda/2) sum |x_i - mean|^2
  kConsensusFL,                // sum f_i(x_i) s.t. x_1 = ... = x_n
  kProductSpace,               // f + g + sum_i (lambda/2)|x - c_i|^2
  kFiniteSum,                  // sum_i h_i(x), h_i quadratic, optional shift
  kComposite,                  // f + (w/2)|x - a|^2 + (lambda/2)|Kx - t|^2
  kLeastSquaresConstrained,    // 1/2|Mx - y|^2 s.t. Kx = b, M rank deficient
};

const char* VariantName(QuadraticVariant v);
QuadraticVariant ParseVariant(const std::string& name);

struct QuadraticProblemOptions {
  int64_t dim = 10;
  double mu = 0.1;
  double L = 10.0;
  uint64_t seed = 1;
  QuadraticVariant variant = QuadraticVariant::kPlain;
  // Blocks for FL, product-space and finite-sum variants.
  int64_t num_blocks = 4;
  // lambda of the penalty term (personalization, product space, composite),
  // or the l1 weight.
  double penalty = 1.0;
  // Weight of g = (w/2)|x - a|^2; zero means g = 0.
  double g_weight = 0.0;
  // Rows of K for constraint and composite variants; 0 picks dim / 2.
  int64_t rows = 0;
  // Composite variant: drop f, or use K = Id.
  bool zero_f = false;
  bool identity_k = false;
  // Finite-sum variant: move mu/2 |.|^2 from every h_i into g.
  bool shift_strong_convexity = false;
};

PrimalDualProblem MakeQuadraticProblem(int64_t dim, double mu, double L,
                                       uint64_t seed, QuadraticVariant variant);
PrimalDualProblem MakeQuadraticProblem(const QuadraticProblemOptions& options);

// Rewrites the constraint Kx = b of a linear-constraint problem as Wx = a with
// W = K*K and a = K*b. The result uses K' = sqrt(W), b' = sqrt(W)^+ a, which
// has the same feasible set, and carries W for the primal form.
PrimalDualProblem MakeGramProblem(const PrimalDualProblem& lc);

}  // namespace randprox

#endif  // RANDPROX_CATALOG_H_
