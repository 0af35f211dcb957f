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

// Problem data model: minimize f(x) + g(x) + h(Kx) over x, together with the
// dual problem in u and the saddle-point pairing between them.

#ifndef RANDPROX_PROBLEM_H_
#define RANDPROX_PROBLEM_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "randprox/types.h"

namespace randprox {

using VectorMap = std::function<Vector(const Vector&)>;

// A linear operator K : X -> U together with the spectral constants the
// convergence theory needs. All constants refer to KK* (equivalently K*K for
// the norm).
class LinearMap {
 public:
  // Constants left unset are estimated (norm) or treated as unknown
  // (eigenvalue bounds default to 0, the safe side).
  struct Constants {
    std::optional<double> norm_sq;
    double lambda_min = 0.0;
    double lambda_min_plus = 0.0;
  };

  LinearMap() = default;
  LinearMap(int64_t in_dim, int64_t out_dim, VectorMap apply, VectorMap adjoint,
            Constants constants, VectorMap range_projector = nullptr);

  static LinearMap Identity(int64_t dim);
  // Dense matrix; constants come from an eigendecomposition of MM^T.
  static LinearMap FromMatrix(Matrix m);
  // x -> (x, ..., x), n copies. K*K = n Id.
  static LinearMap Stacking(int64_t dim, int64_t copies);

  Vector Apply(const Vector& x) const;
  Vector Adjoint(const Vector& u) const;

  int64_t in_dim() const { return in_dim_; }
  int64_t out_dim() const { return out_dim_; }
  double norm_sq() const { return norm_sq_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_min_plus() const { return lambda_min_plus_; }
  bool norm_is_estimated() const { return norm_is_estimated_; }
  bool is_identity() const { return is_identity_; }
  bool has_range_projector() const { return static_cast<bool>(range_projector_); }
  // Orthogonal projection onto ran(K).
  Vector ProjectOntoRange(const Vector& u) const;
  const std::optional<Matrix>& matrix() const { return matrix_; }

 private:
  int64_t in_dim_ = 0;
  int64_t out_dim_ = 0;
  VectorMap apply_;
  VectorMap adjoint_;
  VectorMap range_projector_;
  double norm_sq_ = 0.0;
  double lambda_min_ = 0.0;
  double lambda_min_plus_ = 0.0;
  bool norm_is_estimated_ = false;
  bool is_identity_ = false;
  std::optional<Matrix> matrix_;
};

// Smooth convex f with L-Lipschitz gradient and modulus mu. L == 0 encodes
// f == 0.
struct SmoothOracle {
  std::function<double(const Vector&)> value;
  VectorMap grad;
  double L = 0.0;
  double mu = 0.0;

  static SmoothOracle Zero(int64_t dim);
  bool is_zero() const { return L == 0.0; }
};

using ProxFn = std::function<Vector(const Vector&, double)>;
using BlockProxFn = std::function<Vector(int64_t, const Vector&, double)>;

// x -> prox_{step * phi}(x) for a proper closed convex phi with strong
// convexity modulus mu. Block-separable functions on a product space also
// expose the prox of each summand.
struct ProxOracle {
  ProxFn prox;
  double mu = 0.0;
  std::optional<BlockLayout> layout;
  BlockProxFn block_prox;

  Vector Prox(const Vector& x, double step) const;
  Vector BlockProx(int64_t block, const Vector& x, double step) const;
};

// prox_{gamma h*}(x) = x - gamma prox_{h/gamma}(x / gamma).
Vector MoreauConjugateProx(const ProxOracle& h, double gamma, const Vector& x);

// Builds the oracle of h* from the oracle of h through the Moreau identity.
// The modulus of h* cannot be read off h's oracle, so it is declared.
ProxOracle ConjugateViaMoreau(const ProxOracle& h, double conj_mu = 0.0);

struct KnownSolution {
  Vector x_star;
  Vector u_star;
};

// Dense description of a problem in the quadratic/affine family, consumed by
// the direct KKT oracle. f(x) = 1/2 x'Ax - c'x, g(x) = (w/2)|x - a|^2.
enum class PenaltyKind {
  kZero,
  kQuadratic,        // h(y) = 1/2 (y - target)' H (y - target)
  kPointIndicator,   // h = indicator of {target}
  kConsensus,        // h = indicator of {x_1 = ... = x_n}, K = Id
  kPersonalization,  // h(x) = (w/2) sum_i |x_i - mean(x)|^2, K = Id
  kL1,               // h = w |.|_1, K = Id
};

struct QuadraticModel {
  Matrix hessian;
  Vector linear;
  double g_weight = 0.0;
  Vector g_center;
  PenaltyKind h_kind = PenaltyKind::kZero;
  double h_weight = 0.0;  // lambda or l1 weight
  Matrix h_hessian;       // kQuadratic only
  Vector h_target;
  Matrix k_matrix;
  std::optional<BlockLayout> blocks;
};

// Linear constraint Wx = a given through a self-adjoint positive W.
struct GramConstraint {
  Matrix w;
  Vector a;
  double norm = 0.0;             // |W|
  double lambda_min_plus = 0.0;  // smallest nonzero eigenvalue of W
  Matrix sqrt_pinv;              // pseudo-inverse of sqrt(W)
  bool diagonal = false;
};

// Shape facts that algorithms check before running.
struct ProblemStructure {
  bool f_zero = false;
  bool g_zero = false;
  std::optional<Vector> h_point;  // h = indicator of {b}
  std::optional<BlockLayout> primal_blocks;
  std::optional<BlockLayout> dual_blocks;
};

struct PrimalDualProblem {
  std::string name;
  SmoothOracle f;
  ProxOracle g;
  ProxOracle h;
  ProxOracle h_conj;
  LinearMap K;
  ProblemStructure structure;
  std::optional<KnownSolution> known_solution;
  std::optional<QuadraticModel> quadratic;
  std::optional<GramConstraint> gram;

  int64_t primal_dim() const { return K.in_dim(); }
  int64_t dual_dim() const { return K.out_dim(); }
  double mu_f() const { return f.mu; }
  double L_f() const { return f.L; }
  double mu_g() const { return g.mu; }
  double mu_hc() const { return h_conj.mu; }
};

// Absolute tolerance a stored known solution must meet.
inline constexpr double kKnownSolutionTolerance = 1e-8;

// Fixed-point residual of the optimality inclusions with unit steps:
// |x - prox_g(x - grad f(x) - K*u)| + |u - prox_{h*}(u + Kx)|.
double CheckOptimalityResidual(const PrimalDualProblem& p, const Vector& x,
                               const Vector& u);

// Throws ProblemConstructionError if the stored solution misses the residual
// tolerance.
void ValidateKnownSolution(const PrimalDualProblem& p);

// Power iteration on K*K. Returns a Rayleigh quotient, which never exceeds
// |K|^2.
double EstimateNormSq(const LinearMap& K, int iters, uint64_t seed);

// Inflation applied to estimated norms before they enter step-size bounds.
inline constexpr double kNormEstimateInflation = 1.01;

}  // namespace randprox

#endif  // RANDPROX_PROBLEM_H_
