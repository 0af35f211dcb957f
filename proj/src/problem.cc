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

#include "randprox/problem.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "Eigen/Eigenvalues"
#include "randprox/rng.h"

namespace randprox {

LinearMap::LinearMap(int64_t in_dim, int64_t out_dim, VectorMap apply,
                     VectorMap adjoint, Constants constants,
                     VectorMap range_projector)
    : in_dim_(in_dim),
      out_dim_(out_dim),
      apply_(std::move(apply)),
      adjoint_(std::move(adjoint)),
      range_projector_(std::move(range_projector)),
      lambda_min_(constants.lambda_min),
      lambda_min_plus_(constants.lambda_min_plus) {
  if (in_dim <= 0 || out_dim <= 0) {
    throw ParameterError("LinearMap: dimensions must be positive");
  }
  if (constants.norm_sq.has_value()) {
    norm_sq_ = *constants.norm_sq;
  } else {
    norm_sq_ = kNormEstimateInflation * EstimateNormSq(*this, 500, 0x5eed);
    norm_is_estimated_ = true;
  }
  if (norm_sq_ <= 0.0) throw ParameterError("LinearMap: K must be nonzero");
}

LinearMap LinearMap::Identity(int64_t dim) {
  LinearMap k(
      dim, dim, [](const Vector& x) { return x; },
      [](const Vector& u) { return u; },
      {.norm_sq = 1.0, .lambda_min = 1.0, .lambda_min_plus = 1.0},
      [](const Vector& u) { return u; });
  k.is_identity_ = true;
  k.matrix_ = Matrix::Identity(dim, dim);
  return k;
}

LinearMap LinearMap::FromMatrix(Matrix m) {
  if (m.size() == 0) throw ParameterError("LinearMap: empty matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m * m.transpose());
  const Vector& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  const double rank_tol = 1e-10 * std::max(top, 1.0);
  double lambda_plus = 0.0;
  Matrix range_basis(m.rows(), 0);
  for (int64_t i = 0; i < ev.size(); ++i) {
    if (ev[i] > rank_tol) {
      if (lambda_plus == 0.0) lambda_plus = ev[i];
      range_basis.conservativeResize(Eigen::NoChange, range_basis.cols() + 1);
      range_basis.col(range_basis.cols() - 1) = eig.eigenvectors().col(i);
    }
  }
  const double lambda_min = ev.minCoeff() > rank_tol ? ev.minCoeff() : 0.0;
  Matrix projector = range_basis * range_basis.transpose();
  auto shared = std::make_shared<const Matrix>(m);
  LinearMap k(
      m.cols(), m.rows(), [shared](const Vector& x) -> Vector { return *shared * x; },
      [shared](const Vector& u) -> Vector { return shared->transpose() * u; },
      {.norm_sq = top, .lambda_min = lambda_min, .lambda_min_plus = lambda_plus},
      [projector](const Vector& u) -> Vector { return projector * u; });
  k.matrix_ = std::move(m);
  return k;
}

LinearMap LinearMap::Stacking(int64_t dim, int64_t copies) {
  if (copies < 1) throw ParameterError("Stacking: need at least one copy");
  const BlockLayout layout{copies, dim};
  auto apply = [layout](const Vector& x) {
    Vector out(layout.size());
    for (int64_t i = 0; i < layout.num_blocks; ++i) layout.Block(out, i) = x;
    return out;
  };
  auto adjoint = [layout](const Vector& u) {
    Vector out = layout.Block(u, 0);
    for (int64_t i = 1; i < layout.num_blocks; ++i) out += layout.Block(u, i);
    return out;
  };
  // ran(K) is the diagonal; projecting replaces every block by the mean.
  auto project = [layout](const Vector& u) {
    Vector mean = layout.Block(u, 0);
    for (int64_t i = 1; i < layout.num_blocks; ++i) mean += layout.Block(u, i);
    mean /= static_cast<double>(layout.num_blocks);
    Vector out(layout.size());
    for (int64_t i = 0; i < layout.num_blocks; ++i) layout.Block(out, i) = mean;
    return out;
  };
  const double n = static_cast<double>(copies);
  LinearMap k(dim, layout.size(), apply, adjoint,
              {.norm_sq = n,
               .lambda_min = copies == 1 ? 1.0 : 0.0,
               .lambda_min_plus = n},
              project);
  Matrix m(layout.size(), dim);
  for (int64_t i = 0; i < copies; ++i) {
    m.block(i * dim, 0, dim, dim).setIdentity();
  }
  k.matrix_ = std::move(m);
  return k;
}

Vector LinearMap::Apply(const Vector& x) const {
  CheckSameSize(x, in_dim_, "LinearMap::Apply");
  return apply_(x);
}

Vector LinearMap::Adjoint(const Vector& u) const {
  CheckSameSize(u, out_dim_, "LinearMap::Adjoint");
  return adjoint_(u);
}

Vector LinearMap::ProjectOntoRange(const Vector& u) const {
  if (!range_projector_) {
    throw DiagnosticsUnavailableError("LinearMap: no range projector");
  }
  CheckSameSize(u, out_dim_, "LinearMap::ProjectOntoRange");
  return range_projector_(u);
}

SmoothOracle SmoothOracle::Zero(int64_t dim) {
  return {.value = [](const Vector&) { return 0.0; },
          .grad = [dim](const Vector&) -> Vector { return Vector::Zero(dim); },
          .L = 0.0,
          .mu = 0.0};
}

Vector ProxOracle::Prox(const Vector& x, double step) const {
  if (!(step > 0.0)) throw ParameterError("prox: step must be positive");
  return prox(x, step);
}

Vector ProxOracle::BlockProx(int64_t block, const Vector& x,
                             double step) const {
  if (!block_prox || !layout) {
    throw UsageError("prox: function is not block separable");
  }
  if (!(step > 0.0)) throw ParameterError("prox: step must be positive");
  if (block < 0 || block >= layout->num_blocks) {
    throw ShapeError("prox: block index out of range");
  }
  CheckSameSize(x, layout->block_dim, "ProxOracle::BlockProx");
  return block_prox(block, x, step);
}

Vector MoreauConjugateProx(const ProxOracle& h, double gamma, const Vector& x) {
  if (!(gamma > 0.0)) {
    throw ParameterError("MoreauConjugateProx: gamma must be positive");
  }
  return x - gamma * h.prox(x / gamma, 1.0 / gamma);
}

ProxOracle ConjugateViaMoreau(const ProxOracle& h, double conj_mu) {
  ProxOracle out;
  out.mu = conj_mu;
  out.prox = [h](const Vector& x, double step) {
    return MoreauConjugateProx(h, step, x);
  };
  if (h.block_prox) {
    out.layout = h.layout;
    out.block_prox = [h](int64_t i, const Vector& x, double step) -> Vector {
      return x - step * h.block_prox(i, x / step, 1.0 / step);
    };
  }
  return out;
}

double CheckOptimalityResidual(const PrimalDualProblem& p, const Vector& x,
                               const Vector& u) {
  CheckSameSize(x, p.primal_dim(), "CheckOptimalityResidual(x)");
  CheckSameSize(u, p.dual_dim(), "CheckOptimalityResidual(u)");
  const Vector primal_fp =
      p.g.Prox(x - p.f.grad(x) - p.K.Adjoint(u), 1.0);
  const Vector dual_fp = p.h_conj.Prox(u + p.K.Apply(x), 1.0);
  return (x - primal_fp).norm() + (u - dual_fp).norm();
}

void ValidateKnownSolution(const PrimalDualProblem& p) {
  if (!p.known_solution) return;
  const double r = CheckOptimalityResidual(p, p.known_solution->x_star,
                                           p.known_solution->u_star);
  if (!(r <= kKnownSolutionTolerance)) {
    throw ProblemConstructionError(
        p.name + ": stored solution has optimality residual " +
        std::to_string(r));
  }
}

double EstimateNormSq(const LinearMap& K, int iters, uint64_t seed) {
  if (iters < 1) throw ParameterError("EstimateNormSq: iters must be >= 1");
  if (K.in_dim() <= 0) throw ParameterError("EstimateNormSq: empty domain");
  Rng rng(seed);
  Vector x = rng.NormalVector(K.in_dim());
  x.normalize();
  double rayleigh = 0.0;
  for (int it = 0; it < iters; ++it) {
    const Vector kx = K.Apply(x);
    rayleigh = kx.squaredNorm();  // <K*Kx, x> with |x| = 1
    Vector next = K.Adjoint(kx);
    const double n = next.norm();
    if (n == 0.0) break;
    x = next / n;
  }
  return rayleigh;
}

}  // namespace randprox
