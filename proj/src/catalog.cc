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

#include "randprox/catalog.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>

#include "Eigen/Cholesky"
#include "Eigen/Eigenvalues"
#include "Eigen/QR"
#include "randprox/reference_oracle.h"
#include "randprox/rng.h"

namespace randprox {
namespace {

void CheckPositive(double v, const std::string& what) {
  if (!(v > 0.0)) throw ParameterError(what + " must be positive");
}

void CheckLayout(const Vector& x, const BlockLayout& layout,
                 const char* what) {
  if (layout.num_blocks < 1 || layout.block_dim < 1) {
    throw ShapeError(std::string(what) + ": empty block layout");
  }
  CheckSameSize(x, layout.size(), what);
}

Vector BroadcastMean(const Vector& x, const BlockLayout& layout) {
  Vector mean = layout.Block(x, 0);
  for (int64_t i = 1; i < layout.num_blocks; ++i) mean += layout.Block(x, i);
  mean /= static_cast<double>(layout.num_blocks);
  Vector out(layout.size());
  for (int64_t i = 0; i < layout.num_blocks; ++i) layout.Block(out, i) = mean;
  return out;
}

// Random matrix with orthonormal columns, rows x cols, rows >= cols.
Matrix RandomOrthonormal(int64_t rows, int64_t cols, Rng& rng) {
  Matrix g(rows, cols);
  for (int64_t j = 0; j < cols; ++j) g.col(j) = rng.NormalVector(rows);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

// Spectrum of length n with both endpoints present and the rest uniform.
Vector SpreadSpectrum(int64_t n, double lo, double hi, Rng& rng) {
  Vector s(n);
  for (int64_t i = 0; i < n; ++i) s[i] = lo + (hi - lo) * rng.Uniform();
  s[0] = lo;
  if (n > 1) s[n - 1] = hi;
  return s;
}

// Fat matrix U diag(sigma) V' with singular values in [1, 2]; the last
// rows - rank singular values are zero.
Matrix RandomConstraintMatrix(int64_t rows, int64_t cols, int64_t rank,
                              Rng& rng) {
  const Matrix u = RandomOrthonormal(rows, rows, rng);
  const Matrix v = RandomOrthonormal(cols, rows, rng);
  Vector sigma = Vector::Zero(rows);
  sigma.head(rank) = SpreadSpectrum(rank, 1.0, 2.0, rng);
  return u * sigma.asDiagonal() * v.transpose();
}

CatalogEntry GEntry(double weight, const Vector& center) {
  if (weight > 0.0) return SquaredNormEntry(weight, center);
  return ZeroEntry();
}

SmoothOracle BlockQuadraticOracle(const std::vector<Matrix>& blocks,
                                  const Vector& c, double mu, double L) {
  Matrix a = Matrix::Zero(c.size(), c.size());
  int64_t offset = 0;
  for (const Matrix& b : blocks) {
    a.block(offset, offset, b.rows(), b.cols()) = b;
    offset += b.rows();
  }
  SmoothOracle f = QuadraticOracle(std::move(a), c);
  f.mu = mu;
  f.L = L;
  return f;
}

PrimalDualProblem Finish(std::string name, QuadraticModel model,
                         SmoothOracle f, const CatalogEntry& g,
                         const CatalogEntry& h, LinearMap K,
                         ProblemStructure structure,
                         std::optional<KnownSolution> solution) {
  PrimalDualProblem p;
  p.name = std::move(name);
  p.f = std::move(f);
  p.g = g.prox;
  p.h = h.prox;
  p.h_conj = h.conjugate_prox;
  p.K = std::move(K);
  structure.f_zero = p.f.is_zero();
  structure.g_zero = g.name == "zero";
  p.structure = std::move(structure);
  if (!solution) {
    const OracleSolution s = KktSolveQuadratic(model);
    solution = KnownSolution{s.x_star, s.u_star};
  }
  p.quadratic = std::move(model);
  p.known_solution = std::move(solution);
  ValidateKnownSolution(p);
  return p;
}

}  // namespace

Vector ProxL1(const Vector& x, double gamma) {
  CheckPositive(gamma, "ProxL1: gamma");
  return (x.array().sign() * (x.array().abs() - gamma).max(0.0)).matrix();
}

Vector ProxIndicatorPoint(const Vector& x, const Vector& b) {
  CheckSameSize(x, b.size(), "ProxIndicatorPoint");
  return b;
}

Vector ProxSqNorm(const Vector& x, double gamma, double lambda,
                  const Vector& center) {
  CheckPositive(gamma, "ProxSqNorm: gamma");
  CheckPositive(lambda, "ProxSqNorm: lambda");
  CheckSameSize(x, center.size(), "ProxSqNorm");
  return (x + gamma * lambda * center) / (1.0 + gamma * lambda);
}

Vector ProxConsensus(const Vector& x, const BlockLayout& layout) {
  CheckLayout(x, layout, "ProxConsensus");
  return BroadcastMean(x, layout);
}

CatalogEntry ZeroEntry() {
  CatalogEntry e;
  e.name = "zero";
  e.prox.prox = [](const Vector& x, double) { return x; };
  e.conjugate_prox.prox = [](const Vector& u, double) -> Vector {
    return Vector::Zero(u.size());
  };
  return e;
}

CatalogEntry L1Entry(double weight) {
  CheckPositive(weight, "L1Entry: weight");
  CatalogEntry e;
  e.name = "l1";
  e.prox.prox = [weight](const Vector& x, double step) {
    return ProxL1(x, step * weight);
  };
  // The conjugate is the indicator of the l-infinity ball of radius weight.
  e.conjugate_prox.prox = [weight](const Vector& u, double) -> Vector {
    return u.cwiseMax(-weight).cwiseMin(weight);
  };
  return e;
}

CatalogEntry PointIndicatorEntry(Vector b) {
  CatalogEntry e;
  e.name = "indicator_point";
  e.prox.prox = [b](const Vector& x, double) {
    return ProxIndicatorPoint(x, b);
  };
  e.conjugate_prox.prox = [b](const Vector& u, double step) -> Vector {
    CheckSameSize(u, b.size(), "PointIndicatorEntry");
    return u - step * b;
  };
  return e;
}

CatalogEntry SquaredNormEntry(double lambda, Vector center,
                              std::optional<BlockLayout> layout) {
  CheckPositive(lambda, "SquaredNormEntry: lambda");
  auto c = std::make_shared<const Vector>(std::move(center));
  CatalogEntry e;
  e.name = layout ? "sq_norm_blocks" : "sq_norm";
  e.mu = lambda;
  e.prox.mu = lambda;
  e.prox.prox = [c, lambda](const Vector& x, double step) {
    return ProxSqNorm(x, step, lambda, *c);
  };
  e.conjugate_prox.mu = 1.0 / lambda;
  e.conjugate_prox.prox = [c, lambda](const Vector& u,
                                      double step) -> Vector {
    CheckSameSize(u, c->size(), "SquaredNormEntry");
    return lambda * (u - step * *c) / (lambda + step);
  };
  if (layout) {
    if (layout->size() != c->size()) {
      throw ShapeError("SquaredNormEntry: layout does not match center");
    }
    const BlockLayout l = *layout;
    e.prox.layout = l;
    e.conjugate_prox.layout = l;
    e.prox.block_prox = [c, lambda, l](int64_t i, const Vector& x,
                                       double step) -> Vector {
      return ProxSqNorm(x, step, lambda, l.Block(*c, i));
    };
    e.conjugate_prox.block_prox = [c, lambda, l](int64_t i, const Vector& u,
                                                 double step) -> Vector {
      return lambda * (u - step * l.Block(*c, i)) / (lambda + step);
    };
    // The full prox goes through the block prox so that sampling every block
    // reproduces it exactly.
    auto full = [l](const BlockProxFn& block) {
      return [l, block](const Vector& x, double step) {
        CheckLayout(x, l, "SquaredNormEntry");
        Vector out(l.size());
        for (int64_t i = 0; i < l.num_blocks; ++i) {
          l.Block(out, i) = block(i, l.Block(x, i), step);
        }
        return out;
      };
    };
    e.prox.prox = full(e.prox.block_prox);
    e.conjugate_prox.prox = full(e.conjugate_prox.block_prox);
  }
  return e;
}

CatalogEntry ConsensusEntry(BlockLayout layout) {
  CatalogEntry e;
  e.name = "consensus";
  e.prox.prox = [layout](const Vector& x, double) {
    return ProxConsensus(x, layout);
  };
  // Conjugate of the indicator of the diagonal: indicator of its orthogonal
  // complement {sum_i u_i = 0}.
  e.conjugate_prox.prox = [layout](const Vector& u, double) -> Vector {
    return u - ProxConsensus(u, layout);
  };
  return e;
}

CatalogEntry PersonalizationEntry(BlockLayout layout, double lambda) {
  CheckPositive(lambda, "PersonalizationEntry: lambda");
  CatalogEntry e;
  e.name = "personalization";
  e.prox.prox = [layout, lambda](const Vector& x, double step) -> Vector {
    const Vector mean = ProxConsensus(x, layout);
    return mean + (x - mean) / (1.0 + step * lambda);
  };
  // h* = |.|^2 / (2 lambda) restricted to {sum_i u_i = 0}.
  e.conjugate_prox.mu = 1.0 / lambda;
  e.conjugate_prox.prox = [layout, lambda](const Vector& u,
                                           double step) -> Vector {
    return (u - ProxConsensus(u, layout)) * (lambda / (lambda + step));
  };
  return e;
}

CatalogEntry BlockQuadraticEntry(BlockLayout layout,
                                 std::vector<Matrix> hessians,
                                 Vector centers) {
  if (static_cast<int64_t>(hessians.size()) != layout.num_blocks ||
      centers.size() != layout.size()) {
    throw ShapeError("BlockQuadraticEntry: blocks do not match layout");
  }
  double min_eig = std::numeric_limits<double>::infinity();
  double max_eig = 0.0;
  for (const Matrix& b : hessians) {
    if (b.rows() != layout.block_dim || b.cols() != layout.block_dim) {
      throw ShapeError("BlockQuadraticEntry: hessian has wrong size");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(b, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12) {
      throw ParameterError("BlockQuadraticEntry: hessian is not positive");
    }
    min_eig = std::min(min_eig, std::max(0.0, eig.eigenvalues().minCoeff()));
    max_eig = std::max(max_eig, eig.eigenvalues().maxCoeff());
  }
  auto hs = std::make_shared<const std::vector<Matrix>>(std::move(hessians));
  auto cs = std::make_shared<const Vector>(std::move(centers));
  const BlockLayout l = layout;
  const Matrix eye = Matrix::Identity(l.block_dim, l.block_dim);

  CatalogEntry e;
  e.name = "block_quadratic";
  e.mu = min_eig;
  e.prox.mu = min_eig;
  e.prox.layout = l;
  e.conjugate_prox.layout = l;
  e.conjugate_prox.mu = max_eig > 0.0 ? 1.0 / max_eig : 0.0;
  // prox: (I + step B)^-1 (y + step B c).
  e.prox.block_prox = [hs, cs, l, eye](int64_t i, const Vector& y,
                                       double step) -> Vector {
    const Matrix& b = (*hs)[i];
    const Vector c = l.Block(*cs, i);
    return (eye + step * b).ldlt().solve(y + step * (b * c));
  };
  // Conjugate prox: (B + step I)^-1 B (u - step c); valid for singular B.
  e.conjugate_prox.block_prox = [hs, cs, l, eye](int64_t i, const Vector& u,
                                                 double step) -> Vector {
    const Matrix& b = (*hs)[i];
    const Vector c = l.Block(*cs, i);
    return (b + step * eye).ldlt().solve(b * (u - step * c));
  };
  auto full = [l](const BlockProxFn& block) {
    return [l, block](const Vector& x, double step) {
      CheckLayout(x, l, "BlockQuadraticEntry");
      Vector out(l.size());
      for (int64_t i = 0; i < l.num_blocks; ++i) {
        l.Block(out, i) = block(i, l.Block(x, i), step);
      }
      return out;
    };
  };
  e.prox.prox = full(e.prox.block_prox);
  e.conjugate_prox.prox = full(e.conjugate_prox.block_prox);
  return e;
}

std::vector<CatalogEntry> AllCatalogEntries(int64_t dim, uint64_t seed) {
  if (dim < 1) throw ParameterError("AllCatalogEntries: dim must be >= 1");
  Rng rng(seed, 7);
  const BlockLayout layout =
      dim % 2 == 0 ? BlockLayout{2, dim / 2} : BlockLayout{1, dim};
  std::vector<CatalogEntry> out;
  out.push_back(ZeroEntry());
  out.push_back(L1Entry(0.7));
  out.push_back(PointIndicatorEntry(rng.NormalVector(dim)));
  out.push_back(SquaredNormEntry(2.5, rng.NormalVector(dim)));
  out.push_back(SquaredNormEntry(0.4, rng.NormalVector(dim), layout));
  out.push_back(ConsensusEntry(layout));
  out.push_back(PersonalizationEntry(layout, 1.7));
  std::vector<Matrix> hessians;
  for (int64_t i = 0; i < layout.num_blocks; ++i) {
    hessians.push_back(
        RandomSpdMatrix(layout.block_dim, 0.5, 3.0, SplitMix64(seed + i)));
  }
  // One singular block to exercise the semidefinite case.
  hessians.back().setZero();
  out.push_back(
      BlockQuadraticEntry(layout, std::move(hessians), rng.NormalVector(dim)));
  return out;
}

SmoothOracle QuadraticOracle(Matrix a, Vector c) {
  if (a.rows() != a.cols() || a.rows() != c.size()) {
    throw ShapeError("QuadraticOracle: A must be square and match c");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a, Eigen::EigenvaluesOnly);
  auto am = std::make_shared<const Matrix>(std::move(a));
  auto cv = std::make_shared<const Vector>(std::move(c));
  SmoothOracle f;
  f.value = [am, cv](const Vector& x) {
    CheckSameSize(x, cv->size(), "QuadraticOracle");
    return 0.5 * x.dot(*am * x) - cv->dot(x);
  };
  f.grad = [am, cv](const Vector& x) -> Vector {
    CheckSameSize(x, cv->size(), "QuadraticOracle");
    return *am * x - *cv;
  };
  f.L = eig.eigenvalues().maxCoeff();
  f.mu = std::max(0.0, eig.eigenvalues().minCoeff());
  return f;
}

SmoothOracle LogSumExpOracle(int64_t dim) {
  if (dim < 1) throw ParameterError("LogSumExpOracle: dim must be >= 1");
  SmoothOracle f;
  f.value = [dim](const Vector& x) {
    CheckSameSize(x, dim, "LogSumExpOracle");
    const double m = x.maxCoeff();
    return m + std::log((x.array() - m).exp().sum());
  };
  f.grad = [dim](const Vector& x) -> Vector {
    CheckSameSize(x, dim, "LogSumExpOracle");
    const Eigen::ArrayXd e = (x.array() - x.maxCoeff()).exp();
    return (e / e.sum()).matrix();
  };
  f.L = 1.0;
  f.mu = 0.0;
  return f;
}

Matrix RandomSpdMatrix(int64_t dim, double mu, double L, uint64_t seed) {
  if (dim < 1) throw ParameterError("RandomSpdMatrix: dim must be >= 1");
  if (!(mu >= 0.0) || !(L >= mu)) {
    throw ParameterError("RandomSpdMatrix: need 0 <= mu <= L");
  }
  Rng rng(seed, 11);
  const Matrix q = RandomOrthonormal(dim, dim, rng);
  const Vector s = SpreadSpectrum(dim, mu, L, rng);
  Matrix a = q * s.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

const char* VariantName(QuadraticVariant v) {
  switch (v) {
    case QuadraticVariant::kPlain: return "plain";
    case QuadraticVariant::kL1: return "l1";
    case QuadraticVariant::kLinearConstraint: return "linear_constraint";
    case QuadraticVariant::kLinearConstraintDeficient:
      return "linear_constraint_deficient";
    case QuadraticVariant::kPersonalizedFL: return "personalized_fl";
    case QuadraticVariant::kConsensusFL: return "consensus_fl";
    case QuadraticVariant::kProductSpace: return "product_space";
    case QuadraticVariant::kFiniteSum: return "finite_sum";
    case QuadraticVariant::kComposite: return "composite";
    case QuadraticVariant::kLeastSquaresConstrained:
      return "least_squares_constrained";
  }
  return "unknown";
}

QuadraticVariant ParseVariant(const std::string& name) {
  for (QuadraticVariant v :
       {QuadraticVariant::kPlain, QuadraticVariant::kL1,
        QuadraticVariant::kLinearConstraint,
        QuadraticVariant::kLinearConstraintDeficient,
        QuadraticVariant::kPersonalizedFL, QuadraticVariant::kConsensusFL,
        QuadraticVariant::kProductSpace, QuadraticVariant::kFiniteSum,
        QuadraticVariant::kComposite,
        QuadraticVariant::kLeastSquaresConstrained}) {
    if (name == VariantName(v)) return v;
  }
  throw ParameterError("unknown problem variant '" + name + "'");
}

PrimalDualProblem MakeQuadraticProblem(int64_t dim, double mu, double L,
                                       uint64_t seed,
                                       QuadraticVariant variant) {
  QuadraticProblemOptions o;
  o.dim = dim;
  o.mu = mu;
  o.L = L;
  o.seed = seed;
  o.variant = variant;
  return MakeQuadraticProblem(o);
}

PrimalDualProblem MakeQuadraticProblem(const QuadraticProblemOptions& o) {
  if (!(o.mu > 0.0) || !(o.L > 0.0)) {
    throw ParameterError("MakeQuadraticProblem: mu and L must be positive");
  }
  if (o.mu > o.L) throw ParameterError("MakeQuadraticProblem: mu > L");
  if (o.dim < 1) throw ParameterError("MakeQuadraticProblem: dim must be >= 1");
  if (o.g_weight < 0.0) {
    throw ParameterError("MakeQuadraticProblem: g_weight must be >= 0");
  }
  Rng rng(o.seed, 3);
  const int64_t d = o.dim;
  const std::string name = VariantName(o.variant);
  QuadraticModel model;
  model.g_weight = o.g_weight;

  switch (o.variant) {
    case QuadraticVariant::kPlain:
    case QuadraticVariant::kL1:
    case QuadraticVariant::kLinearConstraint:
    case QuadraticVariant::kLinearConstraintDeficient: {
      model.hessian = RandomSpdMatrix(d, o.mu, o.L, o.seed);
      model.linear = rng.NormalVector(d);
      model.g_center = rng.NormalVector(d);
      SmoothOracle f = QuadraticOracle(model.hessian, model.linear);
      f.mu = o.mu;
      f.L = o.L;
      const CatalogEntry g = GEntry(o.g_weight, model.g_center);
      if (o.variant == QuadraticVariant::kPlain) {
        model.h_kind = PenaltyKind::kZero;
        model.k_matrix = Matrix::Identity(d, d);
        return Finish(name, model, f, g, ZeroEntry(), LinearMap::Identity(d),
                      {}, std::nullopt);
      }
      if (o.variant == QuadraticVariant::kL1) {
        // Built backward from a chosen sparse solution: c = Ax* + w(x* - a)
        // + u* with u* in the subdifferential of |.|_1 at x*.
        CheckPositive(o.penalty, "MakeQuadraticProblem: l1 weight");
        const double w = o.penalty;
        Vector x_star = rng.NormalVector(d);
        Vector u_star(d);
        for (int64_t i = 0; i < d; ++i) {
          if (i % 2 == 1) {
            x_star[i] = 0.0;
            u_star[i] = w * (1.8 * rng.Uniform() - 0.9);
          } else {
            x_star[i] += x_star[i] >= 0.0 ? 0.5 : -0.5;
            u_star[i] = x_star[i] > 0.0 ? w : -w;
          }
        }
        model.linear = model.hessian * x_star + u_star;
        if (o.g_weight > 0.0) {
          model.linear += o.g_weight * (x_star - model.g_center);
        }
        f = QuadraticOracle(model.hessian, model.linear);
        f.mu = o.mu;
        f.L = o.L;
        model.h_kind = PenaltyKind::kL1;
        model.h_weight = w;
        model.k_matrix = Matrix::Identity(d, d);
        return Finish(name, model, f, g, L1Entry(w), LinearMap::Identity(d),
                      {}, KnownSolution{x_star, u_star});
      }
      const int64_t rows = o.rows > 0 ? o.rows : std::max<int64_t>(1, d / 2);
      if (rows > d) {
        throw ParameterError("MakeQuadraticProblem: constraint rows > dim");
      }
      int64_t rank = rows;
      if (o.variant == QuadraticVariant::kLinearConstraintDeficient) {
        if (rows < 2) {
          throw ParameterError(
              "MakeQuadraticProblem: rank-deficient constraint needs >= 2 rows");
        }
        rank = rows / 2;
      }
      const Matrix k = RandomConstraintMatrix(rows, d, rank, rng);
      const Vector b = k * rng.NormalVector(d);
      model.h_kind = PenaltyKind::kPointIndicator;
      model.h_target = b;
      model.k_matrix = k;
      ProblemStructure st;
      st.h_point = b;
      return Finish(name, model, f, g, PointIndicatorEntry(b),
                    LinearMap::FromMatrix(k), st, std::nullopt);
    }

    case QuadraticVariant::kPersonalizedFL:
    case QuadraticVariant::kConsensusFL: {
      if (o.num_blocks < 1) {
        throw ParameterError("MakeQuadraticProblem: need at least one node");
      }
      const BlockLayout layout{o.num_blocks, d};
      std::vector<Matrix> blocks;
      Vector c(layout.size());
      for (int64_t i = 0; i < layout.num_blocks; ++i) {
        blocks.push_back(RandomSpdMatrix(d, o.mu, o.L, SplitMix64(o.seed + i)));
        layout.Block(c, i) = rng.NormalVector(d);
      }
      SmoothOracle f = BlockQuadraticOracle(blocks, c, o.mu, o.L);
      model.hessian = Matrix::Zero(layout.size(), layout.size());
      for (int64_t i = 0; i < layout.num_blocks; ++i) {
        model.hessian.block(i * d, i * d, d, d) = blocks[i];
      }
      model.linear = c;
      model.g_weight = 0.0;
      model.blocks = layout;
      model.k_matrix = Matrix::Identity(layout.size(), layout.size());
      ProblemStructure st;
      st.primal_blocks = layout;
      st.dual_blocks = layout;
      if (o.variant == QuadraticVariant::kPersonalizedFL) {
        CheckPositive(o.penalty, "MakeQuadraticProblem: lambda");
        model.h_kind = PenaltyKind::kPersonalization;
        model.h_weight = o.penalty;
        return Finish(name, model, f, ZeroEntry(),
                      PersonalizationEntry(layout, o.penalty),
                      LinearMap::Identity(layout.size()), st, std::nullopt);
      }
      model.h_kind = PenaltyKind::kConsensus;
      return Finish(name, model, f, ZeroEntry(), ConsensusEntry(layout),
                    LinearMap::Identity(layout.size()), st, std::nullopt);
    }

    case QuadraticVariant::kProductSpace:
    case QuadraticVariant::kFiniteSum: {
      if (o.num_blocks < 1) {
        throw ParameterError("MakeQuadraticProblem: need at least one block");
      }
      const int64_t n = o.num_blocks;
      const BlockLayout layout{n, d};
      const Vector centers = rng.NormalVector(layout.size());
      Matrix stack(layout.size(), d);
      for (int64_t i = 0; i < n; ++i) {
        stack.block(i * d, 0, d, d).setIdentity();
      }
      model.k_matrix = stack;
      model.h_kind = PenaltyKind::kQuadratic;
      model.h_target = centers;
      model.blocks = layout;
      ProblemStructure st;
      st.dual_blocks = layout;
      if (o.variant == QuadraticVariant::kProductSpace) {
        CheckPositive(o.penalty, "MakeQuadraticProblem: lambda");
        model.hessian = RandomSpdMatrix(d, o.mu, o.L, o.seed);
        model.linear = rng.NormalVector(d);
        model.g_center = rng.NormalVector(d);
        model.h_hessian =
            o.penalty * Matrix::Identity(layout.size(), layout.size());
        SmoothOracle f = QuadraticOracle(model.hessian, model.linear);
        f.mu = o.mu;
        f.L = o.L;
        return Finish(name, model, f, GEntry(o.g_weight, model.g_center),
                      SquaredNormEntry(o.penalty, centers, layout),
                      LinearMap::Stacking(d, n), st, std::nullopt);
      }
      // Finite sum of quadratics h_i with spectrum in [mu, L]; f = 0.
      const double shift = o.shift_strong_convexity ? o.mu : 0.0;
      if (o.shift_strong_convexity && !(o.L > o.mu)) {
        throw ParameterError(
            "MakeQuadraticProblem: shifting strong convexity needs L > mu");
      }
      std::vector<Matrix> hessians;
      model.h_hessian = Matrix::Zero(layout.size(), layout.size());
      for (int64_t i = 0; i < n; ++i) {
        Matrix b = RandomSpdMatrix(d, o.mu, o.L, SplitMix64(o.seed + 101 + i));
        b.diagonal().array() -= shift;
        model.h_hessian.block(i * d, i * d, d, d) = b;
        hessians.push_back(std::move(b));
      }
      model.hessian = Matrix::Zero(d, d);
      model.linear = Vector::Zero(d);
      model.g_weight = shift > 0.0 ? static_cast<double>(n) * shift : 0.0;
      model.g_center = Vector::Zero(d);
      CatalogEntry h = BlockQuadraticEntry(layout, hessians, centers);
      // Declared from the construction rather than read back numerically.
      h.conjugate_prox.mu = 1.0 / (o.L - shift);
      return Finish(name, model, SmoothOracle::Zero(d),
                    GEntry(model.g_weight, model.g_center), h,
                    LinearMap::Stacking(d, n), st, std::nullopt);
    }

    case QuadraticVariant::kComposite: {
      CheckPositive(o.penalty, "MakeQuadraticProblem: lambda");
      const int64_t rows =
          o.identity_k ? d : (o.rows > 0 ? o.rows : std::max<int64_t>(1, d / 2));
      model.hessian = o.zero_f ? Matrix::Zero(d, d)
                               : RandomSpdMatrix(d, o.mu, o.L, o.seed);
      model.linear = o.zero_f ? Vector::Zero(d) : rng.NormalVector(d);
      model.g_center = rng.NormalVector(d);
      SmoothOracle f;
      if (o.zero_f) {
        f = SmoothOracle::Zero(d);
      } else {
        f = QuadraticOracle(model.hessian, model.linear);
        f.mu = o.mu;
        f.L = o.L;
      }
      Matrix k;
      if (o.identity_k) {
        k = Matrix::Identity(d, d);
      } else {
        k.resize(rows, d);
        for (int64_t j = 0; j < d; ++j) k.col(j) = rng.NormalVector(rows);
        k /= std::sqrt(static_cast<double>(d));
      }
      const Vector target = rng.NormalVector(rows);
      model.h_kind = PenaltyKind::kQuadratic;
      model.h_weight = o.penalty;
      model.h_hessian = o.penalty * Matrix::Identity(rows, rows);
      model.h_target = target;
      model.k_matrix = k;
      if (o.zero_f && o.g_weight == 0.0) {
        throw ParameterError(
            "MakeQuadraticProblem: composite with f = 0 needs g_weight > 0");
      }
      LinearMap km = o.identity_k ? LinearMap::Identity(d)
                                  : LinearMap::FromMatrix(k);
      return Finish(name, model, f, GEntry(o.g_weight, model.g_center),
                    SquaredNormEntry(o.penalty, target), std::move(km), {},
                    std::nullopt);
    }

    case QuadraticVariant::kLeastSquaresConstrained: {
      // f(x) = 1/2 |M(x - z)|^2 up to a constant, with M'M of rank d/2.
      const int64_t rank = std::max<int64_t>(1, d / 2);
      const Matrix q = RandomOrthonormal(d, rank, rng);
      const Vector s = SpreadSpectrum(rank, o.mu, o.L, rng);
      Matrix a = q * s.asDiagonal() * q.transpose();
      a = 0.5 * (a + a.transpose());
      model.hessian = a;
      model.linear = a * rng.NormalVector(d);
      model.g_center = Vector::Zero(d);
      model.g_weight = 0.0;
      SmoothOracle f = QuadraticOracle(model.hessian, model.linear);
      f.mu = 0.0;
      f.L = o.L;
      const int64_t rows = o.rows > 0 ? o.rows : std::max<int64_t>(1, d / 4);
      if (rows > d) {
        throw ParameterError("MakeQuadraticProblem: constraint rows > dim");
      }
      const Matrix k = RandomConstraintMatrix(rows, d, rows, rng);
      const Vector b = k * rng.NormalVector(d);
      model.h_kind = PenaltyKind::kPointIndicator;
      model.h_target = b;
      model.k_matrix = k;
      ProblemStructure st;
      st.h_point = b;
      return Finish(name, model, f, ZeroEntry(), PointIndicatorEntry(b),
                    LinearMap::FromMatrix(k), st, std::nullopt);
    }
  }
  throw ParameterError("MakeQuadraticProblem: unknown variant");
}

PrimalDualProblem MakeGramProblem(const PrimalDualProblem& lc) {
  if (!lc.quadratic || lc.quadratic->h_kind != PenaltyKind::kPointIndicator ||
      lc.quadratic->g_weight != 0.0) {
    throw UsageError(
        "MakeGramProblem: needs a linear-constraint problem with g = 0");
  }
  QuadraticModel model = *lc.quadratic;
  const Matrix& k = model.k_matrix;
  GramConstraint gram;
  gram.w = k.transpose() * k;
  gram.a = k.transpose() * model.h_target;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram.w);
  const Vector lam = eig.eigenvalues().cwiseMax(0.0);
  gram.norm = lam.maxCoeff();
  const double cut = 1e-10 * gram.norm;
  Vector root(lam.size());
  Vector inv_root(lam.size());
  gram.lambda_min_plus = std::numeric_limits<double>::infinity();
  for (int64_t i = 0; i < lam.size(); ++i) {
    const bool kept = lam[i] > cut;
    root[i] = kept ? std::sqrt(lam[i]) : 0.0;
    inv_root[i] = kept ? 1.0 / root[i] : 0.0;
    if (kept) gram.lambda_min_plus = std::min(gram.lambda_min_plus, lam[i]);
  }
  const Matrix& v = eig.eigenvectors();
  Matrix sqrt_w = v * root.asDiagonal() * v.transpose();
  sqrt_w = 0.5 * (sqrt_w + sqrt_w.transpose());
  gram.sqrt_pinv = v * inv_root.asDiagonal() * v.transpose();
  gram.sqrt_pinv = 0.5 * (gram.sqrt_pinv + gram.sqrt_pinv.transpose());
  const Matrix off = gram.w - Matrix(gram.w.diagonal().asDiagonal());
  gram.diagonal = off.cwiseAbs().maxCoeff() == 0.0;
  const Vector b = gram.sqrt_pinv * gram.a;
  model.k_matrix = sqrt_w;
  model.h_target = b;
  ProblemStructure st;
  st.h_point = b;
  PrimalDualProblem p =
      Finish(lc.name + "_gram", model, lc.f, ZeroEntry(),
             PointIndicatorEntry(b), LinearMap::FromMatrix(sqrt_w), st,
             std::nullopt);
  p.gram = std::move(gram);
  return p;
}

}  // namespace randprox
