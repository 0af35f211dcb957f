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

#include "randprox/solvers.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <utility>

namespace randprox {
namespace {

constexpr double kStepTolerance = 1e-12;

double Omega(const PrimalDualProblem& p, const SolverConfig& cfg) {
  return EffectiveParams(cfg, p.K).omega;
}

// x-hat = prox_{gamma g}(x - gamma grad f(x) - gamma v).
Vector Predict(const PrimalDualProblem& p, const SolverConfig& cfg,
               const SolverState& s) {
  return p.g.Prox(s.x - cfg.gamma * p.f.grad(s.x) - cfg.gamma * s.v,
                  cfg.gamma);
}

void RecordCoin(const EstimatorDraw& draw, SolverState* s) {
  if (draw.kind == EstimatorKind::kBernoulli) {
    s->coin_history.push_back(!draw.IsZero());
  }
}

SolverState Advance(const SolverState& s) {
  SolverState next = s;
  next.t = s.t + 1;
  return next;
}

void Require(bool ok, Algorithm alg, const std::string& what) {
  if (!ok) {
    throw UsageError(std::string(AlgorithmName(alg)) + " requires " + what);
  }
}

void CheckEstimatorDim(const RandomEstimator& e, int64_t dim, Algorithm alg) {
  switch (e.kind()) {
    case EstimatorKind::kIdentity:
    case EstimatorKind::kBernoulli:
      return;
    case EstimatorKind::kRandK:
      Require(e.d() == dim, alg,
              "rand_k with d = " + std::to_string(dim));
      return;
    case EstimatorKind::kRandKBlocks:
      Require(dim % e.n() == 0, alg,
              "a dual dimension divisible by n = " + std::to_string(e.n()));
      return;
    case EstimatorKind::kSharedRandK:
      Require(e.d() * e.n() == dim, alg,
              "shared_rand_k with d n = " + std::to_string(dim));
      return;
  }
}

bool IsStacking(const PrimalDualProblem& p) {
  return p.structure.dual_blocks &&
         p.structure.dual_blocks->block_dim == p.K.in_dim() &&
         p.K.out_dim() == p.structure.dual_blocks->size();
}

// Per-node view of a draw made for the federated form.
EstimatorDraw NodeDraw(const EstimatorDraw& draw, int64_t d) {
  if (draw.kind != EstimatorKind::kSharedRandK) return draw;
  EstimatorDraw node = draw;
  node.kind = EstimatorKind::kRandK;
  node.universe = d;
  node.copies = 1;
  return node;
}

std::vector<int64_t> AllBlocks(int64_t n) {
  std::vector<int64_t> all(n);
  for (int64_t i = 0; i < n; ++i) all[i] = i;
  return all;
}

}  // namespace

const char* AlgorithmName(Algorithm a) {
  switch (a) {
    case Algorithm::kPddy: return "pddy";
    case Algorithm::kRandProx: return "randprox";
    case Algorithm::kFb: return "fb";
    case Algorithm::kLc: return "lc";
    case Algorithm::kSkip: return "skip";
    case Algorithm::kMinibatch: return "minibatch";
    case Algorithm::kPointSaga: return "point_saga";
    case Algorithm::kCp: return "cp";
    case Algorithm::kAdmm: return "admm";
    case Algorithm::kDy: return "dy";
    case Algorithm::kPriLiCo: return "prilico";
    case Algorithm::kFl: return "fl";
  }
  return "unknown";
}

std::vector<Algorithm> AllAlgorithms() {
  return {Algorithm::kPddy,      Algorithm::kRandProx,  Algorithm::kFb,
          Algorithm::kLc,        Algorithm::kSkip,      Algorithm::kMinibatch,
          Algorithm::kPointSaga, Algorithm::kCp,        Algorithm::kAdmm,
          Algorithm::kDy,        Algorithm::kPriLiCo,   Algorithm::kFl};
}

Algorithm ParseAlgorithm(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  for (Algorithm a : AllAlgorithms()) {
    if (lower == AlgorithmName(a)) return a;
  }
  throw ParameterError("unknown algorithm '" + name + "'");
}

EstimatorParams EffectiveParams(const SolverConfig& cfg, const LinearMap& K) {
  if (cfg.claimed_omega) {
    return {*cfg.claimed_omega, K.norm_sq() * *cfg.claimed_omega, 0.0};
  }
  return cfg.estimator.Params(K);
}

double DefaultTau(double gamma, const LinearMap& K,
                  const EstimatorParams& params) {
  if (!(gamma > 0.0)) throw ParameterError("DefaultTau: gamma must be > 0");
  const double denom = (1.0 - params.zeta) * K.norm_sq() + params.omega_ran;
  if (!(denom > 0.0)) {
    throw ParameterError(
        "DefaultTau: (1 - zeta)|K|^2 + omega_ran must be positive");
  }
  return 1.0 / (gamma * denom);
}

SolverConfig MakeConfig(const PrimalDualProblem& p, Algorithm alg,
                        RandomEstimator estimator, std::optional<double> gamma,
                        std::optional<double> tau) {
  SolverConfig cfg;
  cfg.estimator = std::move(estimator);
  if (alg == Algorithm::kPointSaga) {
    if (!p.structure.dual_blocks) {
      throw UsageError("point_saga requires a dual block layout");
    }
    const int64_t n = p.structure.dual_blocks->num_blocks;
    cfg.estimator = n >= 2 ? RandomEstimator::RandKBlocks(1, n)
                           : RandomEstimator::Identity();
  }
  cfg.gamma = gamma.value_or(p.L_f() > 0.0 ? 1.0 / p.L_f() : 1.0);
  if (!(cfg.gamma > 0.0)) throw ParameterError("gamma must be > 0");
  if (tau) {
    cfg.tau = *tau;
    return cfg;
  }
  const double omega = Omega(p, cfg);
  switch (alg) {
    case Algorithm::kFb:
    case Algorithm::kAdmm:
    case Algorithm::kDy:
    case Algorithm::kFl:
      cfg.tau = 1.0 / (cfg.gamma * (1.0 + omega));
      break;
    case Algorithm::kMinibatch:
    case Algorithm::kPointSaga:
      if (!p.structure.dual_blocks) {
        throw UsageError(std::string(AlgorithmName(alg)) +
                         " requires a dual block layout");
      }
      cfg.tau = 1.0 / (cfg.gamma *
                       static_cast<double>(p.structure.dual_blocks->num_blocks));
      break;
    case Algorithm::kPriLiCo:
      if (!p.gram) throw UsageError("prilico requires a constraint Wx = a");
      cfg.tau = 1.0 / (cfg.gamma * p.gram->norm * (1.0 + omega));
      break;
    default:
      cfg.tau = DefaultTau(cfg.gamma, p.K, EffectiveParams(cfg, p.K));
  }
  return cfg;
}

void CheckShape(const PrimalDualProblem& p, const SolverConfig& cfg,
                Algorithm alg) {
  const RandomEstimator& e = cfg.estimator;
  Require(!cfg.relaxation || alg == Algorithm::kRandProx, alg,
          "the default relaxation; rho is a randprox option");
  switch (alg) {
    case Algorithm::kPddy:
      Require(e.kind() == EstimatorKind::kIdentity, alg,
              "the identity estimator (use randprox for random ones)");
      break;
    case Algorithm::kRandProx:
    case Algorithm::kCp:
      CheckEstimatorDim(e, p.dual_dim(), alg);
      if (alg == Algorithm::kCp) Require(p.structure.f_zero, alg, "f = 0");
      break;
    case Algorithm::kFb:
      Require(p.K.is_identity(), alg, "K = Id");
      Require(p.structure.g_zero, alg, "g = 0");
      CheckEstimatorDim(e, p.dual_dim(), alg);
      break;
    case Algorithm::kLc:
      Require(p.structure.g_zero, alg, "g = 0");
      Require(p.structure.h_point.has_value(), alg, "h = indicator of {b}");
      CheckEstimatorDim(e, p.dual_dim(), alg);
      break;
    case Algorithm::kSkip:
      Require(e.kind() == EstimatorKind::kBernoulli ||
                  e.kind() == EstimatorKind::kIdentity,
              alg, "a Bernoulli estimator");
      break;
    case Algorithm::kMinibatch:
      Require(IsStacking(p), alg, "K = stacking map onto n blocks");
      Require(static_cast<bool>(p.h_conj.block_prox), alg,
              "a block-separable h");
      Require(e.kind() == EstimatorKind::kIdentity ||
                  (e.kind() == EstimatorKind::kRandKBlocks &&
                   e.n() == p.structure.dual_blocks->num_blocks),
              alg, "rand_k_blocks over the n blocks of the problem");
      break;
    case Algorithm::kPointSaga:
      Require(IsStacking(p), alg, "K = stacking map onto n blocks");
      Require(static_cast<bool>(p.h.block_prox), alg, "a block-separable h");
      break;
    case Algorithm::kAdmm:
      Require(p.structure.f_zero, alg, "f = 0");
      Require(p.K.is_identity(), alg, "K = Id");
      CheckEstimatorDim(e, p.dual_dim(), alg);
      break;
    case Algorithm::kDy:
      Require(p.K.is_identity(), alg, "K = Id");
      CheckEstimatorDim(e, p.dual_dim(), alg);
      break;
    case Algorithm::kPriLiCo:
      Require(p.gram.has_value(), alg, "a constraint Wx = a");
      Require(e.commutes_with_any_linear_map() ||
                  (e.kind() == EstimatorKind::kRandK && p.gram->diagonal &&
                   e.d() == p.primal_dim()),
              alg, "an estimator that commutes with sqrt(W)");
      break;
    case Algorithm::kFl: {
      Require(p.K.is_identity() && p.structure.primal_blocks.has_value(), alg,
              "a problem over n nodes with K = Id");
      Require(p.quadratic &&
                  p.quadratic->h_kind == PenaltyKind::kConsensus,
              alg, "the consensus constraint");
      const BlockLayout& l = *p.structure.primal_blocks;
      const bool shared =
          e.kind() == EstimatorKind::kIdentity ||
          e.kind() == EstimatorKind::kBernoulli ||
          (e.kind() == EstimatorKind::kRandK && e.d() == l.block_dim) ||
          (e.kind() == EstimatorKind::kSharedRandK && e.d() == l.block_dim &&
           e.n() == l.num_blocks);
      Require(e.is_linear() && shared, alg,
              "a linear estimator whose randomness is shared by the nodes");
      break;
    }
  }
}

void ValidateConfig(const PrimalDualProblem& p, const SolverConfig& cfg,
                    Algorithm alg) {
  CheckShape(p, cfg, alg);
  if (!(cfg.gamma > 0.0)) throw ParameterError("gamma must be > 0");
  if (!(cfg.tau > 0.0)) throw ParameterError("tau must be > 0");
  if (cfg.claimed_omega && !(*cfg.claimed_omega >= 0.0)) {
    throw ParameterError("claimed omega must be >= 0");
  }
  if (cfg.relaxation &&
      !(*cfg.relaxation > 0.0 && *cfg.relaxation <= 1.0)) {
    throw ParameterError("relaxation rho must be in (0, 1]");
  }
  const EstimatorParams e = EffectiveParams(cfg, p.K);
  const double L = p.L_f();
  if (L > 0.0 && !(cfg.gamma * L < 2.0 * (1.0 - kStepTolerance))) {
    if (!cfg.allow_large_gamma) {
      throw ParameterError("gamma must be < 2/L_f (got gamma L_f = " +
                           std::to_string(cfg.gamma * L) + ")");
    }
    if (!(p.mu_g() > 0.0)) {
      throw ParameterError("gamma >= 2/L_f is only allowed when mu_g > 0");
    }
    const double den = 1.0 + cfg.gamma * p.mu_g();
    const double third =
        1.0 - 2.0 * cfg.tau * p.mu_hc() /
                  ((1.0 + e.omega) * (1.0 + 2.0 * cfg.tau * p.mu_hc()));
    const double c = std::max({std::pow(1.0 - cfg.gamma * p.mu_f(), 2) / den,
                               std::pow(cfg.gamma * L - 1.0, 2) / den, third});
    if (!(c < 1.0)) {
      throw ParameterError("large gamma gives contraction factor c >= 1");
    }
  }
  switch (alg) {
    case Algorithm::kPddy:
    case Algorithm::kRandProx:
    case Algorithm::kSkip:
    case Algorithm::kLc:
    case Algorithm::kCp: {
      const double lhs =
          cfg.gamma * cfg.tau * ((1.0 - e.zeta) * p.K.norm_sq() + e.omega_ran);
      if (!(lhs <= 1.0 + kStepTolerance)) {
        throw ParameterError(
            "gamma tau ((1 - zeta)|K|^2 + omega_ran) must be <= 1 (got " +
            std::to_string(lhs) + ")");
      }
      break;
    }
    case Algorithm::kMinibatch:
    case Algorithm::kPointSaga: {
      const double n =
          static_cast<double>(p.structure.dual_blocks->num_blocks);
      if (!(std::abs(cfg.tau * cfg.gamma * n - 1.0) <= kStepTolerance)) {
        throw ParameterError(std::string(AlgorithmName(alg)) +
                             " requires tau = 1/(gamma n)");
      }
      break;
    }
    case Algorithm::kPriLiCo: {
      const double lhs = cfg.gamma * cfg.tau * p.gram->norm * (1.0 + e.omega);
      if (!(lhs <= 1.0 + kStepTolerance)) {
        throw ParameterError("gamma tau |W| (1 + omega) must be <= 1");
      }
      break;
    }
    default:
      break;
  }
}

SolverState InitialState(const PrimalDualProblem& p, const SolverConfig& cfg,
                         Algorithm alg, const std::optional<Vector>& x0,
                         const std::optional<Vector>& u0) {
  SolverState s;
  s.x = x0 ? *x0 : Vector::Zero(p.primal_dim());
  s.u = u0 ? *u0 : Vector::Zero(p.dual_dim());
  CheckSameSize(s.x, p.primal_dim(), "InitialState(x0)");
  CheckSameSize(s.u, p.dual_dim(), "InitialState(u0)");
  s.v = p.K.Adjoint(s.u);
  if (alg == Algorithm::kPriLiCo) {
    if (!p.gram) throw UsageError("prilico requires a constraint Wx = a");
    s.u = p.gram->sqrt_pinv * s.v;
  }
  if (alg == Algorithm::kFl && p.structure.primal_blocks) {
    const BlockLayout& l = *p.structure.primal_blocks;
    Vector sum = Vector::Zero(l.block_dim);
    for (int64_t i = 0; i < l.num_blocks; ++i) sum += l.Block(s.u, i);
    if (sum.norm() > 1e-12 * (1.0 + s.u.norm())) {
      throw UsageError("fl requires initial duals that sum to zero");
    }
  }
  if (alg == Algorithm::kCp) {
    s.last_xhat = p.g.Prox(s.x - cfg.gamma * s.v, cfg.gamma);
  }
  return s;
}

EstimatorDraw NextDraw(const PrimalDualProblem& p, const SolverConfig& cfg,
                       Algorithm alg, const SolverState& s) {
  if (alg == Algorithm::kPddy) return EstimatorDraw{};
  if (alg == Algorithm::kPointSaga) {
    const int64_t n = p.structure.dual_blocks->num_blocks;
    if (n == 1) {
      EstimatorDraw one;
      one.kind = EstimatorKind::kRandKBlocks;
      one.selected = {0};
      one.universe = 1;
      return one;
    }
    return RandomEstimator::RandKBlocks(1, n).Draw(cfg.seed, s.t);
  }
  return cfg.estimator.Draw(cfg.seed, s.t, s.coin_history);
}

SolverState PddyStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                     const SolverState& s) {
  SolverState next = Advance(s);
  const Vector xhat = Predict(p, cfg, s);
  next.u = p.h_conj.Prox(s.u + cfg.tau * p.K.Apply(xhat), cfg.tau);
  next.v = p.K.Adjoint(next.u);
  next.x = xhat - cfg.gamma * (next.v - s.v);
  next.last_xhat = xhat;
  next.prox_h_calls += 1;
  return next;
}

SolverState RandProxStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                         const SolverState& s, const EstimatorDraw& draw) {
  SolverState next = Advance(s);
  RecordCoin(draw, &next);
  const Vector xhat = Predict(p, cfg, s);
  next.last_xhat = xhat;
  if (draw.IsZero()) {
    next.x = xhat;
    return next;
  }
  const double omega = Omega(p, cfg);
  const double rho = cfg.relaxation.value_or(1.0 / (1.0 + omega));
  const double factor =
      cfg.relaxation ? cfg.gamma / rho : cfg.gamma * (1.0 + omega);
  const Vector uhat =
      p.h_conj.Prox(s.u + cfg.tau * p.K.Apply(xhat), cfg.tau);
  next.prox_h_calls += 1;
  if (draw.IsIdentity() && rho == 1.0) {
    next.u = uhat;
  } else {
    next.u = s.u + rho * draw.Apply(uhat - s.u);
  }
  next.v = p.K.Adjoint(next.u);
  next.x = xhat - factor * (next.v - s.v);
  return next;
}

namespace {

// Shared body of the K = Id forms: x-hat is given, then
// d = R(x-hat - prox_{s h}(x-hat + s u)) with s = gamma (1 + omega).
SolverState IdentityFormUpdate(const PrimalDualProblem& p,
                               const SolverConfig& cfg, const SolverState& s,
                               const EstimatorDraw& draw, Vector xhat) {
  SolverState next = Advance(s);
  RecordCoin(draw, &next);
  next.last_xhat = xhat;
  if (draw.IsZero()) {
    next.x = std::move(xhat);
    return next;
  }
  const double omega = Omega(p, cfg);
  const double step = cfg.gamma * (1.0 + omega);
  const Vector d = draw.Apply(xhat - p.h.Prox(xhat + step * s.u, step));
  next.prox_h_calls += 1;
  next.u = s.u + d / (cfg.gamma * (1.0 + omega) * (1.0 + omega));
  next.v = next.u;
  next.x = xhat - d / (1.0 + omega);
  return next;
}

}  // namespace

SolverState FbStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                   const SolverState& s, const EstimatorDraw& draw) {
  Vector xhat = s.x - cfg.gamma * p.f.grad(s.x) - cfg.gamma * s.u;
  return IdentityFormUpdate(p, cfg, s, draw, std::move(xhat));
}

SolverState DyStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                   const SolverState& s, const EstimatorDraw& draw) {
  Vector xhat = p.g.Prox(s.x - cfg.gamma * p.f.grad(s.x) - cfg.gamma * s.u,
                         cfg.gamma);
  return IdentityFormUpdate(p, cfg, s, draw, std::move(xhat));
}

SolverState AdmmStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                     const SolverState& s, const EstimatorDraw& draw) {
  Vector xhat = p.g.Prox(s.x - cfg.gamma * s.u, cfg.gamma);
  return IdentityFormUpdate(p, cfg, s, draw, std::move(xhat));
}

SolverState LcStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                   const SolverState& s, const EstimatorDraw& draw) {
  SolverState next = Advance(s);
  RecordCoin(draw, &next);
  const Vector xhat = s.x - cfg.gamma * p.f.grad(s.x) - cfg.gamma * s.v;
  next.last_xhat = xhat;
  if (draw.IsZero()) {
    next.x = xhat;
    return next;
  }
  const double omega = Omega(p, cfg);
  const Vector r = p.K.Apply(xhat) - *p.structure.h_point;
  next.prox_h_calls += 1;
  next.u = s.u + (cfg.tau / (1.0 + omega)) * draw.Apply(r);
  next.v = p.K.Adjoint(next.u);
  next.x = xhat - cfg.gamma * (1.0 + omega) * (next.v - s.v);
  return next;
}

SolverState SkipStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                     const SolverState& s, bool theta) {
  SolverState next = Advance(s);
  if (cfg.estimator.kind() == EstimatorKind::kBernoulli) {
    next.coin_history.push_back(theta);
  }
  const Vector xhat = Predict(p, cfg, s);
  next.last_xhat = xhat;
  if (!theta) {
    next.x = xhat;
    return next;
  }
  next.u = p.h_conj.Prox(s.u + cfg.tau * p.K.Apply(xhat), cfg.tau);
  next.prox_h_calls += 1;
  next.v = p.K.Adjoint(next.u);
  next.x = xhat - (cfg.gamma / cfg.estimator.p_min()) * (next.v - s.v);
  return next;
}

SolverState MinibatchStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                          const SolverState& s,
                          const std::vector<int64_t>& subset) {
  const BlockLayout& l = *p.structure.dual_blocks;
  const int64_t n = l.num_blocks;
  const int64_t k = cfg.estimator.kind() == EstimatorKind::kRandKBlocks
                        ? cfg.estimator.k()
                        : n;
  if (static_cast<int64_t>(subset.size()) != k) {
    throw UsageError("minibatch: subset size " +
                     std::to_string(subset.size()) + " != k = " +
                     std::to_string(k));
  }
  SolverState next = Advance(s);
  const Vector xhat = Predict(p, cfg, s);
  next.last_xhat = xhat;
  const Vector kx = p.K.Apply(xhat);
  for (int64_t i : subset) {
    if (i < 0 || i >= n) throw UsageError("minibatch: block out of range");
    const Vector z = l.Block(s.u, i) + cfg.tau * l.Block(kx, i);
    l.Block(next.u, i) = p.h_conj.BlockProx(i, z, cfg.tau);
  }
  next.prox_h_calls += 1;
  next.v = p.K.Adjoint(next.u);
  const double factor =
      cfg.gamma * (static_cast<double>(n) / static_cast<double>(k));
  next.x = xhat - factor * (next.v - s.v);
  return next;
}

SolverState PointSagaStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                          const SolverState& s, int64_t index) {
  const BlockLayout& l = *p.structure.dual_blocks;
  if (index < 0 || index >= l.num_blocks) {
    throw UsageError("point_saga: block out of range");
  }
  SolverState next = Advance(s);
  const Vector xhat = Predict(p, cfg, s);
  next.last_xhat = xhat;
  const double gn = cfg.gamma * static_cast<double>(l.num_blocks);
  const Vector ui = l.Block(s.u, index);
  next.x = p.h.BlockProx(index, gn * ui + xhat, gn);
  const Vector ui_next = ui + (xhat - next.x) / gn;
  l.Block(next.u, index) = ui_next;
  next.v = s.v + ui_next - ui;
  next.prox_h_calls += 1;
  return next;
}

SolverState CpStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                   const SolverState& s, const EstimatorDraw& draw) {
  SolverState next = Advance(s);
  RecordCoin(draw, &next);
  const Vector xhat = s.last_xhat.size() == p.primal_dim()
                          ? s.last_xhat
                          : p.g.Prox(s.x - cfg.gamma * s.v, cfg.gamma);
  if (draw.IsZero()) {
    next.x = xhat;
    next.last_xhat = p.g.Prox(xhat - cfg.gamma * s.v, cfg.gamma);
    return next;
  }
  const double omega = Omega(p, cfg);
  const Vector uhat =
      p.h_conj.Prox(s.u + cfg.tau * p.K.Apply(xhat), cfg.tau);
  next.prox_h_calls += 1;
  const Vector d = draw.Apply(uhat - s.u);
  next.u = s.u + d / (1.0 + omega);
  next.v = p.K.Adjoint(next.u);
  next.x = xhat - cfg.gamma * p.K.Adjoint(d);
  next.last_xhat =
      p.g.Prox(xhat - cfg.gamma * p.K.Adjoint(next.u + d), cfg.gamma);
  return next;
}

SolverState PriLiCoStep(const PrimalDualProblem& p, const SolverConfig& cfg,
                        const SolverState& s, const EstimatorDraw& draw) {
  const GramConstraint& w = *p.gram;
  SolverState next = Advance(s);
  RecordCoin(draw, &next);
  const Vector xhat = s.x - cfg.gamma * p.f.grad(s.x) - cfg.gamma * s.v;
  next.last_xhat = xhat;
  if (draw.IsZero()) {
    next.x = xhat;
    return next;
  }
  const double omega = Omega(p, cfg);
  const Vector d = cfg.tau * draw.Apply(w.w * xhat - w.a);
  next.prox_h_calls += 1;
  next.v = s.v + d / (1.0 + omega);
  next.u = w.sqrt_pinv * next.v;
  next.x = xhat - cfg.gamma * d;
  return next;
}

FederatedNodes NodesFromProblem(const PrimalDualProblem& p) {
  if (!p.quadratic || !p.structure.primal_blocks) {
    throw UsageError("fl requires a quadratic problem over n nodes");
  }
  const QuadraticModel& m = *p.quadratic;
  const BlockLayout l = *p.structure.primal_blocks;
  FederatedNodes nodes;
  nodes.layout = l;
  for (int64_t i = 0; i < l.num_blocks; ++i) {
    const int64_t off = i * l.block_dim;
    auto a = std::make_shared<const Matrix>(
        m.hessian.block(off, off, l.block_dim, l.block_dim));
    auto c = std::make_shared<const Vector>(m.linear.segment(off, l.block_dim));
    SmoothOracle f;
    f.value = [a, c](const Vector& x) {
      return 0.5 * x.dot(*a * x) - c->dot(x);
    };
    f.grad = [a, c](const Vector& x) -> Vector { return *a * x - *c; };
    f.L = p.f.L;
    f.mu = p.f.mu;
    nodes.local.push_back(std::move(f));
  }
  return nodes;
}

Vector ServerAggregate(const std::vector<Vector>& uploads) {
  if (uploads.empty()) throw UsageError("server: no uploads");
  Vector mean = uploads.front();
  for (size_t i = 1; i < uploads.size(); ++i) mean += uploads[i];
  return mean / static_cast<double>(uploads.size());
}

SolverState FlRound(const FederatedNodes& nodes, double gamma, double omega,
                    const SolverState& s, const EstimatorDraw& draw,
                    const ServerFn& server) {
  const BlockLayout& l = nodes.layout;
  if (static_cast<int64_t>(nodes.local.size()) != l.num_blocks) {
    throw ShapeError("fl: one local oracle per node expected");
  }
  CheckSameSize(s.x, l.size(), "fl(x)");
  CheckSameSize(s.u, l.size(), "fl(u)");
  SolverState next = Advance(s);
  RecordCoin(draw, &next);
  const EstimatorDraw node_draw = NodeDraw(draw, l.block_dim);
  std::vector<Vector> xhat(l.num_blocks);
  std::vector<Vector> uploads(l.num_blocks);
  for (int64_t i = 0; i < l.num_blocks; ++i) {
    const Vector xi = l.Block(s.x, i);
    xhat[i] = xi - gamma * nodes.local[i].grad(xi) - gamma * l.Block(s.u, i);
    if (!draw.IsZero()) uploads[i] = node_draw.Apply(xhat[i]);
  }
  next.last_xhat.resize(l.size());
  for (int64_t i = 0; i < l.num_blocks; ++i) {
    l.Block(next.last_xhat, i) = xhat[i];
  }
  if (draw.IsZero()) {
    next.x = next.last_xhat;
    return next;
  }
  const Vector mean = server(uploads);
  const double u_scale = 1.0 / (gamma * (1.0 + omega) * (1.0 + omega));
  for (int64_t i = 0; i < l.num_blocks; ++i) {
    const Vector d = uploads[i] - mean;
    l.Block(next.u, i) = l.Block(s.u, i) + u_scale * d;
    l.Block(next.x, i) = xhat[i] - d / (1.0 + omega);
  }
  next.v = next.u;
  next.prox_h_calls += 1;
  next.floats_communicated +=
      l.num_blocks * (node_draw.SupportSize(l.block_dim) + l.block_dim);
  return next;
}

SolverState Step(const PrimalDualProblem& p, const SolverConfig& cfg,
                 Algorithm alg, const SolverState& s,
                 const EstimatorDraw& draw) {
  switch (alg) {
    case Algorithm::kPddy: return PddyStep(p, cfg, s);
    case Algorithm::kRandProx: return RandProxStep(p, cfg, s, draw);
    case Algorithm::kFb: return FbStep(p, cfg, s, draw);
    case Algorithm::kLc: return LcStep(p, cfg, s, draw);
    case Algorithm::kSkip: return SkipStep(p, cfg, s, !draw.IsZero());
    case Algorithm::kMinibatch:
      return MinibatchStep(p, cfg, s,
                           draw.kind == EstimatorKind::kIdentity
                               ? AllBlocks(p.structure.dual_blocks->num_blocks)
                               : draw.selected);
    case Algorithm::kPointSaga:
      return PointSagaStep(p, cfg, s, draw.selected.at(0));
    case Algorithm::kCp: return CpStep(p, cfg, s, draw);
    case Algorithm::kAdmm: return AdmmStep(p, cfg, s, draw);
    case Algorithm::kDy: return DyStep(p, cfg, s, draw);
    case Algorithm::kPriLiCo: return PriLiCoStep(p, cfg, s, draw);
    case Algorithm::kFl:
      return FlRound(NodesFromProblem(p), cfg.gamma, Omega(p, cfg), s, draw);
  }
  throw UsageError("unknown algorithm");
}

double Bregman(const SmoothOracle& f, const Vector& x, const Vector& x_star) {
  if (!f.value) {
    throw DiagnosticsUnavailableError("Bregman divergence needs f values");
  }
  return f.value(x) - f.value(x_star) - f.grad(x_star).dot(x - x_star);
}

Trace Run(const PrimalDualProblem& p, const SolverConfig& cfg, Algorithm alg,
          const StopCriteria& stop, const RunOptions& options) {
  ValidateConfig(p, cfg, alg);
  if (stop.max_iters < 0) throw ParameterError("max_iters must be >= 0");
  Trace trace;
  const TheoremId theorem = options.lyapunov.value_or(MatchingTheorem(alg, p));
  if (p.known_solution) trace.theorem = theorem;
  std::optional<FederatedNodes> nodes;
  if (alg == Algorithm::kFl) nodes = NodesFromProblem(p);
  const double omega = Omega(p, cfg);

  auto row_of = [&](const SolverState& s) {
    TraceRow row;
    row.t = s.t;
    row.prox_h_calls = s.prox_h_calls;
    row.floats_comm = s.floats_communicated;
    if (p.known_solution) {
      const KnownSolution& star = *p.known_solution;
      row.dist_x_sq = (s.x - star.x_star).squaredNorm();
      row.dist_u_sq = (s.u - star.u_star).squaredNorm();
      try {
        row.psi = Lyapunov(theorem, p, cfg, s, star);
      } catch (const DiagnosticsUnavailableError&) {
      }
      if (p.f.value) row.bregman = Bregman(p.f, s.x, star.x_star);
    }
    return row;
  };

  SolverState s = InitialState(p, cfg, alg, options.x0, options.u0);
  if (options.observer) options.observer(s);
  trace.rows.push_back(row_of(s));
  for (int64_t it = 0; it < stop.max_iters; ++it) {
    const EstimatorDraw draw = NextDraw(p, cfg, alg, s);
    s = nodes ? FlRound(*nodes, cfg.gamma, omega, s, draw)
              : Step(p, cfg, alg, s, draw);
    if (options.observer) options.observer(s);
    const bool last = it + 1 == stop.max_iters;
    bool done = false;
    if (stop.residual_tol > 0.0) {
      done = CheckOptimalityResidual(p, s.x, s.u) <= stop.residual_tol;
    }
    if (cfg.record_trace || last || done) trace.rows.push_back(row_of(s));
    if (done) break;
  }
  trace.final_residual = CheckOptimalityResidual(p, s.x, s.u);
  trace.final_state = std::move(s);
  return trace;
}

}  // namespace randprox
