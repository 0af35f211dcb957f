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

#include "randprox/rates.h"

#include <algorithm>
#include <cmath>
#include <utility>

namespace randprox {
namespace {

constexpr double kStepTolerance = 1e-12;

struct Constants {
  double gamma, tau, omega, omega_ran, zeta;
  double mu_f, L_f, mu_g, mu_hc;
  double norm_sq, lambda_min, lambda_min_plus;
};

Constants Gather(const PrimalDualProblem& p, const SolverConfig& cfg) {
  const EstimatorParams e = EffectiveParams(cfg, p.K);
  return {cfg.gamma,       cfg.tau,   e.omega,    e.omega_ran,
          e.zeta,          p.mu_f(),  p.L_f(),    p.mu_g(),
          p.mu_hc(),       p.K.norm_sq(), p.K.lambda_min(),
          p.K.lambda_min_plus()};
}

void Require(bool ok, const char* theorem, const std::string& hypothesis) {
  if (!ok) {
    throw RateUnavailableError(std::string(theorem) +
                               ": hypothesis fails: " + hypothesis);
  }
}

void RequireGamma(const char* theorem, double gamma, double L) {
  Require(gamma > 0.0, theorem, "gamma > 0");
  if (L > 0.0) {
    Require(gamma * L < 2.0 * (1.0 - kStepTolerance), theorem,
            "gamma < 2/L_f");
  }
}

void RequireStepProduct(const char* theorem, const Constants& k) {
  Require(k.tau > 0.0, theorem, "tau > 0");
  const double lhs =
      k.gamma * k.tau * ((1.0 - k.zeta) * k.norm_sq + k.omega_ran);
  Require(lhs <= 1.0 + kStepTolerance, theorem,
          "gamma tau ((1 - zeta)|K|^2 + omega_ran) <= 1");
}

RateReport Finish(TheoremId id, const char* name, std::vector<double> branches,
                  double w_primal, double w_dual) {
  RateReport r;
  r.theorem = id;
  r.branch_values = std::move(branches);
  r.c = *std::max_element(r.branch_values.begin(), r.branch_values.end());
  r.primal_weight = w_primal;
  r.dual_weight = w_dual;
  Require(r.c < 1.0 && r.c >= 0.0, name, "contraction factor c < 1");
  return r;
}

double Sq(double x) { return x * x; }

double T1Third(const Constants& k) {
  return 1.0 - 2.0 * k.tau * k.mu_hc /
                   ((1.0 + k.omega) * (1.0 + 2.0 * k.tau * k.mu_hc));
}

// General-theorem factor, also used to gate large steps.
std::vector<double> T1Branches(const Constants& k) {
  const double den = 1.0 + k.gamma * k.mu_g;
  return {Sq(1.0 - k.gamma * k.mu_f) / den, Sq(k.gamma * k.L_f - 1.0) / den,
          T1Third(k)};
}

std::pair<int64_t, int64_t> MinibatchCounts(const PrimalDualProblem& p,
                                            const SolverConfig& cfg) {
  const RandomEstimator& e = cfg.estimator;
  if (e.kind() == EstimatorKind::kRandKBlocks) return {e.k(), e.n()};
  if (e.kind() == EstimatorKind::kIdentity && p.structure.dual_blocks) {
    return {p.structure.dual_blocks->num_blocks,
            p.structure.dual_blocks->num_blocks};
  }
  throw RateUnavailableError(
      "t5: hypothesis fails: estimator samples k of n blocks");
}

}  // namespace

const char* TheoremName(TheoremId id) {
  switch (id) {
    case TheoremId::kT1: return "t1";
    case TheoremId::kT2: return "t2";
    case TheoremId::kT3: return "t3";
    case TheoremId::kT4: return "t4";
    case TheoremId::kT5: return "t5";
    case TheoremId::kT6: return "t6";
    case TheoremId::kT7: return "t7";
    case TheoremId::kT8: return "t8";
    case TheoremId::kT9: return "t9";
    case TheoremId::kT10: return "t10";
    case TheoremId::kL1: return "l1";
  }
  return "unknown";
}

TheoremId ParseTheorem(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  for (TheoremId id :
       {TheoremId::kT1, TheoremId::kT2, TheoremId::kT3, TheoremId::kT4,
        TheoremId::kT5, TheoremId::kT6, TheoremId::kT7, TheoremId::kT8,
        TheoremId::kT9, TheoremId::kT10, TheoremId::kL1}) {
    if (lower == TheoremName(id)) return id;
  }
  throw ParameterError("unknown theorem '" + name + "'");
}

double GdContraction(double gamma, double mu_f, double L_f) {
  if (!(gamma > 0.0)) throw ParameterError("GdContraction: gamma must be > 0");
  if (!(mu_f >= 0.0)) throw ParameterError("GdContraction: mu must be >= 0");
  if (mu_f > L_f) throw ParameterError("GdContraction: mu > L");
  return std::max(1.0 - gamma * mu_f, gamma * L_f - 1.0);
}

RateReport RateThm1(const PrimalDualProblem& p, const SolverConfig& cfg) {
  const Constants k = Gather(p, cfg);
  Require(k.mu_f > 0.0 || k.mu_g > 0.0, "t1", "mu_f > 0 or mu_g > 0");
  Require(k.mu_hc > 0.0, "t1", "mu_h* > 0");
  if (!(cfg.allow_large_gamma && k.mu_g > 0.0)) {
    RequireGamma("t1", k.gamma, k.L_f);
  }
  RequireStepProduct("t1", k);
  return Finish(TheoremId::kT1, "t1", T1Branches(k), 1.0 / k.gamma,
                (1.0 + k.omega) * (1.0 / k.tau + 2.0 * k.mu_hc));
}

RateReport RateThm2(const PrimalDualProblem& p, const SolverConfig& cfg) {
  const Constants k = Gather(p, cfg);
  Require(p.structure.g_zero, "t2", "g = 0");
  Require(k.mu_f > 0.0, "t2", "mu_f > 0");
  Require(k.lambda_min > 0.0 || k.mu_hc > 0.0, "t2",
          "lambda_min(KK*) > 0 or mu_h* > 0");
  RequireGamma("t2", k.gamma, k.L_f);
  RequireStepProduct("t2", k);
  const double third =
      1.0 - (2.0 * k.tau * k.mu_hc + k.gamma * k.tau * k.lambda_min) /
                ((1.0 + k.omega) * (1.0 + 2.0 * k.tau * k.mu_hc));
  return Finish(TheoremId::kT2, "t2",
                {Sq(1.0 - k.gamma * k.mu_f), Sq(k.gamma * k.L_f - 1.0), third},
                1.0 / k.gamma,
                (1.0 + k.omega) * (1.0 / k.tau + 2.0 * k.mu_hc));
}

RateReport RateThm3(double gamma, double mu_f, double L_f, double mu_hc,
                    double omega) {
  Require(mu_f > 0.0, "t3", "mu_f > 0");
  Require(mu_f <= L_f, "t3", "mu_f <= L_f");
  Require(omega >= 0.0 && mu_hc >= 0.0, "t3", "omega >= 0 and mu_h* >= 0");
  RequireGamma("t3", gamma, L_f);
  const double a = 2.0 * mu_hc / gamma;
  const double third =
      1.0 - (1.0 + a) / ((1.0 + omega) * (1.0 + omega + a));
  return Finish(TheoremId::kT3, "t3",
                {Sq(1.0 - gamma * mu_f), Sq(gamma * L_f - 1.0), third},
                1.0 / gamma,
                (1.0 + omega) * (gamma * (1.0 + omega) + 2.0 * mu_hc));
}

RateReport RateThm3(const PrimalDualProblem& p, const SolverConfig& cfg) {
  Require(p.K.is_identity(), "t3", "K = Id");
  Require(p.structure.g_zero, "t3", "g = 0");
  return RateThm3(cfg.gamma, p.mu_f(), p.L_f(), p.mu_hc(),
                  EffectiveParams(cfg, p.K).omega);
}

RateReport RateThm4(const PrimalDualProblem& p, const SolverConfig& cfg) {
  const Constants k = Gather(p, cfg);
  Require(p.structure.h_point.has_value(), "t4", "h = indicator of {b}");
  Require(p.structure.g_zero, "t4", "g = 0");
  Require(k.mu_f > 0.0, "t4", "mu_f > 0");
  Require(k.lambda_min_plus > 0.0, "t4", "lambda_min^+(KK*) > 0");
  RequireGamma("t4", k.gamma, k.L_f);
  RequireStepProduct("t4", k);
  const double third = 1.0 - k.gamma * k.tau * k.lambda_min_plus /
                                 (1.0 + k.omega);
  return Finish(TheoremId::kT4, "t4",
                {Sq(1.0 - k.gamma * k.mu_f), Sq(k.gamma * k.L_f - 1.0), third},
                1.0 / k.gamma, (1.0 + k.omega) / k.tau);
}

RateReport RateThm5(const PrimalDualProblem& p, const SolverConfig& cfg) {
  const Constants k = Gather(p, cfg);
  Require(p.structure.dual_blocks.has_value() &&
              p.K.out_dim() ==
                  p.structure.dual_blocks->num_blocks * p.K.in_dim(),
          "t5", "K = stacking map onto n copies");
  const auto [kk, n] = MinibatchCounts(p, cfg);
  Require(n == p.structure.dual_blocks->num_blocks, "t5",
          "estimator samples among the n blocks of the problem");
  Require(k.mu_f > 0.0 || k.mu_g > 0.0, "t5", "mu_f > 0 or mu_g > 0");
  Require(k.mu_hc > 0.0, "t5", "mu_h* > 0");
  RequireGamma("t5", k.gamma, k.L_f);
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(kk);
  const double den = 1.0 + k.gamma * k.mu_g;
  const double third =
      1.0 - 2.0 * kd * k.mu_hc / (nd * (k.gamma * nd + 2.0 * k.mu_hc));
  return Finish(TheoremId::kT5, "t5",
                {Sq(1.0 - k.gamma * k.mu_f) / den,
                 Sq(k.gamma * k.L_f - 1.0) / den, third},
                1.0 / k.gamma, nd / kd * (k.gamma * nd + 2.0 * k.mu_hc));
}

RateReport RateThm6(const PrimalDualProblem& p, const SolverConfig& cfg) {
  Require(p.gram.has_value(), "t6", "constraint given as Wx = a");
  const GramConstraint& w = *p.gram;
  const double omega = EffectiveParams(cfg, p.K).omega;
  Require(p.mu_f() > 0.0, "t6", "mu_f > 0");
  RequireGamma("t6", cfg.gamma, p.L_f());
  Require(cfg.tau > 0.0, "t6", "tau > 0");
  Require(cfg.gamma * cfg.tau * w.norm * (1.0 + omega) <=
              1.0 + kStepTolerance,
          "t6", "gamma tau |W| (1 + omega) <= 1");
  const double third =
      1.0 - cfg.gamma * cfg.tau * w.lambda_min_plus / (1.0 + omega);
  return Finish(TheoremId::kT6, "t6",
                {Sq(1.0 - cfg.gamma * p.mu_f()),
                 Sq(cfg.gamma * p.L_f() - 1.0), third},
                1.0 / cfg.gamma, (1.0 + omega) / cfg.tau);
}

RateReport RateThm7(const PrimalDualProblem& p, const SolverConfig& cfg) {
  const Constants k = Gather(p, cfg);
  Require(p.structure.f_zero, "t7", "f = 0");
  Require(k.mu_g > 0.0, "t7", "mu_g > 0");
  Require(k.mu_hc > 0.0, "t7", "mu_h* > 0");
  Require(k.gamma > 0.0, "t7", "gamma > 0");
  RequireStepProduct("t7", k);
  return Finish(TheoremId::kT7, "t7",
                {1.0 / (1.0 + k.gamma * k.mu_g), T1Third(k)}, 1.0 / k.gamma,
                (1.0 + k.omega) * (1.0 / k.tau + 2.0 * k.mu_hc));
}

RateReport RateThm8(const PrimalDualProblem& p, const SolverConfig& cfg) {
  Constants k = Gather(p, cfg);
  Require(p.structure.f_zero, "t8", "f = 0");
  Require(p.K.is_identity(), "t8", "K = Id");
  Require(k.mu_g > 0.0, "t8", "mu_g > 0");
  Require(k.mu_hc > 0.0, "t8", "mu_h* > 0");
  Require(k.gamma > 0.0, "t8", "gamma > 0");
  k.tau = 1.0 / (k.gamma * (1.0 + k.omega));
  return Finish(TheoremId::kT8, "t8",
                {1.0 / (1.0 + k.gamma * k.mu_g), T1Third(k)}, 1.0 / k.gamma,
                (1.0 + k.omega) * (k.gamma * (1.0 + k.omega) + 2.0 * k.mu_hc));
}

RateReport RateThm9(const PrimalDualProblem& p, const SolverConfig& cfg) {
  const Constants k = Gather(p, cfg);
  Require(p.K.is_identity(), "t9", "K = Id");
  Require(k.mu_f > 0.0 || k.mu_g > 0.0, "t9", "mu_f > 0 or mu_g > 0");
  Require(k.mu_hc > 0.0, "t9", "mu_h* > 0");
  RequireGamma("t9", k.gamma, k.L_f);
  const double a = 2.0 * k.mu_hc / k.gamma;
  const double den = 1.0 + k.gamma * k.mu_g;
  const double third = 1.0 - a / ((1.0 + k.omega) * (1.0 + k.omega + a));
  return Finish(TheoremId::kT9, "t9",
                {Sq(1.0 - k.gamma * k.mu_f) / den,
                 Sq(k.gamma * k.L_f - 1.0) / den, third},
                1.0 / k.gamma,
                (1.0 + k.omega) * (k.gamma * (1.0 + k.omega) + 2.0 * k.mu_hc));
}

RateReport RateThm10(double gamma, double mu, double L, double omega) {
  Require(mu > 0.0, "t10", "mu > 0");
  Require(mu <= L, "t10", "mu <= L");
  Require(omega >= 0.0, "t10", "omega >= 0");
  RequireGamma("t10", gamma, L);
  return Finish(TheoremId::kT10, "t10",
                {Sq(1.0 - gamma * mu), Sq(gamma * L - 1.0),
                 1.0 - 1.0 / Sq(1.0 + omega)},
                1.0 / gamma, gamma * Sq(1.0 + omega));
}

RateReport RateThm10(const PrimalDualProblem& p, const SolverConfig& cfg) {
  Require(p.K.is_identity() && p.structure.primal_blocks.has_value(), "t10",
          "consensus problem over n nodes with K = Id");
  Require(cfg.estimator.is_linear() ||
              cfg.estimator.kind() == EstimatorKind::kBernoulli,
          "t10", "shared linear estimator");
  return RateThm10(cfg.gamma, p.mu_f(), p.L_f(),
                   EffectiveParams(cfg, p.K).omega);
}

RateReport RateLemma1(double gamma, double mu_f, double L_f) {
  GdContraction(gamma, mu_f, L_f);
  return Finish(TheoremId::kL1, "l1", {1.0 - gamma * mu_f, gamma * L_f - 1.0},
                1.0, 0.0);
}

RateReport RateFor(TheoremId id, const PrimalDualProblem& p,
                   const SolverConfig& cfg) {
  switch (id) {
    case TheoremId::kT1: return RateThm1(p, cfg);
    case TheoremId::kT2: return RateThm2(p, cfg);
    case TheoremId::kT3: return RateThm3(p, cfg);
    case TheoremId::kT4: return RateThm4(p, cfg);
    case TheoremId::kT5: return RateThm5(p, cfg);
    case TheoremId::kT6: return RateThm6(p, cfg);
    case TheoremId::kT7: return RateThm7(p, cfg);
    case TheoremId::kT8: return RateThm8(p, cfg);
    case TheoremId::kT9: return RateThm9(p, cfg);
    case TheoremId::kT10: return RateThm10(p, cfg);
    case TheoremId::kL1: return RateLemma1(cfg.gamma, p.mu_f(), p.L_f());
  }
  throw ParameterError("RateFor: unknown theorem");
}

TheoremId MatchingTheorem(Algorithm a, const PrimalDualProblem& p) {
  switch (a) {
    case Algorithm::kPddy:
    case Algorithm::kRandProx:
    case Algorithm::kSkip:
      if (p.structure.h_point && p.structure.g_zero) return TheoremId::kT4;
      if (p.mu_hc() > 0.0 && (p.mu_f() > 0.0 || p.mu_g() > 0.0)) {
        return TheoremId::kT1;
      }
      if (p.structure.g_zero) return TheoremId::kT2;
      return TheoremId::kT1;
    case Algorithm::kFb: return TheoremId::kT3;
    case Algorithm::kLc: return TheoremId::kT4;
    case Algorithm::kMinibatch:
    case Algorithm::kPointSaga: return TheoremId::kT5;
    case Algorithm::kCp: return TheoremId::kT7;
    case Algorithm::kAdmm: return TheoremId::kT8;
    case Algorithm::kDy: return TheoremId::kT9;
    case Algorithm::kPriLiCo: return TheoremId::kT6;
    case Algorithm::kFl: return TheoremId::kT10;
  }
  return TheoremId::kT1;
}

std::pair<double, double> LyapunovWeights(TheoremId id,
                                          const PrimalDualProblem& p,
                                          const SolverConfig& cfg) {
  const double g = cfg.gamma;
  const double omega = EffectiveParams(cfg, p.K).omega;
  const double mu = p.mu_hc();
  switch (id) {
    case TheoremId::kT1:
    case TheoremId::kT2:
    case TheoremId::kT7:
      return {1.0 / g, (1.0 + omega) * (1.0 / cfg.tau + 2.0 * mu)};
    case TheoremId::kT3:
    case TheoremId::kT8:
    case TheoremId::kT9:
      return {1.0 / g, (1.0 + omega) * (g * (1.0 + omega) + 2.0 * mu)};
    case TheoremId::kT4:
    case TheoremId::kT6:
      return {1.0 / g, (1.0 + omega) / cfg.tau};
    case TheoremId::kT5: {
      const auto [k, n] = MinibatchCounts(p, cfg);
      const double nd = static_cast<double>(n);
      return {1.0 / g, nd / static_cast<double>(k) * (g * nd + 2.0 * mu)};
    }
    case TheoremId::kT10:
      return {1.0 / g, g * Sq(1.0 + omega)};
    case TheoremId::kL1:
      return {1.0, 0.0};
  }
  return {1.0 / g, 0.0};
}

double Lyapunov(TheoremId id, const PrimalDualProblem& p,
                const SolverConfig& cfg, const SolverState& s,
                const KnownSolution& star) {
  CheckSameSize(s.x, star.x_star.size(), "Lyapunov(x)");
  const auto [wx, wu] = LyapunovWeights(id, p, cfg);
  const double dx = (s.x - star.x_star).squaredNorm();
  if (wu == 0.0) return wx * dx;
  double du = 0.0;
  if (id == TheoremId::kT4) {
    if (!p.K.has_range_projector()) {
      throw DiagnosticsUnavailableError(
          "t4 Lyapunov needs the projector onto ran(K)");
    }
    du = (p.K.ProjectOntoRange(s.u) - p.K.ProjectOntoRange(star.u_star))
             .squaredNorm();
  } else if (id == TheoremId::kT6) {
    if (!p.gram) {
      throw DiagnosticsUnavailableError("t6 Lyapunov needs W");
    }
    du = (p.gram->sqrt_pinv * s.v - star.u_star).squaredNorm();
  } else {
    CheckSameSize(s.u, star.u_star.size(), "Lyapunov(u)");
    du = (s.u - star.u_star).squaredNorm();
  }
  return wx * dx + wu * du;
}

double Lyapunov(TheoremId id, const PrimalDualProblem& p,
                const SolverConfig& cfg, const SolverState& s) {
  if (!p.known_solution) {
    throw DiagnosticsUnavailableError(p.name + ": no known solution");
  }
  return Lyapunov(id, p, cfg, s, *p.known_solution);
}

double ErgodicBound(double psi0, double gamma, double L_f, int64_t t) {
  if (t < 1) throw ParameterError("ErgodicBound: t must be >= 1");
  const double den = 2.0 * gamma - gamma * gamma * L_f;
  if (!(den > 0.0)) {
    throw RateUnavailableError("ergodic bound: hypothesis fails: gamma < 2/L_f");
  }
  return psi0 / (den * static_cast<double>(t));
}

Complexity ComplexitySummary(ComplexityKind kind, double kappa,
                             double lambda_over_mu, int64_t d) {
  if (!(kappa >= 1.0)) throw ParameterError("ComplexitySummary: kappa < 1");
  Complexity out;
  switch (kind) {
    case ComplexityKind::kScaffnew:
      out.parameter = 1.0 / std::sqrt(kappa);
      out.cost = out.parameter * kappa + 1.0 / out.parameter;
      break;
    case ComplexityKind::kPersonalizedFL: {
      if (!(lambda_over_mu > 0.0)) {
        throw ParameterError("ComplexitySummary: lambda must be positive");
      }
      // p = sqrt(mu min(L, lambda)) / L, in units of mu.
      const double m = std::min(kappa, lambda_over_mu);
      out.parameter = std::sqrt(m) / kappa;
      const double p = out.parameter;
      const double a = 2.0 * kappa / lambda_over_mu;  // 2 L / lambda
      const double iterations =
          std::max(kappa, (1.0 / p) * (1.0 / p + a) / (1.0 + a));
      out.cost = p * iterations;
      break;
    }
    case ComplexityKind::kRandK: {
      if (d < 1) throw ParameterError("ComplexitySummary: d must be >= 1");
      const double k = std::ceil(static_cast<double>(d) / std::sqrt(kappa));
      out.parameter = k;
      out.cost = k * kappa + static_cast<double>(d) * d / k;
      break;
    }
  }
  return out;
}

}  // namespace randprox
