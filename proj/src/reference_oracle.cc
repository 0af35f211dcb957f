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

#include "randprox/reference_oracle.h"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "randprox/rng.h"
#include "randprox/solvers.h"

namespace randprox {
namespace {

constexpr int64_t kMaxEnumerationDim = 10;

Vector SolveMinNorm(const Matrix& m, const Vector& rhs) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(m);
  return cod.solve(rhs);
}

// Block averaging projector of a layout, as a dense matrix.
Matrix AveragingProjector(const BlockLayout& l) {
  const int64_t n = l.num_blocks;
  const int64_t d = l.block_dim;
  Matrix p = Matrix::Zero(l.size(), l.size());
  for (int64_t i = 0; i < n; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      p.block(i * d, j * d, d, d) =
          Matrix::Identity(d, d) / static_cast<double>(n);
    }
  }
  return p;
}

double Objective(const QuadraticModel& m, const Vector& x) {
  double value = 0.5 * x.dot(m.hessian * x) - m.linear.dot(x);
  if (m.g_weight > 0.0) {
    value += 0.5 * m.g_weight * (x - m.g_center).squaredNorm();
  }
  switch (m.h_kind) {
    case PenaltyKind::kQuadratic: {
      const Vector r = m.k_matrix * x - m.h_target;
      value += 0.5 * r.dot(m.h_hessian * r);
      break;
    }
    case PenaltyKind::kPersonalization: {
      const Vector r = x - AveragingProjector(*m.blocks) * x;
      value += 0.5 * m.h_weight * r.squaredNorm();
      break;
    }
    case PenaltyKind::kL1:
      value += m.h_weight * x.lpNorm<1>();
      break;
    default:
      break;
  }
  return value;
}

OracleSolution SolveL1(const Matrix& q_mat, const Vector& q, double w) {
  const int64_t d = q.size();
  if (d > kMaxEnumerationDim) {
    throw OracleUnavailableError("l1 enumeration is limited to dimension " +
                                 std::to_string(kMaxEnumerationDim));
  }
  int64_t patterns = 1;
  for (int64_t i = 0; i < d; ++i) patterns *= 3;
  std::vector<int> sign(d);
  for (int64_t code = 0; code < patterns; ++code) {
    int64_t c = code;
    std::vector<int64_t> free;
    for (int64_t i = 0; i < d; ++i) {
      sign[i] = static_cast<int>(c % 3) - 1;
      c /= 3;
      if (sign[i] != 0) free.push_back(i);
    }
    Vector x = Vector::Zero(d);
    if (!free.empty()) {
      const int64_t f = static_cast<int64_t>(free.size());
      Matrix qff(f, f);
      Vector rhs(f);
      for (int64_t a = 0; a < f; ++a) {
        rhs[a] = q[free[a]] - w * sign[free[a]];
        for (int64_t b = 0; b < f; ++b) qff(a, b) = q_mat(free[a], free[b]);
      }
      const Vector xf = qff.ldlt().solve(rhs);
      for (int64_t a = 0; a < f; ++a) x[free[a]] = xf[a];
    }
    const Vector u = q - q_mat * x;
    bool ok = true;
    for (int64_t i = 0; i < d && ok; ++i) {
      if (sign[i] == 0) {
        ok = std::abs(u[i]) <= w * (1.0 + 1e-12);
      } else {
        ok = sign[i] * x[i] > 0.0;
      }
    }
    if (ok) {
      OracleSolution s;
      s.x_star = x;
      s.u_star = u;
      s.method = OracleMethod::kDenseEnumeration;
      return s;
    }
  }
  throw OracleUnavailableError("l1 enumeration found no sign pattern");
}

}  // namespace

const char* OracleMethodName(OracleMethod m) {
  switch (m) {
    case OracleMethod::kKktSolve: return "kkt-solve";
    case OracleMethod::kDenseEnumeration: return "dense-enumeration";
    case OracleMethod::kLongDeterministicRun: return "long-deterministic-run";
  }
  return "unknown";
}

OracleSolution KktSolveQuadratic(const QuadraticModel& m) {
  const int64_t d = m.hessian.rows();
  if (m.hessian.cols() != d || m.linear.size() != d) {
    throw ShapeError("KktSolveQuadratic: inconsistent f");
  }
  Matrix q_mat = m.hessian;
  Vector q = m.linear;
  if (m.g_weight > 0.0) {
    CheckSameSize(m.g_center, d, "KktSolveQuadratic(g center)");
    q_mat.diagonal().array() += m.g_weight;
    q += m.g_weight * m.g_center;
  }
  OracleSolution s;
  s.method = OracleMethod::kKktSolve;
  switch (m.h_kind) {
    case PenaltyKind::kZero:
      s.x_star = SolveMinNorm(q_mat, q);
      s.u_star = Vector::Zero(m.k_matrix.rows() > 0 ? m.k_matrix.rows() : d);
      break;
    case PenaltyKind::kQuadratic:
    case PenaltyKind::kPersonalization: {
      Matrix k = m.k_matrix;
      Matrix h;
      Vector t;
      if (m.h_kind == PenaltyKind::kQuadratic) {
        h = m.h_hessian;
        t = m.h_target;
      } else {
        if (!m.blocks) throw ShapeError("KktSolveQuadratic: missing blocks");
        k = Matrix::Identity(d, d);
        h = m.h_weight *
            (Matrix::Identity(d, d) - AveragingProjector(*m.blocks));
        t = Vector::Zero(d);
      }
      s.x_star = SolveMinNorm(q_mat + k.transpose() * h * k,
                              q + k.transpose() * (h * t));
      s.u_star = h * (k * s.x_star - t);
      break;
    }
    case PenaltyKind::kPointIndicator: {
      const Matrix& k = m.k_matrix;
      const int64_t rows = k.rows();
      Matrix kkt = Matrix::Zero(d + rows, d + rows);
      kkt.topLeftCorner(d, d) = q_mat;
      kkt.topRightCorner(d, rows) = k.transpose();
      kkt.bottomLeftCorner(rows, d) = k;
      Vector rhs(d + rows);
      rhs << q, m.h_target;
      const Vector sol = SolveMinNorm(kkt, rhs);
      s.x_star = sol.head(d);
      s.u_star = sol.tail(rows);
      break;
    }
    case PenaltyKind::kConsensus: {
      if (!m.blocks) throw ShapeError("KktSolveQuadratic: missing blocks");
      const BlockLayout& l = *m.blocks;
      Matrix e = Matrix::Zero(l.size(), l.block_dim);
      for (int64_t i = 0; i < l.num_blocks; ++i) {
        e.block(i * l.block_dim, 0, l.block_dim, l.block_dim).setIdentity();
      }
      const Vector z = SolveMinNorm(e.transpose() * q_mat * e,
                                    e.transpose() * q);
      s.x_star = e * z;
      s.u_star = q - q_mat * s.x_star;
      break;
    }
    case PenaltyKind::kL1:
      s = SolveL1(q_mat, q, m.h_weight);
      break;
  }
  s.objective = Objective(m, s.x_star);
  return s;
}

OracleSolution KktSolveQuadratic(const PrimalDualProblem& p) {
  if (!p.quadratic) {
    throw OracleUnavailableError(p.name +
                                 ": not in the quadratic/affine family");
  }
  return KktSolveQuadratic(*p.quadratic);
}

OracleSolution LongDeterministicRun(const PrimalDualProblem& p,
                                    int64_t iterations) {
  if (p.quadratic) {
    throw UsageError(p.name + ": quadratic problems use the KKT oracle");
  }
  SolverConfig cfg =
      MakeConfig(p, Algorithm::kPddy, RandomEstimator::Identity());
  cfg.record_trace = false;
  const Trace trace =
      Run(p, cfg, Algorithm::kPddy, {iterations, 1e-12});
  if (!(trace.final_residual <= kKnownSolutionTolerance)) {
    throw OracleUnavailableError(p.name +
                                 ": long run missed the residual gate");
  }
  OracleSolution s;
  s.x_star = trace.final_state.x;
  s.u_star = trace.final_state.u;
  s.objective = p.f.value ? p.f.value(s.x_star)
                          : std::numeric_limits<double>::quiet_NaN();
  s.method = OracleMethod::kLongDeterministicRun;
  return s;
}

double FiniteDiffCheck(const SmoothOracle& f, const Vector& x, double h) {
  if (!(h >= 1e-8 && h <= 1e-3)) {
    throw ParameterError("FiniteDiffCheck: h must be in [1e-8, 1e-3]");
  }
  if (!f.value) throw UsageError("FiniteDiffCheck: f has no value oracle");
  const Vector g = f.grad(x);
  double worst = 0.0;
  Vector y = x;
  for (int64_t i = 0; i < x.size(); ++i) {
    y[i] = x[i] + h;
    const double plus = f.value(y);
    y[i] = x[i] - h;
    const double minus = f.value(y);
    y[i] = x[i];
    worst = std::max(worst, std::abs((plus - minus) / (2.0 * h) - g[i]));
  }
  return worst;
}

ContractionProbe ConditionalContractionProbe(const PrimalDualProblem& p,
                                             const SolverConfig& cfg,
                                             Algorithm alg,
                                             const SolverState& state,
                                             int64_t draws, TheoremId theorem,
                                             uint64_t seed) {
  if (draws < 10000) {
    throw ParameterError("ConditionalContractionProbe: draws must be >= 10^4");
  }
  if (!p.known_solution) {
    throw DiagnosticsUnavailableError(p.name + ": no known solution");
  }
  const RateReport rate = RateFor(theorem, p, cfg);
  ContractionProbe out;
  out.c = rate.c;
  out.psi = Lyapunov(theorem, p, cfg, state);
  out.bound = out.c * out.psi;
  out.draws = draws;
  double sum = 0.0;
  double sum_sq = 0.0;
  SolverConfig probe = cfg;
  for (int64_t j = 0; j < draws; ++j) {
    probe.seed = SplitMix64(seed ^ SplitMix64(static_cast<uint64_t>(j)));
    const EstimatorDraw draw = NextDraw(p, probe, alg, state);
    const double psi = Lyapunov(theorem, p, cfg, Step(p, cfg, alg, state, draw));
    sum += psi;
    sum_sq += psi * psi;
  }
  const double n = static_cast<double>(draws);
  out.mean_psi_next = sum / n;
  const double var =
      std::max(0.0, (sum_sq - n * out.mean_psi_next * out.mean_psi_next) /
                        (n - 1.0));
  out.std_error = std::sqrt(var / n);
  return out;
}

double ExactNextPsiExpectation(const PrimalDualProblem& p,
                               const SolverConfig& cfg, Algorithm alg,
                               const SolverState& state, TheoremId theorem) {
  std::vector<std::pair<double, EstimatorDraw>> outcomes;
  if (alg == Algorithm::kPddy) {
    outcomes.push_back({1.0, EstimatorDraw{}});
  } else if (alg == Algorithm::kPointSaga) {
    outcomes = RandomEstimator::RandKBlocks(
                   1, p.structure.dual_blocks->num_blocks)
                   .EnumerateOutcomes(state.t);
  } else {
    outcomes = cfg.estimator.EnumerateOutcomes(state.t, state.coin_history);
  }
  double expectation = 0.0;
  for (const auto& [prob, draw] : outcomes) {
    expectation +=
        prob * Lyapunov(theorem, p, cfg, Step(p, cfg, alg, state, draw));
  }
  return expectation;
}

}  // namespace randprox
