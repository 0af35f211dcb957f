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

#include "randprox/experiments.h"

#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include "randprox/rng.h"

namespace randprox {
namespace {

// Below this fraction of Psi^0 a squared distance is no longer resolved in
// double precision, so the predicted bound is floored there.
constexpr double kResolvableFraction = 1e-20;

struct TrialPsi {
  std::vector<double> psi;
  std::vector<SolverState> captured;
};

void MeanAndError(const std::vector<std::vector<double>>& by_trial,
                  std::vector<double>* mean, std::vector<double>* se) {
  const size_t len = by_trial.front().size();
  const double n = static_cast<double>(by_trial.size());
  mean->assign(len, 0.0);
  se->assign(len, 0.0);
  for (size_t t = 0; t < len; ++t) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& row : by_trial) {
      sum += row[t];
      sum_sq += row[t] * row[t];
    }
    (*mean)[t] = sum / n;
    if (n > 1.0) {
      const double var =
          std::max(0.0, (sum_sq - n * (*mean)[t] * (*mean)[t]) / (n - 1.0));
      (*se)[t] = std::sqrt(var / n);
    }
  }
}

}  // namespace

uint64_t TrialSeed(uint64_t seed, int64_t trial) {
  return SplitMix64(seed ^ SplitMix64(static_cast<uint64_t>(trial)));
}

CertifyReport Certify(const PrimalDualProblem& p, const SolverConfig& cfg,
                      Algorithm alg, TheoremId theorem,
                      const CertifyOptions& options) {
  if (options.trials < 1) throw ParameterError("certify: trials must be >= 1");
  if (options.iterations < 1) {
    throw ParameterError("certify: iterations must be >= 1");
  }
  if (!p.known_solution) {
    throw UsageError(p.name + ": certification needs a known solution");
  }
  CertifyReport report;
  report.theorem = theorem;
  report.rate = RateFor(theorem, p, cfg);
  const double c = report.rate.c;

  // States of the first trial at which the conditional probe runs.
  std::set<int64_t> probe_times;
  {
    Rng rng(options.seed, 0x70726f6265ULL);
    for (int64_t i = 0; i < options.probe_states; ++i) {
      probe_times.insert(rng.UniformInt(options.iterations));
    }
  }

  const std::function<TrialPsi(int64_t)> run_trial = [&](int64_t trial) {
    SolverConfig tc = cfg;
    tc.seed = TrialSeed(options.seed, trial);
    tc.record_trace = true;
    TrialPsi out;
    RunOptions ro;
    ro.lyapunov = theorem;
    if (trial == 0 && options.probe_states > 0) {
      ro.observer = [&](const SolverState& s) {
        if (probe_times.count(s.t)) out.captured.push_back(s);
      };
    }
    const Trace trace = Run(p, tc, alg, {options.iterations, 0.0}, ro);
    for (const TraceRow& row : trace.rows) {
      if (!row.psi) {
        throw DiagnosticsUnavailableError(p.name + ": Psi is not available");
      }
      out.psi.push_back(*row.psi);
    }
    return out;
  };
  std::vector<TrialPsi> trials = ParallelMap(options.trials, run_trial);

  std::vector<std::vector<double>> by_trial;
  for (const TrialPsi& tp : trials) by_trial.push_back(tp.psi);
  MeanAndError(by_trial, &report.mean_psi, &report.se_psi);

  const double psi0 = report.mean_psi.front();
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < report.mean_psi.size(); ++t) {
    const double ct =
        std::max(std::pow(c, static_cast<double>(t)), kResolvableFraction);
    const double scale = ct * psi0;
    const double bound = scale * (1.0 + options.rel_slack) +
                         options.sigmas * report.se_psi[t];
    const double margin =
        scale > 0.0 ? (bound - report.mean_psi[t]) / scale
                    : (report.mean_psi[t] <= bound ? 0.0 : -1.0);
    // A diverged run gives NaN, which must not compare as a pass.
    if (std::isnan(margin)) {
      report.worst_margin = -std::numeric_limits<double>::infinity();
      report.worst_t = static_cast<int64_t>(t);
      break;
    }
    if (margin < report.worst_margin) {
      report.worst_margin = margin;
      report.worst_t = static_cast<int64_t>(t);
    }
  }
  report.trajectory_passed = report.worst_margin >= 0.0;

  for (size_t i = 0; i < trials.front().captured.size(); ++i) {
    const SolverState& s = trials.front().captured[i];
    // A state already at the solution up to rounding says nothing.
    if (Lyapunov(theorem, p, cfg, s) < kResolvableFraction * psi0) continue;
    ContractionProbe probe = ConditionalContractionProbe(
        p, cfg, alg, s, options.probe_draws, theorem,
        TrialSeed(options.seed ^ 0x5eedULL, static_cast<int64_t>(i)));
    report.probes_passed = report.probes_passed && probe.Passes(options.sigmas);
    report.probes.push_back(probe);
  }
  report.passed = report.trajectory_passed && report.probes_passed;
  return report;
}

ConvexBenchReport ConvexBench(const PrimalDualProblem& p,
                              const SolverConfig& cfg, Algorithm alg,
                              int64_t iterations, int64_t trials,
                              uint64_t seed) {
  if (iterations < 1 || trials < 1) {
    throw ParameterError("convex-bench: iterations and trials must be >= 1");
  }
  if (!p.known_solution) {
    throw UsageError(p.name + ": convex bench needs a known solution");
  }
  if (!p.f.value) throw UsageError(p.name + ": f has no value oracle");
  ValidateConfig(p, cfg, alg);
  const double L = p.L_f();
  if (!(L > 0.0)) throw UsageError(p.name + ": convex bench needs L_f > 0");

  ConvexBenchReport report;
  report.strongly_convex_warning = p.mu_f() > 0.0 || p.mu_g() > 0.0;
  const Vector& x_star = p.known_solution->x_star;
  const Vector& u_star = p.known_solution->u_star;
  const Vector grad_star = p.f.grad(x_star);
  const double f_star = p.f.value(x_star);
  const auto [wx, wu] = LyapunovWeights(TheoremId::kT1, p, cfg);
  {
    const SolverState s0 = InitialState(p, cfg, alg);
    report.psi0 = wx * (s0.x - x_star).squaredNorm() +
                  wu * (s0.u - u_star).squaredNorm();
  }

  struct TrialOut {
    std::vector<double> bregman_avg;
    std::vector<double> dual_dist;
    double final_bregman = 0.0;
    bool cocoercive = true;
  };
  const std::function<TrialOut(int64_t)> run_trial = [&](int64_t trial) {
    SolverConfig tc = cfg;
    tc.seed = TrialSeed(seed, trial);
    tc.record_trace = false;
    TrialOut out;
    Vector sum = Vector::Zero(p.primal_dim());
    RunOptions ro;
    ro.observer = [&](const SolverState& s) {
      out.dual_dist.push_back((s.u - u_star).squaredNorm());
      const double fx = p.f.value(s.x);
      const double d = Bregman(p.f, s.x, x_star);
      const double g = (p.f.grad(s.x) - grad_star).squaredNorm() / (2.0 * L);
      const double tol =
          1e-12 * (1.0 + std::abs(fx) + std::abs(f_star));
      if (d + tol < g) out.cocoercive = false;
      out.final_bregman = d;
      if (s.t >= 1) {
        sum += s.x;
        out.bregman_avg.push_back(
            Bregman(p.f, sum / static_cast<double>(s.t), x_star));
      }
    };
    Run(p, tc, alg, {iterations, 0.0}, ro);
    return out;
  };
  const std::vector<TrialOut> outs = ParallelMap(trials, run_trial);

  const double n = static_cast<double>(trials);
  report.mean_bregman_avg.assign(iterations, 0.0);
  report.mean_dual_dist_sq.assign(iterations + 1, 0.0);
  report.cocoercivity_holds = true;
  for (const TrialOut& o : outs) {
    for (int64_t t = 0; t < iterations; ++t) {
      report.mean_bregman_avg[t] += o.bregman_avg[t] / n;
    }
    for (int64_t t = 0; t <= iterations; ++t) {
      report.mean_dual_dist_sq[t] += o.dual_dist[t] / n;
    }
    report.final_bregman += o.final_bregman / n;
    report.cocoercivity_holds = report.cocoercivity_holds && o.cocoercive;
  }
  report.bound_holds = true;
  for (int64_t t = 1; t <= iterations; ++t) {
    const double b = ErgodicBound(report.psi0, cfg.gamma, L, t);
    report.bound.push_back(b);
    // Rounding in D_f itself is of order eps |f|.
    const double tol = 1e-12 * (1.0 + std::abs(f_star));
    if (report.mean_bregman_avg[t - 1] > b + tol) report.bound_holds = false;
  }
  return report;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void WriteTraceCsv(std::ostream& out, const Trace& trace,
                   const std::vector<std::pair<std::string, std::string>>&
                       header) {
  for (const auto& [key, value] : header) {
    out << "# " << key << ": " << value << "\n";
  }
  out << "t,psi,dist_x_sq,dist_u_sq,bregman,prox_h_calls,floats_comm\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? FormatDouble(*v) : std::string();
  };
  for (const TraceRow& r : trace.rows) {
    out << r.t << ',' << opt(r.psi) << ',' << opt(r.dist_x_sq) << ','
        << opt(r.dist_u_sq) << ',' << opt(r.bregman) << ',' << r.prox_h_calls
        << ',' << r.floats_comm << "\n";
  }
}

}  // namespace randprox
