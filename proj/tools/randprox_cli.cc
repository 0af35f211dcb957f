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

// randprox: command line front end.
//
//   randprox solve | certify | rates | estimator-check | fl-sim | convex-bench
//
// Every subcommand accepts --config FILE with one "key = value" per line,
// keys being long flag names. Flags given on the command line win. Output is
// CSV with "# key: value" header lines; it goes to --output, else to
// $RANDPROX_OUTPUT_DIR/<subcommand>.csv, else to stdout.
//
// Exit codes: 0 success, 1 check failed, 2 bad configuration, 3 theorem not
// applicable.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "randprox/catalog.h"
#include "randprox/experiments.h"
#include "randprox/flsim.h"
#include "randprox/rates.h"
#include "randprox/rng.h"
#include "randprox/solvers.h"

namespace randprox {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInapplicable = 3;

using Header = std::vector<std::pair<std::string, std::string>>;

struct ProblemArgs {
  std::string variant = "plain";
  int64_t dim = 10;
  double mu = 0.1;
  double L = 10.0;
  uint64_t problem_seed = 1;
  int64_t blocks = 4;
  double penalty = 1.0;
  double g_weight = 0.0;
  int64_t rows = 0;
  bool zero_f = false;
  bool identity_k = false;
  bool shift = false;
  bool gram = false;
};

struct SolverArgs {
  std::string algorithm = "pddy";
  std::string estimator = "identity";
  std::optional<double> gamma;
  std::optional<double> tau;
  std::optional<double> relaxation;
  std::optional<double> claimed_omega;
  bool allow_large_gamma = false;
  int64_t iterations = 1000;
  uint64_t seed = 0;
};

void AddProblemOptions(CLI::App* app, ProblemArgs* a) {
  app->add_option("--problem", a->variant, "catalog problem variant")
      ->capture_default_str();
  app->add_option("--dim", a->dim, "primal dimension")->capture_default_str();
  app->add_option("--mu", a->mu, "smallest curvature of f")
      ->capture_default_str();
  app->add_option("--L", a->L, "largest curvature of f")
      ->capture_default_str();
  app->add_option("--problem-seed", a->problem_seed, "problem generator seed")
      ->capture_default_str();
  app->add_option("--blocks", a->blocks, "blocks of product-space variants")
      ->capture_default_str();
  app->add_option("--penalty", a->penalty, "lambda or l1 weight")
      ->capture_default_str();
  app->add_option("--g-weight", a->g_weight, "weight of g; 0 means g = 0")
      ->capture_default_str();
  app->add_option("--rows", a->rows, "rows of K; 0 picks dim/2")
      ->capture_default_str();
  app->add_flag("--zero-f", a->zero_f, "composite variant without f");
  app->add_flag("--identity-k", a->identity_k, "composite variant with K = Id");
  app->add_flag("--shift", a->shift,
                "finite-sum variant with strong convexity moved into g");
  app->add_flag("--gram", a->gram,
                "rewrite a linear constraint through W = K*K");
}

void AddSolverOptions(CLI::App* app, SolverArgs* a) {
  app->add_option("--algorithm", a->algorithm, "algorithm name")
      ->capture_default_str();
  app->add_option("--estimator", a->estimator, "estimator spec")
      ->capture_default_str();
  app->add_option("--gamma", a->gamma, "primal step; default 1/L");
  app->add_option("--tau", a->tau, "dual step; default per algorithm");
  app->add_option("--relaxation", a->relaxation, "dual relaxation rho");
  app->add_option("--claimed-omega", a->claimed_omega,
                  "omega told to the algorithm instead of the true one");
  app->add_flag("--allow-large-gamma", a->allow_large_gamma,
                "accept gamma >= 2/L when g is strongly convex");
  app->add_option("--iterations", a->iterations, "iterations")
      ->capture_default_str();
  app->add_option("--seed", a->seed, "run seed")->capture_default_str();
}

PrimalDualProblem BuildProblem(const ProblemArgs& a, Algorithm alg) {
  QuadraticProblemOptions o;
  o.variant = ParseVariant(a.variant);
  o.dim = a.dim;
  o.mu = a.mu;
  o.L = a.L;
  o.seed = a.problem_seed;
  o.num_blocks = a.blocks;
  o.penalty = a.penalty;
  o.g_weight = a.g_weight;
  o.rows = a.rows;
  o.zero_f = a.zero_f;
  o.identity_k = a.identity_k;
  o.shift_strong_convexity = a.shift;
  PrimalDualProblem p = MakeQuadraticProblem(o);
  if (a.gram || alg == Algorithm::kPriLiCo) p = MakeGramProblem(p);
  return p;
}

SolverConfig BuildConfig(const PrimalDualProblem& p, const SolverArgs& a,
                         Algorithm alg) {
  SolverConfig cfg = MakeConfig(p, alg, RandomEstimator::Parse(a.estimator),
                                a.gamma, a.tau);
  cfg.iterations = a.iterations;
  cfg.seed = a.seed;
  cfg.relaxation = a.relaxation;
  cfg.claimed_omega = a.claimed_omega;
  cfg.allow_large_gamma = a.allow_large_gamma;
  if (a.claimed_omega && !a.tau) {
    // The default tau follows the omega the algorithm is told.
    const EstimatorParams ep = EffectiveParams(cfg, p.K);
    cfg.tau = DefaultTau(cfg.gamma, p.K, ep);
  }
  CheckShape(p, cfg, alg);
  ValidateConfig(p, cfg, alg);
  return cfg;
}

Header ConfigHeader(const std::string& command, const ProblemArgs* pa,
                    const SolverArgs* sa, const SolverConfig* cfg) {
  Header h = {{"tool", "randprox"},
              {"version", kVersion},
              {"command", command}};
  if (pa) {
    h.push_back({"problem", pa->variant});
    h.push_back({"dim", std::to_string(pa->dim)});
    h.push_back({"mu", FormatDouble(pa->mu)});
    h.push_back({"L", FormatDouble(pa->L)});
    h.push_back({"problem_seed", std::to_string(pa->problem_seed)});
    h.push_back({"blocks", std::to_string(pa->blocks)});
    h.push_back({"penalty", FormatDouble(pa->penalty)});
    h.push_back({"g_weight", FormatDouble(pa->g_weight)});
    h.push_back({"rows", std::to_string(pa->rows)});
    h.push_back({"zero_f", pa->zero_f ? "true" : "false"});
    h.push_back({"identity_k", pa->identity_k ? "true" : "false"});
    h.push_back({"shift", pa->shift ? "true" : "false"});
    h.push_back({"gram", pa->gram ? "true" : "false"});
  }
  if (sa && cfg) {
    h.push_back({"algorithm", sa->algorithm});
    h.push_back({"estimator", cfg->estimator.spec()});
    h.push_back({"omega", FormatDouble(cfg->estimator.omega())});
    h.push_back({"gamma", FormatDouble(cfg->gamma)});
    h.push_back({"tau", FormatDouble(cfg->tau)});
    h.push_back({"relaxation", cfg->relaxation
                                   ? FormatDouble(*cfg->relaxation)
                                   : std::string("default")});
    h.push_back({"claimed_omega", cfg->claimed_omega
                                      ? FormatDouble(*cfg->claimed_omega)
                                      : std::string("none")});
    h.push_back(
        {"allow_large_gamma", cfg->allow_large_gamma ? "true" : "false"});
    h.push_back({"iterations", std::to_string(cfg->iterations)});
    h.push_back({"seed", std::to_string(cfg->seed)});
  }
  return h;
}

void AppendRate(Header* h, const RateReport& r) {
  h->push_back({"theorem", TheoremName(r.theorem)});
  h->push_back({"c", FormatDouble(r.c)});
  std::string branches;
  for (double b : r.branch_values) {
    if (!branches.empty()) branches += ';';
    branches += FormatDouble(b);
  }
  h->push_back({"branches", branches});
  h->push_back({"primal_weight", FormatDouble(r.primal_weight)});
  h->push_back({"dual_weight", FormatDouble(r.dual_weight)});
}

// Destination of the CSV of one subcommand.
class Output {
 public:
  Output(const std::string& command, const std::string& path) {
    std::string target = path;
    if (target.empty()) {
      if (const char* dir = std::getenv("RANDPROX_OUTPUT_DIR");
          dir && *dir) {
        target = std::string(dir) + "/" + command + ".csv";
      }
    }
    if (!target.empty()) {
      file_ = std::make_unique<std::ofstream>(target);
      if (!*file_) throw UsageError("cannot open output file '" + target + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void WriteHeader(std::ostream& out, const Header& h) {
  for (const auto& [key, value] : h) out << "# " << key << ": " << value << "\n";
}

int CmdSolve(const ProblemArgs& pa, const SolverArgs& sa, double residual_tol,
             const std::string& output) {
  const Algorithm alg = ParseAlgorithm(sa.algorithm);
  const PrimalDualProblem p = BuildProblem(pa, alg);
  SolverConfig cfg = BuildConfig(p, sa, alg);
  cfg.record_trace = true;
  Header h = ConfigHeader("solve", &pa, &sa, &cfg);
  h.push_back({"residual_tol", FormatDouble(residual_tol)});
  const TheoremId theorem = MatchingTheorem(alg, p);
  bool applicable = true;
  try {
    AppendRate(&h, RateFor(theorem, p, cfg));
  } catch (const RateUnavailableError& e) {
    applicable = false;
    h.push_back({"theorem", std::string(TheoremName(theorem)) +
                                " (not applicable)"});
    std::cerr << "warning: " << e.what()
              << "; Lyapunov column left empty\n";
  }
  Trace trace = Run(p, cfg, alg, {cfg.iterations, residual_tol});
  if (!applicable) {
    for (TraceRow& row : trace.rows) row.psi.reset();
  }
  h.push_back({"final_residual", FormatDouble(trace.final_residual)});
  Output out("solve", output);
  WriteTraceCsv(out.stream(), trace, h);
  return kExitOk;
}

int CmdCertify(const ProblemArgs& pa, const SolverArgs& sa,
               const std::string& theorem_name, const CertifyOptions& co_in,
               const std::string& output) {
  const Algorithm alg = ParseAlgorithm(sa.algorithm);
  const PrimalDualProblem p = BuildProblem(pa, alg);
  const SolverConfig cfg = BuildConfig(p, sa, alg);
  const TheoremId theorem = theorem_name.empty()
                                ? MatchingTheorem(alg, p)
                                : ParseTheorem(theorem_name);
  CertifyOptions co = co_in;
  co.iterations = cfg.iterations;
  co.seed = cfg.seed;
  const CertifyReport r = Certify(p, cfg, alg, theorem, co);
  Header h = ConfigHeader("certify", &pa, &sa, &cfg);
  h.push_back({"trials", std::to_string(co.trials)});
  AppendRate(&h, r.rate);
  h.push_back({"worst_margin", FormatDouble(r.worst_margin)});
  h.push_back({"worst_t", std::to_string(r.worst_t)});
  h.push_back({"trajectory", r.trajectory_passed ? "pass" : "fail"});
  for (size_t i = 0; i < r.probes.size(); ++i) {
    const ContractionProbe& pr = r.probes[i];
    h.push_back({"probe_" + std::to_string(i),
                 "psi=" + FormatDouble(pr.psi) +
                     " mean_next=" + FormatDouble(pr.mean_psi_next) +
                     " bound=" + FormatDouble(pr.bound) +
                     " se=" + FormatDouble(pr.std_error) +
                     (pr.Passes(co.sigmas) ? " pass" : " fail")});
  }
  h.push_back({"result", r.passed ? "pass" : "fail"});
  Output out("certify", output);
  std::ostream& os = out.stream();
  WriteHeader(os, h);
  os << "t,mean_psi,se_psi,bound\n";
  const double psi0 = r.mean_psi.front();
  double ct = 1.0;
  for (size_t t = 0; t < r.mean_psi.size(); ++t) {
    os << t << ',' << FormatDouble(r.mean_psi[t]) << ','
       << FormatDouble(r.se_psi[t]) << ',' << FormatDouble(ct * psi0) << "\n";
    ct *= r.rate.c;
  }
  std::cerr << "certify " << TheoremName(theorem) << ": "
            << (r.passed ? "PASS" : "FAIL") << " c=" << FormatDouble(r.rate.c)
            << " worst_margin=" << FormatDouble(r.worst_margin)
            << " at t=" << r.worst_t << ", probes "
            << (r.probes_passed ? "pass" : "fail") << "\n";
  return r.passed ? kExitOk : kExitFail;
}

struct RawRateArgs {
  std::string theorem;
  std::optional<double> gamma;
  std::optional<double> L;
  std::optional<double> mu;
  double omega = 0.0;
  double mu_hc = 0.0;
};

int CmdRates(const RawRateArgs& ra, const ProblemArgs& pa,
             const SolverArgs& sa, bool from_problem,
             const std::string& output) {
  RateReport r;
  Header h;
  if (from_problem) {
    const Algorithm alg = ParseAlgorithm(sa.algorithm);
    const PrimalDualProblem p = BuildProblem(pa, alg);
    const SolverConfig cfg = BuildConfig(p, sa, alg);
    const TheoremId id =
        ra.theorem.empty() ? MatchingTheorem(alg, p) : ParseTheorem(ra.theorem);
    h = ConfigHeader("rates", &pa, &sa, &cfg);
    r = RateFor(id, p, cfg);
  } else {
    if (ra.theorem.empty()) {
      throw UsageError("rates: --theorem is required without --problem");
    }
    const TheoremId id = ParseTheorem(ra.theorem);
    if (!ra.gamma || !ra.L || !ra.mu) {
      throw UsageError("rates: --gamma, --L and --mu are required");
    }
    h = ConfigHeader("rates", nullptr, nullptr, nullptr);
    h.push_back({"gamma", FormatDouble(*ra.gamma)});
    h.push_back({"L", FormatDouble(*ra.L)});
    h.push_back({"mu", FormatDouble(*ra.mu)});
    h.push_back({"omega", FormatDouble(ra.omega)});
    h.push_back({"mu_hc", FormatDouble(ra.mu_hc)});
    switch (id) {
      case TheoremId::kT3:
        r = RateThm3(*ra.gamma, *ra.mu, *ra.L, ra.mu_hc, ra.omega);
        break;
      case TheoremId::kT10:
        r = RateThm10(*ra.gamma, *ra.mu, *ra.L, ra.omega);
        break;
      case TheoremId::kL1:
        r = RateLemma1(*ra.gamma, *ra.mu, *ra.L);
        break;
      default:
        throw UsageError(std::string("rates: ") + TheoremName(id) +
                         " needs a problem (--problem)");
    }
  }
  Output out("rates", output);
  std::ostream& os = out.stream();
  WriteHeader(os, h);
  os << "theorem,c,branches,primal_weight,dual_weight\n";
  std::string branches;
  for (double b : r.branch_values) {
    if (!branches.empty()) branches += ';';
    branches += FormatDouble(b);
  }
  os << TheoremName(r.theorem) << ',' << FormatDouble(r.c) << ',' << branches
     << ',' << FormatDouble(r.primal_weight) << ','
     << FormatDouble(r.dual_weight) << "\n";
  return kExitOk;
}

int CmdEstimatorCheck(const std::string& spec, int64_t draws, uint64_t seed,
                      int64_t dim, int64_t block_dim, double sigmas,
                      const std::string& output) {
  const RandomEstimator e = RandomEstimator::Parse(spec);
  int64_t size = dim;
  switch (e.kind()) {
    case EstimatorKind::kRandK:
      size = e.d();
      break;
    case EstimatorKind::kRandKBlocks:
      size = e.n() * block_dim;
      break;
    case EstimatorKind::kSharedRandK:
      size = e.n() * e.d();
      break;
    default:
      break;
  }
  Rng rng(seed, 0x72ULL);
  const Vector r = rng.NormalVector(size);
  const EstimatorStats s =
      EmpiricalEstimatorStats(e, r, LinearMap::Identity(size), draws, seed);
  const double omega = e.omega();
  const EstimatorParams params = e.Params(LinearMap::Identity(size));
  const bool unbiased = s.mean_error_norm <= sigmas * s.mean_error_se + 1e-12;
  const bool variance_ok =
      s.variance_ratio <= omega * (1.0 + 1e-12) + sigmas * s.variance_ratio_se;
  const bool range_ok = s.range_slack >= -sigmas * s.range_slack_se - 1e-12;
  Header h = ConfigHeader("estimator-check", nullptr, nullptr, nullptr);
  h.push_back({"estimator", e.spec()});
  h.push_back({"draws", std::to_string(draws)});
  h.push_back({"seed", std::to_string(seed)});
  h.push_back({"dim", std::to_string(size)});
  h.push_back({"K", "identity"});
  h.push_back({"sigmas", FormatDouble(sigmas)});
  Output out("estimator-check", output);
  std::ostream& os = out.stream();
  WriteHeader(os, h);
  os << "estimator,omega,omega_hat,omega_hat_se,mean_error_norm,"
        "mean_error_se,omega_ran,zeta,omega_ran_hat,omega_ran_hat_se,"
        "unbiased,variance_ok,range_ok\n";
  os << '"' << e.spec() << '"' << ',' << FormatDouble(omega) << ','
     << FormatDouble(s.variance_ratio) << ','
     << FormatDouble(s.variance_ratio_se) << ','
     << FormatDouble(s.mean_error_norm) << ','
     << FormatDouble(s.mean_error_se) << ','
     << FormatDouble(params.omega_ran) << ',' << FormatDouble(params.zeta)
     << ',' << FormatDouble(s.omega_ran_hat) << ','
     << FormatDouble(s.omega_ran_hat_se) << ','
     << (unbiased ? "true" : "false") << ','
     << (variance_ok ? "true" : "false") << ','
     << (range_ok ? "true" : "false") << "\n";
  return unbiased && variance_ok && range_ok ? kExitOk : kExitFail;
}

int CmdFlSim(const std::string& kind_name, const std::vector<double>& kappas,
             int64_t trials, uint64_t seed, const SweepOptions& so,
             const std::string& output) {
  const SweepKind kind = ParseSweepKind(kind_name);
  const SweepResult r = KappaSweep(kind, kappas, trials, seed, so);
  Header h = ConfigHeader("fl-sim", nullptr, nullptr, nullptr);
  h.push_back({"kind", SweepKindName(kind)});
  h.push_back({"nodes", std::to_string(so.n)});
  h.push_back({"d", std::to_string(so.d)});
  h.push_back({"eps", FormatDouble(so.target_eps)});
  h.push_back({"max_rounds", std::to_string(so.max_rounds)});
  h.push_back({"trials", std::to_string(trials)});
  h.push_back({"seed", std::to_string(seed)});
  h.push_back({"cost", kind == SweepKind::kScaffnew ? "communicating rounds"
                                                     : "uplink floats"});
  if (r.rows.size() >= 2) h.push_back({"slope", FormatDouble(r.slope)});
  Output out("fl-sim", output);
  std::ostream& os = out.stream();
  WriteHeader(os, h);
  os << "kind,kappa," << (kind == SweepKind::kScaffnew ? "p" : "k")
     << ",mean_cost,std_cost,trials,unfinished\n";
  for (const SweepRow& row : r.rows) {
    os << SweepKindName(kind) << ',' << FormatDouble(row.kappa) << ','
       << FormatDouble(row.parameter) << ',' << FormatDouble(row.mean_cost)
       << ',' << FormatDouble(row.std_cost) << ',' << row.trials << ','
       << row.unfinished << "\n";
  }
  return kExitOk;
}

int CmdConvexBench(const ProblemArgs& pa, const SolverArgs& sa,
                   int64_t trials, const std::string& output) {
  const Algorithm alg = ParseAlgorithm(sa.algorithm);
  const PrimalDualProblem p = BuildProblem(pa, alg);
  const SolverConfig cfg = BuildConfig(p, sa, alg);
  const ConvexBenchReport r =
      ConvexBench(p, cfg, alg, cfg.iterations, trials, cfg.seed);
  if (r.strongly_convex_warning) {
    std::cerr << "warning: problem is strongly convex; the ergodic bound "
                 "holds but the test is degenerate\n";
  }
  Header h = ConfigHeader("convex-bench", &pa, &sa, &cfg);
  h.push_back({"trials", std::to_string(trials)});
  h.push_back({"psi0", FormatDouble(r.psi0)});
  h.push_back({"bound_holds", r.bound_holds ? "true" : "false"});
  h.push_back({"cocoercivity_holds", r.cocoercivity_holds ? "true" : "false"});
  h.push_back({"final_bregman", FormatDouble(r.final_bregman)});
  h.push_back({"final_dual_dist_sq", FormatDouble(r.mean_dual_dist_sq.back())});
  Output out("convex-bench", output);
  std::ostream& os = out.stream();
  WriteHeader(os, h);
  os << "t,mean_bregman_avg,bound,mean_dual_dist_sq\n";
  for (size_t t = 1; t <= r.mean_bregman_avg.size(); ++t) {
    os << t << ',' << FormatDouble(r.mean_bregman_avg[t - 1]) << ','
       << FormatDouble(r.bound[t - 1]) << ','
       << FormatDouble(r.mean_dual_dist_sq[t]) << "\n";
  }
  return r.bound_holds && r.cocoercivity_holds ? kExitOk : kExitFail;
}

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Turns "key = value" lines into "--key=value" arguments.
std::vector<std::string> ReadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) +
                       ": expected key = value");
    }
    const std::string key = Trim(t.substr(0, eq));
    const std::string value = Trim(t.substr(eq + 1));
    if (key.empty()) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
    }
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// Splices config-file arguments in front of the command line ones, right
// after the subcommand, so that later (command line) values win.
std::vector<std::string> ExpandConfig(const std::vector<std::string>& argv) {
  std::optional<std::string> path;
  for (size_t i = 2; i < argv.size(); ++i) {
    if (argv[i] == "--config" && i + 1 < argv.size()) path = argv[i + 1];
    if (argv[i].rfind("--config=", 0) == 0) path = argv[i].substr(9);
  }
  if (!path || argv.size() < 2) return argv;
  std::vector<std::string> out(argv.begin(), argv.begin() + 2);
  for (std::string& a : ReadConfigFile(*path)) out.push_back(std::move(a));
  out.insert(out.end(), argv.begin() + 2, argv.end());
  return out;
}

int Main(int argc, char** argv) {
  CLI::App app{"Randomized primal-dual proximal splitting"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path;
  std::string output;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key = value config file");
    sub->add_option("--output,-o", output, "CSV destination");
  };

  ProblemArgs pa;
  SolverArgs sa;
  double residual_tol = 0.0;
  CLI::App* solve = app.add_subcommand("solve", "run one solver");
  common(solve);
  AddProblemOptions(solve, &pa);
  AddSolverOptions(solve, &sa);
  solve->add_option("--residual-tol", residual_tol,
                    "stop once the optimality residual is below this");

  std::string theorem;
  CertifyOptions co;
  co.trials = 1;
  CLI::App* certify =
      app.add_subcommand("certify", "check a linear rate over many trials");
  common(certify);
  AddProblemOptions(certify, &pa);
  AddSolverOptions(certify, &sa);
  certify->add_option("--theorem", theorem, "t1..t10; default matches");
  certify->add_option("--trials", co.trials, "independent runs")
      ->capture_default_str();
  certify->add_option("--probe-states", co.probe_states,
                      "states of the conditional probe")
      ->capture_default_str();
  certify->add_option("--probe-draws", co.probe_draws,
                      "draws per probed state")
      ->capture_default_str();

  RawRateArgs ra;
  CLI::App* rates = app.add_subcommand("rates", "evaluate a rate");
  common(rates);
  rates->add_option("--theorem", ra.theorem, "t1..t10, l1");
  rates->add_option("--gamma", ra.gamma, "primal step");
  rates->add_option("--L", ra.L, "smoothness of f");
  rates->add_option("--mu", ra.mu, "strong convexity of f");
  rates->add_option("--omega", ra.omega, "estimator variance")
      ->capture_default_str();
  rates->add_option("--mu-hc", ra.mu_hc, "strong convexity of h*")
      ->capture_default_str();
  ProblemArgs rpa;
  SolverArgs rsa;
  std::string rate_problem;
  rates->add_option("--problem", rate_problem,
                    "evaluate on a catalog problem instead");
  rates->add_option("--dim", rpa.dim, "primal dimension");
  rates->add_option("--problem-seed", rpa.problem_seed, "problem seed");
  rates->add_option("--blocks", rpa.blocks, "blocks");
  rates->add_option("--penalty", rpa.penalty, "lambda or l1 weight");
  rates->add_option("--g-weight", rpa.g_weight, "weight of g");
  rates->add_option("--rows", rpa.rows, "rows of K");
  rates->add_option("--algorithm", rsa.algorithm, "algorithm");
  rates->add_option("--estimator", rsa.estimator, "estimator spec");
  rates->add_option("--tau", rsa.tau, "dual step");

  std::string est_spec;
  int64_t draws = 100000;
  uint64_t est_seed = 0;
  int64_t est_dim = 10;
  int64_t block_dim = 2;
  double sigmas = 3.0;
  CLI::App* est = app.add_subcommand(
      "estimator-check", "Monte Carlo check of unbiasedness and omega");
  common(est);
  est->add_option("estimator,--estimator", est_spec, "estimator spec")
      ->required();
  est->add_option("--draws", draws, "draws")->capture_default_str();
  est->add_option("--seed", est_seed, "seed")->capture_default_str();
  est->add_option("--dim", est_dim, "dimension for identity and bernoulli")
      ->capture_default_str();
  est->add_option("--block-dim", block_dim, "block size for rand_k_blocks")
      ->capture_default_str();
  est->add_option("--sigmas", sigmas, "tolerance in standard errors")
      ->capture_default_str();

  std::string kind = "scaffnew";
  std::vector<double> kappas;
  int64_t fl_trials = 10;
  uint64_t fl_seed = 0;
  SweepOptions so;
  CLI::App* fl = app.add_subcommand(
      "fl-sim", "federated communication cost against kappa");
  common(fl);
  fl->add_option("--kind", kind, "scaffnew or rand_k")->capture_default_str();
  fl->add_option("--kappa", kappas, "condition numbers")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  fl->add_option("--trials", fl_trials, "trials per kappa (>= 10)")
      ->capture_default_str();
  fl->add_option("--seed", fl_seed, "seed")->capture_default_str();
  fl->add_option("--nodes", so.n, "clients")->capture_default_str();
  fl->add_option("--d", so.d, "model dimension")->capture_default_str();
  fl->add_option("--eps", so.target_eps, "target Psi/Psi0")
      ->capture_default_str();
  fl->add_option("--max-rounds", so.max_rounds, "round cap")
      ->capture_default_str();

  ProblemArgs cpa;
  cpa.variant = "least_squares_constrained";
  SolverArgs csa;
  csa.iterations = 10000;
  int64_t cb_trials = 1;
  CLI::App* convex = app.add_subcommand(
      "convex-bench", "ergodic Bregman rate without strong convexity");
  common(convex);
  AddProblemOptions(convex, &cpa);
  AddSolverOptions(convex, &csa);
  convex->add_option("--trials", cb_trials, "independent runs")
      ->capture_default_str();

  std::vector<std::string> args(argv, argv + argc);
  std::vector<char*> cargs;
  try {
    args = ExpandConfig(args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  for (std::string& a : args) cargs.push_back(a.data());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*solve) return CmdSolve(pa, sa, residual_tol, output);
    if (*certify) return CmdCertify(pa, sa, theorem, co, output);
    if (*rates) {
      if (!rate_problem.empty()) rpa.variant = rate_problem;
      if (ra.mu) rpa.mu = *ra.mu;
      if (ra.L) rpa.L = *ra.L;
      if (ra.gamma) rsa.gamma = ra.gamma;
      return CmdRates(ra, rpa, rsa, !rate_problem.empty(), output);
    }
    if (*est) {
      return CmdEstimatorCheck(est_spec, draws, est_seed, est_dim, block_dim,
                               sigmas, output);
    }
    if (*fl) return CmdFlSim(kind, kappas, fl_trials, fl_seed, so, output);
    if (*convex) return CmdConvexBench(cpa, csa, cb_trials, output);
  } catch (const RateUnavailableError& e) {
    std::cerr << "not applicable: " << e.what() << "\n";
    return kExitInapplicable;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace
}  // namespace randprox

int main(int argc, char** argv) { return randprox::Main(argc, argv); }
