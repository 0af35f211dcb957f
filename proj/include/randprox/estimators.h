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

// Unbiased random estimators R with conic variance:
//   E[R(r)] = r,  E|R(r) - r|^2 <= omega |r|^2,
//   E|K*(R(r) - r)|^2 <= omega_ran |r|^2 - zeta |K*r|^2.
//
// An estimator never holds random state. Draw(seed, t, history) returns the
// realization used at iteration t, so two algorithms fed the same seed see
// the same randomness.

#ifndef RANDPROX_ESTIMATORS_H_
#define RANDPROX_ESTIMATORS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "randprox/problem.h"
#include "randprox/types.h"

namespace randprox {

struct EstimatorParams {
  double omega = 0.0;
  double omega_ran = 0.0;
  double zeta = 0.0;
};

enum class EstimatorKind {
  kIdentity,
  kBernoulli,
  kRandK,        // k of d coordinates
  kRandKBlocks,  // k of n blocks
  kSharedRandK,  // one k-of-d mask applied to each of n blocks
};

// One realization of R. Applying it is deterministic.
struct EstimatorDraw {
  EstimatorKind kind = EstimatorKind::kIdentity;
  // Bernoulli: 1/p_t on success, 0 otherwise. Masks: d/k or n/k.
  double scale = 1.0;
  // Bernoulli probability used for this draw.
  double probability = 1.0;
  // Sorted selected coordinates (rand-k, shared) or blocks (rand-k blocks).
  std::vector<int64_t> selected;
  // d for coordinate masks, n for block masks.
  int64_t universe = 0;
  // Number of blocks the shared mask is replicated over.
  int64_t copies = 1;

  bool IsZero() const;
  // True when R = Id for this draw, bitwise.
  bool IsIdentity() const;
  Vector Apply(const Vector& r) const;
  // Number of scalars that R(r) can have nonzero, i.e. the floats a node
  // would transmit.
  int64_t SupportSize(int64_t dim) const;
};

class RandomEstimator {
 public:
  // Receives t and the coin outcomes of iterations 0..t-1; returns p_t.
  using Schedule =
      std::function<double(int64_t t, const std::vector<bool>& history)>;

  RandomEstimator() = default;

  static RandomEstimator Identity();
  // p is p_min; the optional schedule must return values in [p, 1].
  static RandomEstimator Bernoulli(double p, Schedule schedule = nullptr);
  static RandomEstimator RandK(int64_t k, int64_t d);
  static RandomEstimator RandKBlocks(int64_t k, int64_t n);
  static RandomEstimator SharedRandK(int64_t k, int64_t d, int64_t n);
  // "identity", "bernoulli:p=0.1", "rand_k:k=3,d=10",
  // "rand_k_blocks:k=3,n=10", "shared_rand_k:k=2,d=8,n=4".
  static RandomEstimator Parse(const std::string& spec);

  // Schedule that forces p_t = 1 after `max_zeros` consecutive failures and
  // uses p otherwise.
  static Schedule ForceAfterZeros(double p, int64_t max_zeros);

  EstimatorKind kind() const { return kind_; }
  const std::string& spec() const { return spec_; }
  // Every shipped law is a random linear map: under a fixed draw,
  // R(a r + b s) = a R(r) + b R(s).
  bool is_linear() const { return true; }
  bool skips_prox_when_zero() const { return kind_ == EstimatorKind::kBernoulli; }
  // Bernoulli laws commute with every linear map; masks only with maps that
  // are diagonal in the masked coordinates.
  bool commutes_with_any_linear_map() const {
    return kind_ == EstimatorKind::kIdentity ||
           kind_ == EstimatorKind::kBernoulli;
  }
  double p_min() const { return p_; }
  int64_t k() const { return k_; }
  int64_t d() const { return d_; }
  int64_t n() const { return n_; }

  // Constants for use with K. Masks without K-specific knowledge fall back to
  // omega_ran = |K|^2 omega, zeta = 0.
  EstimatorParams Params(const LinearMap& K) const;
  double omega() const { return omega_; }

  // p_t for iteration t; throws ScheduleError outside [p_min, 1].
  double Probability(int64_t t, const std::vector<bool>& history) const;
  EstimatorDraw Draw(uint64_t seed, int64_t t,
                     const std::vector<bool>& history = {}) const;

  // Every outcome with its probability, for exact expectations on tiny
  // problems. Bernoulli uses p_t for the given t and history.
  std::vector<std::pair<double, EstimatorDraw>> EnumerateOutcomes(
      int64_t t = 0, const std::vector<bool>& history = {}) const;

 private:
  EstimatorKind kind_ = EstimatorKind::kIdentity;
  std::string spec_ = "identity";
  double p_ = 1.0;
  Schedule schedule_;
  int64_t k_ = 0;
  int64_t d_ = 0;
  int64_t n_ = 0;
  double omega_ = 0.0;
  std::optional<EstimatorParams> declared_;
};

// Monte Carlo conformance statistics. Each value comes with the standard
// error of the underlying sample mean.
struct EstimatorStats {
  double mean_error_norm = 0.0;  // |mean(R(r)) - r|
  double mean_error_se = 0.0;    // standard error of that norm
  double variance_ratio = 0.0;   // mean |R(r) - r|^2 / |r|^2
  double variance_ratio_se = 0.0;
  // Smallest omega_ran the sample supports at r:
  // (mean |K*(R(r) - r)|^2 + zeta |K*r|^2) / |r|^2.
  double omega_ran_hat = 0.0;
  double omega_ran_hat_se = 0.0;
  // omega_ran |r|^2 - zeta |K*r|^2 - mean |K*(R(r) - r)|^2.
  double range_slack = 0.0;
  double range_slack_se = 0.0;
  int64_t draws = 0;
};

// r must be in the domain of K*. Requires draws >= 1000.
EstimatorStats EmpiricalEstimatorStats(const RandomEstimator& e,
                                       const Vector& r, const LinearMap& K,
                                       int64_t draws, uint64_t seed);

}  // namespace randprox

#endif  // RANDPROX_ESTIMATORS_H_
