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

#include "randprox/estimators.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "randprox/rng.h"

namespace randprox {
namespace {

constexpr uint64_t kEstimatorStream = 0xe5717a7e;

// Uniform k-subset of {0, ..., n-1}, sorted; partial Fisher-Yates.
std::vector<int64_t> SampleSubset(int64_t k, int64_t n, Rng& rng) {
  std::vector<int64_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int64_t i = 0; i < k; ++i) {
    const int64_t j = i + rng.UniformInt(n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

void ForEachSubset(int64_t k, int64_t n,
                   const std::function<void(const std::vector<int64_t>&)>& fn) {
  std::vector<int64_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    int64_t i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int64_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

double Binomial(int64_t n, int64_t k) {
  double out = 1.0;
  for (int64_t i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

void CheckCounts(int64_t k, int64_t d, const char* what) {
  if (k < 1 || d < 1 || k > d) {
    throw ParameterError(std::string(what) + ": need 1 <= k <= d");
  }
}

std::map<std::string, std::string> ParseArgs(const std::string& body,
                                             const std::string& spec) {
  std::map<std::string, std::string> out;
  size_t pos = 0;
  while (pos < body.size()) {
    size_t end = body.find(',', pos);
    if (end == std::string::npos) end = body.size();
    const std::string item = body.substr(pos, end - pos);
    const size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ParameterError("estimator spec '" + spec + "': bad argument '" +
                           item + "'");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
    pos = end + 1;
  }
  return out;
}

double ToDouble(const std::string& s, const std::string& spec) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw ParameterError("estimator spec '" + spec + "': bad number '" + s +
                         "'");
  }
  return v;
}

int64_t ToCount(const std::string& s, const std::string& spec) {
  const double v = ToDouble(s, spec);
  if (v != std::floor(v)) {
    throw ParameterError("estimator spec '" + spec + "': '" + s +
                         "' is not an integer");
  }
  return static_cast<int64_t>(v);
}

}  // namespace

bool EstimatorDraw::IsZero() const {
  return kind == EstimatorKind::kBernoulli && scale == 0.0;
}

bool EstimatorDraw::IsIdentity() const {
  switch (kind) {
    case EstimatorKind::kIdentity:
      return true;
    case EstimatorKind::kBernoulli:
      return scale == 1.0;
    default:
      return scale == 1.0 &&
             static_cast<int64_t>(selected.size()) == universe;
  }
}

Vector EstimatorDraw::Apply(const Vector& r) const {
  switch (kind) {
    case EstimatorKind::kIdentity:
      return r;
    case EstimatorKind::kBernoulli:
      if (scale == 0.0) return Vector::Zero(r.size());
      return scale * r;
    case EstimatorKind::kRandK: {
      CheckSameSize(r, universe, "rand_k");
      Vector out = Vector::Zero(r.size());
      for (int64_t i : selected) out[i] = scale * r[i];
      return out;
    }
    case EstimatorKind::kRandKBlocks: {
      if (r.size() % universe != 0) {
        throw ShapeError("rand_k_blocks: vector is not made of " +
                         std::to_string(universe) + " blocks");
      }
      const BlockLayout layout{universe, r.size() / universe};
      Vector out = Vector::Zero(r.size());
      for (int64_t i : selected) {
        layout.Block(out, i) = scale * layout.Block(r, i);
      }
      return out;
    }
    case EstimatorKind::kSharedRandK: {
      CheckSameSize(r, universe * copies, "shared_rand_k");
      Vector out = Vector::Zero(r.size());
      for (int64_t b = 0; b < copies; ++b) {
        for (int64_t i : selected) {
          out[b * universe + i] = scale * r[b * universe + i];
        }
      }
      return out;
    }
  }
  return r;
}

int64_t EstimatorDraw::SupportSize(int64_t dim) const {
  switch (kind) {
    case EstimatorKind::kIdentity:
      return dim;
    case EstimatorKind::kBernoulli:
      return scale == 0.0 ? 0 : dim;
    case EstimatorKind::kRandK:
      return static_cast<int64_t>(selected.size());
    case EstimatorKind::kRandKBlocks:
      return static_cast<int64_t>(selected.size()) * (dim / universe);
    case EstimatorKind::kSharedRandK:
      return static_cast<int64_t>(selected.size()) * copies;
  }
  return dim;
}

RandomEstimator RandomEstimator::Identity() { return RandomEstimator(); }

RandomEstimator RandomEstimator::Bernoulli(double p, Schedule schedule) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw ParameterError("bernoulli: p must be in (0, 1]");
  }
  RandomEstimator e;
  e.kind_ = EstimatorKind::kBernoulli;
  e.p_ = p;
  e.schedule_ = std::move(schedule);
  e.omega_ = 1.0 / p - 1.0;
  e.spec_ = "bernoulli:p=" + std::to_string(p);
  return e;
}

RandomEstimator RandomEstimator::RandK(int64_t k, int64_t d) {
  CheckCounts(k, d, "rand_k");
  RandomEstimator e;
  e.kind_ = EstimatorKind::kRandK;
  e.k_ = k;
  e.d_ = d;
  e.omega_ = static_cast<double>(d) / k - 1.0;
  e.spec_ = "rand_k:k=" + std::to_string(k) + ",d=" + std::to_string(d);
  return e;
}

RandomEstimator RandomEstimator::RandKBlocks(int64_t k, int64_t n) {
  if (n < 2) throw ParameterError("rand_k_blocks: need n >= 2");
  CheckCounts(k, n, "rand_k_blocks");
  RandomEstimator e;
  e.kind_ = EstimatorKind::kRandKBlocks;
  e.k_ = k;
  e.n_ = n;
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  e.omega_ = nd / kd - 1.0;
  e.declared_ = EstimatorParams{
      .omega = e.omega_,
      .omega_ran = nd * (nd - kd) / (kd * (nd - 1.0)),
      .zeta = (nd - kd) / (kd * (nd - 1.0))};
  e.spec_ = "rand_k_blocks:k=" + std::to_string(k) + ",n=" + std::to_string(n);
  return e;
}

RandomEstimator RandomEstimator::SharedRandK(int64_t k, int64_t d, int64_t n) {
  CheckCounts(k, d, "shared_rand_k");
  if (n < 1) throw ParameterError("shared_rand_k: need n >= 1");
  RandomEstimator e;
  e.kind_ = EstimatorKind::kSharedRandK;
  e.k_ = k;
  e.d_ = d;
  e.n_ = n;
  e.omega_ = static_cast<double>(d) / k - 1.0;
  e.spec_ = "shared_rand_k:k=" + std::to_string(k) + ",d=" +
            std::to_string(d) + ",n=" + std::to_string(n);
  return e;
}

RandomEstimator RandomEstimator::Parse(const std::string& spec) {
  const size_t colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const auto args = colon == std::string::npos
                        ? std::map<std::string, std::string>{}
                        : ParseArgs(spec.substr(colon + 1), spec);
  auto get = [&](const char* key) -> const std::string& {
    auto it = args.find(key);
    if (it == args.end()) {
      throw ParameterError("estimator spec '" + spec + "': missing '" + key +
                           "'");
    }
    return it->second;
  };
  auto expect = [&](size_t count) {
    if (args.size() != count) {
      throw ParameterError("estimator spec '" + spec +
                           "': unexpected arguments");
    }
  };
  if (name == "identity") {
    expect(0);
    return Identity();
  }
  if (name == "bernoulli") {
    expect(1);
    return Bernoulli(ToDouble(get("p"), spec));
  }
  if (name == "rand_k") {
    expect(2);
    return RandK(ToCount(get("k"), spec), ToCount(get("d"), spec));
  }
  if (name == "rand_k_blocks") {
    expect(2);
    return RandKBlocks(ToCount(get("k"), spec), ToCount(get("n"), spec));
  }
  if (name == "shared_rand_k") {
    expect(3);
    return SharedRandK(ToCount(get("k"), spec), ToCount(get("d"), spec),
                       ToCount(get("n"), spec));
  }
  throw ParameterError("unknown estimator '" + name + "'");
}

RandomEstimator::Schedule RandomEstimator::ForceAfterZeros(double p,
                                                           int64_t max_zeros) {
  if (max_zeros < 1) throw ParameterError("ForceAfterZeros: need T >= 1");
  return [p, max_zeros](int64_t, const std::vector<bool>& history) {
    int64_t zeros = 0;
    for (auto it = history.rbegin(); it != history.rend() && !*it; ++it) {
      ++zeros;
    }
    return zeros >= max_zeros ? 1.0 : p;
  };
}

EstimatorParams RandomEstimator::Params(const LinearMap& K) const {
  if (declared_) {
    if (K.out_dim() % n_ != 0) {
      throw UsageError("rand_k_blocks: dual space is not made of " +
                       std::to_string(n_) + " blocks");
    }
    return *declared_;
  }
  return {.omega = omega_, .omega_ran = K.norm_sq() * omega_, .zeta = 0.0};
}

double RandomEstimator::Probability(int64_t t,
                                    const std::vector<bool>& history) const {
  if (kind_ != EstimatorKind::kBernoulli) return 1.0;
  const double pt = schedule_ ? schedule_(t, history) : p_;
  if (!(pt >= p_ && pt <= 1.0)) {
    throw ScheduleError("bernoulli: schedule returned p_t = " +
                        std::to_string(pt) + " outside [p_min, 1]");
  }
  return pt;
}

EstimatorDraw RandomEstimator::Draw(uint64_t seed, int64_t t,
                                    const std::vector<bool>& history) const {
  EstimatorDraw draw;
  draw.kind = kind_;
  if (kind_ == EstimatorKind::kIdentity) return draw;
  Rng rng = Rng(seed, kEstimatorStream).Substream(static_cast<uint64_t>(t));
  switch (kind_) {
    case EstimatorKind::kBernoulli: {
      const double pt = Probability(t, history);
      draw.probability = pt;
      draw.scale = rng.Uniform() < pt ? 1.0 / pt : 0.0;
      break;
    }
    case EstimatorKind::kRandK:
    case EstimatorKind::kSharedRandK:
      draw.universe = d_;
      draw.copies = kind_ == EstimatorKind::kSharedRandK ? n_ : 1;
      draw.selected = SampleSubset(k_, d_, rng);
      draw.scale = static_cast<double>(d_) / k_;
      break;
    case EstimatorKind::kRandKBlocks:
      draw.universe = n_;
      draw.selected = SampleSubset(k_, n_, rng);
      draw.scale = static_cast<double>(n_) / k_;
      break;
    case EstimatorKind::kIdentity:
      break;
  }
  return draw;
}

std::vector<std::pair<double, EstimatorDraw>>
RandomEstimator::EnumerateOutcomes(int64_t t,
                                   const std::vector<bool>& history) const {
  std::vector<std::pair<double, EstimatorDraw>> out;
  EstimatorDraw base;
  base.kind = kind_;
  switch (kind_) {
    case EstimatorKind::kIdentity:
      out.emplace_back(1.0, base);
      break;
    case EstimatorKind::kBernoulli: {
      const double pt = Probability(t, history);
      base.probability = pt;
      base.scale = 1.0 / pt;
      out.emplace_back(pt, base);
      if (pt < 1.0) {
        base.scale = 0.0;
        out.emplace_back(1.0 - pt, base);
      }
      break;
    }
    case EstimatorKind::kRandK:
    case EstimatorKind::kSharedRandK:
    case EstimatorKind::kRandKBlocks: {
      const bool blocks = kind_ == EstimatorKind::kRandKBlocks;
      const int64_t universe = blocks ? n_ : d_;
      const double count = Binomial(universe, k_);
      if (count > 1e6) {
        throw ParameterError("EnumerateOutcomes: too many outcomes");
      }
      base.universe = universe;
      base.copies = kind_ == EstimatorKind::kSharedRandK ? n_ : 1;
      base.scale = static_cast<double>(universe) / k_;
      ForEachSubset(k_, universe, [&](const std::vector<int64_t>& s) {
        EstimatorDraw d = base;
        d.selected = s;
        out.emplace_back(1.0 / count, std::move(d));
      });
      break;
    }
  }
  return out;
}

EstimatorStats EmpiricalEstimatorStats(const RandomEstimator& e,
                                       const Vector& r, const LinearMap& K,
                                       int64_t draws, uint64_t seed) {
  if (draws < 1000) {
    throw ParameterError("EmpiricalEstimatorStats: need at least 1000 draws");
  }
  CheckSameSize(r, K.out_dim(), "EmpiricalEstimatorStats");
  const EstimatorParams params = e.Params(K);
  const double r_sq = r.squaredNorm();
  const double kr_sq = K.Adjoint(r).squaredNorm();

  Vector sum = Vector::Zero(r.size());
  Vector sum_sq = Vector::Zero(r.size());
  double err_sum = 0.0, err_sq_sum = 0.0;
  double range_sum = 0.0, range_sq_sum = 0.0;
  std::vector<bool> history;
  for (int64_t i = 0; i < draws; ++i) {
    const EstimatorDraw draw = e.Draw(seed, i, history);
    if (e.kind() == EstimatorKind::kBernoulli) history.push_back(!draw.IsZero());
    const Vector sample = draw.Apply(r);
    sum += sample;
    sum_sq += sample.cwiseAbs2();
    const Vector err = sample - r;
    const double es = err.squaredNorm();
    const double rs = K.Adjoint(err).squaredNorm();
    err_sum += es;
    err_sq_sum += es * es;
    range_sum += rs;
    range_sq_sum += rs * rs;
  }
  const double n = static_cast<double>(draws);
  auto std_error = [n](double s, double s2) {
    const double var = std::max(0.0, (s2 - s * s / n) / (n - 1.0));
    return std::sqrt(var / n);
  };
  EstimatorStats st;
  st.draws = draws;
  const Vector mean = sum / n;
  st.mean_error_norm = (mean - r).norm();
  const double trace_var =
      std::max(0.0, (sum_sq.sum() - sum.squaredNorm() / n) / (n - 1.0));
  st.mean_error_se = std::sqrt(trace_var / n);
  const double range_mean = range_sum / n;
  const double range_se = std_error(range_sum, range_sq_sum);
  if (r_sq > 0.0) {
    st.variance_ratio = err_sum / n / r_sq;
    st.variance_ratio_se = std_error(err_sum, err_sq_sum) / r_sq;
    st.omega_ran_hat = (range_mean + params.zeta * kr_sq) / r_sq;
    st.omega_ran_hat_se = range_se / r_sq;
  }
  st.range_slack = params.omega_ran * r_sq - params.zeta * kr_sq - range_mean;
  st.range_slack_se = range_se;
  return st;
}

}  // namespace randprox
