// Copyright 2026 The ouage Authors.
//
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

#ifndef OUAGE_SIM_HPP
#define OUAGE_SIM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ouage/channel.hpp"
#include "ouage/penalty.hpp"
#include "ouage/policy_fr.hpp"
#include "ouage/rng.hpp"

namespace ouage {

enum class Scheme { iir, fr };

[[nodiscard]] inline const char* to_string(Scheme s) noexcept { return s == Scheme::iir ? "IIR" : "FR"; }

struct SimConfig {
  std::uint64_t num_epochs = 1'000'000;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> warmup_epochs;  ///< defaults to 1% of num_epochs
  int batches = 100;
  bool record_trace = false;

  [[nodiscard]] std::uint64_t warmup() const noexcept { return warmup_epochs ? *warmup_epochs : num_epochs / 100; }

  void validate() const {
    if (num_epochs < 1) {
      throw std::invalid_argument("SimConfig: num_epochs must be >= 1");
    }
    if (batches < 1) {
      throw std::invalid_argument("SimConfig: batches must be >= 1");
    }
  }
};

struct EpochRecord {
  std::uint64_t index = 0;
  double start_age = 0.0;
  double wait = 0.0;
  double delay = 0.0;          ///< time from sampling the delivered message to its decode
  std::uint64_t attempts = 0;  ///< decoding attempts in the epoch
  double reward = 0.0;
  double length = 0.0;
};

struct SimResult {
  double avg_penalty = 0.0;
  double total_time = 0.0;
  std::uint64_t epoch_count = 0;  ///< retained epochs
  double std_error = 0.0;         ///< batch means; +inf with fewer than two batches
  std::vector<EpochRecord> trace;
};

/// Pooled ratio of sums with a batch-means standard error.
class RatioEstimator {
 public:
  RatioEstimator(std::uint64_t expected, int batches)
      : batches_{static_cast<std::uint64_t>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(batches, expected)))},
        batch_size_{std::max<std::uint64_t>(1, expected / batches_)} {}

  void add(double reward, double length) {
    reward_ += reward;
    length_ += length;
    batch_reward_ += reward;
    batch_length_ += length;
    ++count_;
    // the final batch absorbs the remainder
    if (++in_batch_ == batch_size_ && ratios_.size() + 1 < batches_) {
      flush();
    }
  }

  [[nodiscard]] SimResult finish() {
    if (in_batch_ > 0) {
      flush();
    }
    SimResult r;
    r.epoch_count = count_;
    r.total_time = length_;
    r.avg_penalty = length_ > 0.0 ? reward_ / length_ : 0.0;
    if (ratios_.size() < 2) {
      r.std_error = std::numeric_limits<double>::infinity();
    } else {
      double mean = 0.0;
      for (double v : ratios_) {
        mean += v;
      }
      mean /= static_cast<double>(ratios_.size());
      double ss = 0.0;
      for (double v : ratios_) {
        ss += (v - mean) * (v - mean);
      }
      const double b = static_cast<double>(ratios_.size());
      r.std_error = std::sqrt(ss / (b - 1.0) / b);
    }
    return r;
  }

 private:
  void flush() {
    ratios_.push_back(batch_length_ > 0.0 ? batch_reward_ / batch_length_ : 0.0);
    batch_reward_ = batch_length_ = 0.0;
    in_batch_ = 0;
  }

  std::uint64_t batches_;
  std::uint64_t batch_size_;
  std::uint64_t count_ = 0;
  std::uint64_t in_batch_ = 0;
  double reward_ = 0.0, length_ = 0.0;
  double batch_reward_ = 0.0, batch_length_ = 0.0;
  std::vector<double> ratios_;
};

/// Renewal-reward simulation of IIR under an arbitrary wait rule. The first
/// epoch starts at age n_bar; later ones start at the previous delay.
template <AgePenalty G, class Rule>
[[nodiscard]] SimResult simulate_iir(const G& g, const CodingConfig& cfg, const Rule& waiting_rule,
                                     const SimConfig& sim) {
  sim.validate();
  Rng rng{sim.seed};
  IIRDelaySampler sampler{cfg};
  const std::uint64_t warmup = std::min(sim.warmup(), sim.num_epochs - 1);
  RatioEstimator est{sim.num_epochs - warmup, sim.batches};
  std::vector<EpochRecord> trace;
  double y_bar = cfg.n_bar();
  for (std::uint64_t i = 0; i < sim.num_epochs; ++i) {
    const double w = waiting_rule(y_bar);
    if (!(w >= 0.0)) {
      throw std::invalid_argument("simulate_iir: waiting rule returned a negative wait");
    }
    const auto draw = sampler.draw(rng);
    const double reward = penalty_integral(g, y_bar, y_bar + w + draw.delay);
    const double length = w + draw.delay;
    if (i >= warmup) {
      est.add(reward, length);
    }
    if (sim.record_trace) {
      trace.push_back({i, y_bar, w, draw.delay, static_cast<std::uint64_t>(draw.ir_bits) + 1, reward, length});
    }
    y_bar = draw.delay;
  }
  auto out = est.finish();
  out.trace = std::move(trace);
  return out;
}

struct FRSimOptions {
  FRTimeline timeline = FRTimeline::pipelined;
  double first_wait = 0.0;  ///< w1; the optimal policy uses 0
};

/// Renewal-reward simulation of FR: geometric attempt counts, delivered age
/// n_bar, attempts `spacing` apart, an optional wait before the first one.
template <AgePenalty G>
[[nodiscard]] SimResult simulate_fr(const G& g, const CodingConfig& cfg, const SimConfig& sim,
                                    const FRSimOptions& opt = {}) {
  sim.validate();
  if (!(opt.first_wait >= 0.0)) {
    throw std::invalid_argument("simulate_fr: first wait must be >= 0");
  }
  Rng rng{sim.seed};
  const auto attempts = fr_attempt_dist(cfg);
  const double s = fr_attempt_spacing(cfg, opt.timeline);
  const double nb = cfg.n_bar();
  const std::uint64_t warmup = std::min(sim.warmup(), sim.num_epochs - 1);
  RatioEstimator est{sim.num_epochs - warmup, sim.batches};
  std::vector<EpochRecord> trace;
  for (std::uint64_t i = 0; i < sim.num_epochs; ++i) {
    const std::uint64_t m = sample_fr_attempts(attempts, rng);
    const double length = opt.first_wait + static_cast<double>(m) * s;
    const double reward = penalty_integral(g, nb, nb + length);
    if (i >= warmup) {
      est.add(reward, length);
    }
    if (sim.record_trace) {
      trace.push_back({i, nb, opt.first_wait, nb, m, reward, length});
    }
  }
  auto out = est.finish();
  out.trace = std::move(trace);
  return out;
}

/// Exact OU transitions: X_{t+d} | X_t ~ N(X_t e^{-theta d}, V (1 - e^{-2 theta d})).
/// The path starts from x0 at time 0; `times` must be nonnegative and nondecreasing.
[[nodiscard]] inline std::vector<double> ou_path(const OUParams& p, double x0, std::span<const double> times,
                                                 Rng& rng) {
  std::vector<double> out;
  out.reserve(times.size());
  double t = 0.0;
  double x = x0;
  for (double next : times) {
    if (!(next >= t)) {
      throw std::invalid_argument("ou_path: time grid must be nonnegative and nondecreasing");
    }
    const double d = next - t;
    if (d > 0.0) {
      const double decay = std::exp(-p.theta() * d);
      const double sd = std::sqrt(p.variance() * -std::expm1(-2.0 * p.theta() * d));
      x = x * decay + sd * rng.normal();
    }
    t = next;
    out.push_back(x);
  }
  return out;
}

/// Sequential form of ou_path for event-driven simulations.
class OUProcess {
 public:
  OUProcess(const OUParams& p, double x0, double t0 = 0.0) : p_{p}, t_{t0}, x_{x0} {}

  double advance_to(double t, Rng& rng) {
    if (t < t_) {
      throw std::invalid_argument("OUProcess: time must not decrease");
    }
    const double d = t - t_;
    if (d > 0.0) {
      x_ = x_ * std::exp(-p_.theta() * d) + std::sqrt(p_.variance() * -std::expm1(-2.0 * p_.theta() * d)) * rng.normal();
      t_ = t;
    }
    return x_;
  }

  [[nodiscard]] double time() const noexcept { return t_; }
  [[nodiscard]] double value() const noexcept { return x_; }

 private:
  OUParams p_;
  double t_;
  double x_;
};

}  // namespace ouage

#endif  // OUAGE_SIM_HPP
