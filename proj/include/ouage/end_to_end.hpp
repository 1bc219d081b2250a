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

#ifndef OUAGE_END_TO_END_HPP
#define OUAGE_END_TO_END_HPP

#include <cmath>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <variant>

#include "ouage/channel.hpp"
#include "ouage/penalty.hpp"
#include "ouage/policy_fr.hpp"
#include "ouage/policy_iir.hpp"
#include "ouage/quantizer.hpp"
#include "ouage/rng.hpp"
#include "ouage/sim.hpp"

/**
 * \file
 * \brief Physical-layer check of the MMSE model.
 *
 * Simulates the OU path itself and quantizes the delivered samples. The
 * receiver estimates X_t = Xq_S e^{-theta (t - S)} from the latest decoded
 * sample S. The squared error is averaged over time and compared with the
 * analytic optimum. Time averages use a regular evaluation grid with one
 * uniformly random offset, which makes the grid sum an unbiased estimate of
 * the time integral.
 */

namespace ouage {

enum class QuantizerModel {
  idealized,  ///< Gaussian test channel: Xq ~ N(0, V - D), X = Xq + Q, Q independent with E[Q^2] = D
  lloyd_max,  ///< scalar Lloyd-Max codebook for N(0, V)
};

struct EndToEndOptions {
  SimConfig sim{.num_epochs = 200'000, .warmup_epochs = std::nullopt};
  double dt = 0.01;  ///< evaluation grid spacing
  FRTimeline timeline = FRTimeline::pipelined;
};

struct QuantizerRun {
  QuantizerModel model = QuantizerModel::idealized;
  SimResult result;
  double rel_gap = 0.0;  ///< (simulated - analytic) / analytic
};

struct EndToEndReport {
  Scheme scheme = Scheme::iir;
  double analytic_lambda = 0.0;
  QuantizerRun idealized;
  QuantizerRun lloyd_max;
};

namespace detail {

struct DeliveredSample {
  double sample_time = 0.0;
  double decode_time = 0.0;
  double value = 0.0;  ///< quantized sample, filled in when the path reaches sample_time
};

/// Successive (sample, decode) instants of the successfully decoded messages.
class EpochTimeline {
 public:
  EpochTimeline(Scheme scheme, const CodingConfig& cfg, ThresholdWaitRule rule, FRTimeline fr_timeline, Rng rng)
      : scheme_{scheme}, sampler_{cfg}, attempts_{fr_attempt_dist(cfg)}, rule_{rule},
        spacing_{fr_attempt_spacing(cfg, fr_timeline)}, n_bar_{cfg.n_bar()}, rng_{rng},
        last_decode_{cfg.n_bar()}, last_age_{cfg.n_bar()} {}

  /// The message decoded at time n_bar after a sample at time 0.
  [[nodiscard]] DeliveredSample first() const { return {0.0, n_bar_, 0.0}; }

  DeliveredSample next() {
    DeliveredSample s;
    if (scheme_ == Scheme::iir) {
      s.sample_time = last_decode_ + rule_(last_age_);
      const double delay = sampler_.draw(rng_).delay;
      s.decode_time = s.sample_time + delay;
      last_age_ = delay;
    } else {
      s.decode_time = last_decode_ + static_cast<double>(sample_fr_attempts(attempts_, rng_)) * spacing_;
      s.sample_time = s.decode_time - n_bar_;
    }
    last_decode_ = s.decode_time;
    return s;
  }

 private:
  Scheme scheme_;
  IIRDelaySampler sampler_;
  FRAttemptDist attempts_;
  ThresholdWaitRule rule_;
  double spacing_;
  double n_bar_;
  Rng rng_;
  double last_decode_;
  double last_age_;
};

inline SimResult simulate_estimation_error(const OUParams& ou, int ell, QuantizerModel model,
                                           EpochTimeline timeline, const EndToEndOptions& opt) {
  opt.sim.validate();
  if (!(opt.dt > 0.0)) {
    throw std::invalid_argument("end_to_end: dt must be > 0");
  }
  const Rng root{opt.sim.seed};
  Rng path_rng = root.split(2);
  Rng quant_rng = root.split(3);
  Rng offset_rng = root.split(4);

  const double v = ou.variance();
  const double d = quantization_mse(ou, ell);
  const double gain = 1.0 - d / v;
  const double test_channel_sd = std::sqrt(d * gain);
  LloydMaxQuantizer lm;
  if (model == QuantizerModel::lloyd_max) {
    lm = lloyd_max_quantizer(v, ell);
  }
  auto quantize = [&](double x) {
    return model == QuantizerModel::idealized ? gain * x + test_channel_sd * quant_rng.normal() : lm.quantize(x);
  };

  OUProcess path{ou, std::sqrt(v) * path_rng.normal()};
  DeliveredSample current = timeline.first();
  current.value = quantize(path.value());
  std::deque<DeliveredSample> pending;
  DeliveredSample upcoming = timeline.next();

  const std::uint64_t warmup = std::min(opt.sim.warmup(), opt.sim.num_epochs - 1);
  RatioEstimator est{opt.sim.num_epochs - warmup, opt.sim.batches};
  const double offset = offset_rng.uniform() * opt.dt;
  double epoch_start = current.decode_time;
  double epoch_error = 0.0;
  std::uint64_t epochs = 0;
  // grid points t_k = first decode + offset + k dt
  const double grid0 = current.decode_time + offset;
  for (std::uint64_t k = 0; epochs < opt.sim.num_epochs; ++k) {
    const double t = grid0 + static_cast<double>(k) * opt.dt;
    while (upcoming.sample_time <= t) {
      upcoming.value = quantize(path.advance_to(upcoming.sample_time, path_rng));
      pending.push_back(upcoming);
      upcoming = timeline.next();
    }
    while (!pending.empty() && pending.front().decode_time <= t && epochs < opt.sim.num_epochs) {
      const DeliveredSample& done = pending.front();
      if (epochs >= warmup) {
        est.add(epoch_error, done.decode_time - epoch_start);
      }
      ++epochs;
      epoch_start = done.decode_time;
      epoch_error = 0.0;
      current = done;
      pending.pop_front();
    }
    if (epochs >= opt.sim.num_epochs) {
      break;
    }
    const double x = path.advance_to(t, path_rng);
    const double estimate = current.value * std::exp(-ou.theta() * (t - current.sample_time));
    epoch_error += (x - estimate) * (x - estimate) * opt.dt;
  }
  return est.finish();
}

}  // namespace detail

/// Simulates both quantizer models for the optimal policy of `scheme` and
/// compares the time-average squared error with the analytic lambda*.
[[nodiscard]] inline EndToEndReport end_to_end_mse_check(const OUParams& ou, const CodingConfig& cfg, Scheme scheme,
                                                         const EndToEndOptions& opt = {}) {
  EndToEndReport rep;
  rep.scheme = scheme;
  const OUMsePenalty h{ou, cfg.ell()};
  ThresholdWaitRule rule{};
  if (scheme == Scheme::iir) {
    const auto pmf = iir_delay_pmf(cfg);
    const auto sol = solve_iir(h, pmf);
    rep.analytic_lambda = sol.lambda_star;
    rule = sol.rule();
  } else {
    rep.analytic_lambda = fr_lambda_closed_form(ou, cfg, opt.timeline);
  }
  const Rng root{opt.sim.seed};
  for (auto model : {QuantizerModel::idealized, QuantizerModel::lloyd_max}) {
    QuantizerRun& run = model == QuantizerModel::idealized ? rep.idealized : rep.lloyd_max;
    run.model = model;
    // identical delivery timelines for both models
    detail::EpochTimeline timeline{scheme, cfg, rule, opt.timeline, root.split(1)};
    run.result = detail::simulate_estimation_error(ou, cfg.ell(), model, timeline, opt);
    run.rel_gap = (run.result.avg_penalty - rep.analytic_lambda) / rep.analytic_lambda;
  }
  return rep;
}

}  // namespace ouage

#endif  // OUAGE_END_TO_END_HPP
