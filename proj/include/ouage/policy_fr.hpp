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

#ifndef OUAGE_POLICY_FR_HPP
#define OUAGE_POLICY_FR_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "ouage/channel.hpp"
#include "ouage/detail/root_finding.hpp"
#include "ouage/penalty.hpp"

/**
 * \file
 * \brief Fixed-redundancy (FR) scheme: zero-wait policy and its average penalty.
 *
 * Every attempt carries a fresh sample and a successful decode always
 * leaves the receiver with age n_bar. Attempts start `spacing` apart:
 * K = max(beta, n T_b) in the pipelined (just-in-time) timeline, or
 * n_bar when each attempt waits for the previous feedback. An epoch with
 * M attempts and an initial wait w1 covers ages [n_bar, n_bar + w1 + M spacing].
 */

namespace ouage {

enum class FRTimeline { pipelined, sequential };

[[nodiscard]] inline const char* to_string(FRTimeline t) noexcept {
  return t == FRTimeline::pipelined ? "pipelined" : "sequential";
}

[[nodiscard]] inline double fr_attempt_spacing(const CodingConfig& cfg, FRTimeline timeline) noexcept {
  return timeline == FRTimeline::pipelined ? cfg.k_spacing() : cfg.n_bar();
}

/// Idle time between one delivery and the next transmission: [beta - n T_b]^+.
[[nodiscard]] inline double just_in_time_gap(const CodingConfig& cfg) noexcept {
  return std::max(cfg.beta() - cfg.n() * cfg.t_b(), 0.0);
}

class SeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;
  std::uint64_t terms = 0;
};

namespace detail {

inline constexpr double kSeriesTailTol = 1e-12;
inline constexpr std::uint64_t kSeriesCap = 50'000'000;

/// g(t) <= c0 + c1 t for all t >= 0.
struct GrowthBound {
  double c0 = 0.0;
  double c1 = 0.0;
};

template <AgePenalty G>
GrowthBound growth_bound(const G& g) {
  if (auto sup = penalty_upper_bound(g)) {
    return {*sup, 0.0};
  }
  if constexpr (AffineBoundedPenalty<G>) {
    const auto [c0, c1] = g.affine_growth();
    return {c0, c1};
  } else {
    throw SeriesError("FR series: penalty has neither a known supremum nor an affine growth bound");
  }
}

/// sum_{m > M} p0 q^{m-1} (c0 + c1 m + c2 m^2), q = 1 - p0, nonnegative coefficients.
inline double geometric_tail(double p0, std::uint64_t M, double c0, double c1, double c2) {
  const double q = 1.0 - p0;
  const double qm = std::pow(q, static_cast<double>(M));
  const double m = static_cast<double>(M);
  return qm * (c0 + c1 * (m + 1.0 / p0) + c2 * (m * m + 2.0 * m / p0 + (2.0 - p0) / (p0 * p0)));
}

/// sum_{m >= 1} p0 q^{m-1} term(m), truncated when `tail(M)` <= kSeriesTailTol.
template <class Term, class Tail>
SeriesValue geometric_series(double p0, const Term& term, const Tail& tail) {
  SeriesValue out;
  const double q = 1.0 - p0;
  double weight = p0;
  for (std::uint64_t m = 1;; ++m) {
    out.value += weight * term(m);
    out.terms = m;
    if (q <= 0.0) {
      out.tail_bound = 0.0;
      return out;
    }
    out.tail_bound = tail(m);
    if (out.tail_bound <= kSeriesTailTol) {
      return out;
    }
    if (m >= kSeriesCap) {
      throw SeriesError("FR series: no convergence after " + std::to_string(kSeriesCap) + " terms");
    }
    weight *= q;
  }
}

}  // namespace detail

/// G(x) = E[g(n_bar + x + M spacing)].
template <AgePenalty G>
[[nodiscard]] SeriesValue fr_expected_penalty_G(const G& g, const CodingConfig& cfg, const FRAttemptDist& attempts,
                                                double x = 0.0, FRTimeline timeline = FRTimeline::pipelined) {
  if (!(x >= 0.0)) {
    throw std::invalid_argument("fr_expected_penalty_G: wait must be >= 0");
  }
  const double s = fr_attempt_spacing(cfg, timeline);
  const double start = cfg.n_bar() + x;
  const auto bound = detail::growth_bound(g);
  return detail::geometric_series(
      attempts.p0, [&](std::uint64_t m) { return static_cast<double>(g(start + static_cast<double>(m) * s)); },
      [&](std::uint64_t M) {
        return detail::geometric_tail(attempts.p0, M, bound.c0 + bound.c1 * start, bound.c1 * s, 0.0);
      });
}

struct FRWaits {
  double first = 0.0;  ///< w1* = [G^{-1}(lambda)]^+
  double later = 0.0;  ///< w_j* for j >= 2, always zero

  [[nodiscard]] bool zero_wait() const noexcept { return first == 0.0 && later == 0.0; }
};

template <AgePenalty G>
[[nodiscard]] FRWaits fr_optimal_waits(const G& g, const CodingConfig& cfg, double lambda,
                                       FRTimeline timeline = FRTimeline::pipelined, double tol = 1e-11) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("fr_optimal_waits: lambda must be >= 0");
  }
  const auto attempts = fr_attempt_dist(cfg);
  auto G_of = [&](double x) { return fr_expected_penalty_G(g, cfg, attempts, x, timeline).value; };
  FRWaits out;
  if (G_of(0.0) < lambda) {
    out.first = detail::invert_increasing(G_of, lambda, tol, penalty_upper_bound(g));
  }
  return out;
}

/// E[integral of g over one epoch] for a first wait w1 and zero later waits.
template <AgePenalty G>
[[nodiscard]] SeriesValue fr_epoch_reward(const G& g, const CodingConfig& cfg, double w1 = 0.0,
                                          FRTimeline timeline = FRTimeline::pipelined) {
  const auto attempts = fr_attempt_dist(cfg);
  const double s = fr_attempt_spacing(cfg, timeline);
  const double nb = cfg.n_bar();
  const auto b = detail::growth_bound(g);
  // integral of (c0 + c1 t) over [nb, nb + w1 + m s], expanded in powers of m
  const double lin = b.c0 + b.c1 * nb;
  const double k0 = lin * w1 + 0.5 * b.c1 * w1 * w1;
  const double k1 = lin * s + b.c1 * w1 * s;
  const double k2 = 0.5 * b.c1 * s * s;
  return detail::geometric_series(
      attempts.p0,
      [&](std::uint64_t m) { return penalty_integral(g, nb, nb + w1 + static_cast<double>(m) * s); },
      [&](std::uint64_t M) { return detail::geometric_tail(attempts.p0, M, k0, k1, k2); });
}

/// Renewal-reward ratio of the zero-wait policy for any increasing penalty.
template <AgePenalty G>
[[nodiscard]] double fr_lambda_general(const G& g, const CodingConfig& cfg,
                                       FRTimeline timeline = FRTimeline::pipelined) {
  const auto attempts = fr_attempt_dist(cfg);
  const double length = fr_attempt_spacing(cfg, timeline) * attempts.mean();
  return fr_epoch_reward(g, cfg, 0.0, timeline).value / length;
}

/// Closed-form long-run average MMSE of zero-wait FR for the OU penalty.
[[nodiscard]] inline double fr_lambda_closed_form(const OUParams& ou, const CodingConfig& cfg,
                                                  FRTimeline timeline = FRTimeline::pipelined) {
  const double v = ou.variance();
  const double two_theta = 2.0 * ou.theta();
  const double keep = 1.0 - std::ldexp(1.0, -2 * cfg.ell());
  const double p0 = ack_prob(cfg, 0);
  const double k = fr_attempt_spacing(cfg, timeline);
  const double decay = std::exp(-two_theta * k);
  return v * (1.0 - keep * std::exp(-two_theta * cfg.n_bar()) * p0 / (two_theta * k) * (-std::expm1(-two_theta * k)) /
                        (1.0 - (1.0 - p0) * decay));
}

/// p^{FR}(lambda) under the optimal waits for that lambda.
template <AgePenalty G>
[[nodiscard]] double dinkelbach_value_fr(const G& g, const CodingConfig& cfg, double lambda,
                                         FRTimeline timeline = FRTimeline::pipelined) {
  const auto waits = fr_optimal_waits(g, cfg, lambda, timeline);
  const auto attempts = fr_attempt_dist(cfg);
  const double length = waits.first + fr_attempt_spacing(cfg, timeline) * attempts.mean();
  return fr_epoch_reward(g, cfg, waits.first, timeline).value - lambda * length;
}

struct FRSolution {
  double lambda_star = 0.0;
  double wait_gap = 0.0;         ///< idle time after a delivery before the next transmission
  double k_spacing = 0.0;        ///< spacing between attempt starts
  double first_wait = 0.0;       ///< w1* at lambda_star, zero at the optimum
  double series_tail_bound = 0.0;
  bool closed_form = false;
  FRTimeline timeline = FRTimeline::pipelined;
};

namespace detail {

inline FRSolution fr_solution_shell(const CodingConfig& cfg, FRTimeline timeline) {
  FRSolution sol;
  sol.timeline = timeline;
  sol.k_spacing = fr_attempt_spacing(cfg, timeline);
  sol.wait_gap = sol.k_spacing - cfg.n() * cfg.t_b();
  return sol;
}

}  // namespace detail

[[nodiscard]] inline FRSolution solve_fr(const OUParams& ou, const CodingConfig& cfg,
                                         FRTimeline timeline = FRTimeline::pipelined) {
  auto sol = detail::fr_solution_shell(cfg, timeline);
  sol.lambda_star = fr_lambda_closed_form(ou, cfg, timeline);
  sol.closed_form = true;
  sol.first_wait = fr_optimal_waits(OUMsePenalty{ou, cfg.ell()}, cfg, sol.lambda_star, timeline).first;
  return sol;
}

template <AgePenalty G>
[[nodiscard]] FRSolution solve_fr(const G& g, const CodingConfig& cfg, FRTimeline timeline = FRTimeline::pipelined) {
  auto sol = detail::fr_solution_shell(cfg, timeline);
  const auto attempts = fr_attempt_dist(cfg);
  const auto reward = fr_epoch_reward(g, cfg, 0.0, timeline);
  sol.lambda_star = reward.value / (sol.k_spacing * attempts.mean());
  sol.series_tail_bound = reward.tail_bound;
  sol.first_wait = fr_optimal_waits(g, cfg, sol.lambda_star, timeline).first;
  return sol;
}

}  // namespace ouage

#endif  // OUAGE_POLICY_FR_HPP
