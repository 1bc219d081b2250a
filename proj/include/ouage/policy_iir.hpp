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

#ifndef OUAGE_POLICY_IIR_HPP
#define OUAGE_POLICY_IIR_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

#include "ouage/channel.hpp"
#include "ouage/detail/root_finding.hpp"
#include "ouage/penalty.hpp"

/**
 * \file
 * \brief Optimal waiting for the incremental-redundancy (IIR) scheme.
 *
 * An epoch starts at a delivery with age ybar (the previous delay), waits
 * w(ybar), samples, and ends after a fresh delay Y. The long-run average
 * penalty is a ratio of expectations, solved by Dinkelbach bisection on
 * lambda. For fixed lambda the best wait is w(ybar) = [G_ybar^{-1}(lambda)]^+
 * with G_ybar(x) = E[g(ybar + x + Y)]. G depends on ybar + x only, so the
 * rule is a threshold: wait until the age reaches a target, then sample.
 */

namespace ouage {

/// G_ybar(x) = E[g(ybar + x + Y)].
template <AgePenalty G>
[[nodiscard]] double expected_penalty_G(const G& g, const IIRDelayPmf& pmf, double y_bar, double x) {
  if (!(y_bar >= 0.0) || !(x >= 0.0)) {
    throw std::invalid_argument("expected_penalty_G: age and wait must be >= 0");
  }
  return pmf.expect([&](double y) { return static_cast<double>(g(y_bar + x + y)); });
}

/// [G_ybar^{-1}(lambda)]^+ by bisection on the wait.
template <AgePenalty G>
[[nodiscard]] double invert_G(const G& g, const IIRDelayPmf& pmf, double y_bar, double lambda,
                              double tol = 1e-11) {
  auto G_of = [&](double x) { return expected_penalty_G(g, pmf, y_bar, x); };
  if (G_of(0.0) >= lambda) {
    return 0.0;
  }
  return detail::invert_increasing(G_of, lambda, tol, penalty_upper_bound(g));
}

/// w(ybar) = [threshold - ybar]^+.
struct ThresholdWaitRule {
  double threshold = 0.0;
  [[nodiscard]] double operator()(double y_bar) const noexcept { return std::max(threshold - y_bar, 0.0); }
};

/// Target age of the threshold rule for level lambda (general penalty).
template <AgePenalty G>
[[nodiscard]] ThresholdWaitRule threshold_rule(const G& g, const IIRDelayPmf& pmf, double lambda,
                                               double tol = 1e-11) {
  return {invert_G(g, pmf, 0.0, lambda, tol)};
}

/// Target age in closed form for the OU penalty; may be negative.
[[nodiscard]] inline double ou_target_age(const OUMsePenalty& h, const IIRDelayPmf& pmf, double lambda) {
  const double v = h.params().variance();
  if (!(lambda < v)) {
    throw NonInvertibleLevel("ou_threshold_wait: lambda=" + std::to_string(lambda) +
                             " must be below the steady-state variance " + std::to_string(v));
  }
  const double two_theta = 2.0 * h.params().theta();
  const double moment = exp_moment_iir(pmf, two_theta);
  return std::log(v * h.resolved_fraction() * moment / (v - lambda)) / two_theta;
}

/// Closed-form optimal wait for the OU penalty at starting age ybar.
[[nodiscard]] inline double ou_threshold_wait(const OUMsePenalty& h, const IIRDelayPmf& pmf, double lambda,
                                              double y_bar) {
  return std::max(ou_target_age(h, pmf, lambda) - y_bar, 0.0);
}

/// E[reward - lambda * length] of one epoch under an arbitrary wait rule,
/// with ybar and Y independent and both distributed as the delay.
template <AgePenalty G, class Rule>
[[nodiscard]] double dinkelbach_value_iir(const G& g, const IIRDelayPmf& pmf, double lambda, const Rule& rule) {
  double reward = 0.0;
  double length = 0.0;
  pmf.for_each_atom([&](double y_bar, double q_bar) {
    const double w = rule(y_bar);
    pmf.for_each_atom([&](double y, double q) {
      reward += q_bar * q * penalty_integral(g, y_bar, y_bar + w + y);
      length += q_bar * q * (w + y);
    });
  });
  return reward - lambda * length;
}

/// p^{IIR}(lambda) with the optimal threshold rule found by numeric inversion.
template <AgePenalty G>
[[nodiscard]] double dinkelbach_value_iir(const G& g, const IIRDelayPmf& pmf, double lambda,
                                          double wait_tol = 1e-11) {
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("dinkelbach_value_iir: lambda must be >= 0");
  }
  return dinkelbach_value_iir(g, pmf, lambda, threshold_rule(g, pmf, lambda, wait_tol));
}

/// p^{IIR}(lambda) for the OU penalty, closed-form wait and inner expectation.
[[nodiscard]] inline double dinkelbach_value_iir_ou(const OUMsePenalty& h, const IIRDelayPmf& pmf,
                                                    double lambda) {
  const double v = h.params().variance();
  const double two_theta = 2.0 * h.params().theta();
  const double moment = exp_moment_iir(pmf, two_theta);
  const double mean_delay = pmf.mean();
  const double scale = v * h.resolved_fraction() / two_theta;
  const ThresholdWaitRule rule{ou_target_age(h, pmf, lambda)};
  double value = 0.0;
  pmf.for_each_atom([&](double y_bar, double q_bar) {
    const double w = rule(y_bar);
    // E_Y of the exact integral of h over [ybar, ybar + w + Y]
    const double reward =
        v * (w + mean_delay) + scale * (std::exp(-two_theta * (y_bar + w)) * moment - std::exp(-two_theta * y_bar));
    value += q_bar * (reward - lambda * (w + mean_delay));
  });
  return value;
}

struct IIRSolverOptions {
  double lambda_tol = 1e-9;
  double wait_tol = 1e-11;
  std::optional<std::pair<double, double>> bracket;
  bool force_general = false;  ///< skip the OU closed form
};

struct IIRSolution {
  double lambda_star = 0.0;
  double threshold = 0.0;   ///< target age; w*(ybar) = 0 for ybar >= threshold
  int iterations = 0;
  double residual = 0.0;    ///< p^{IIR}(lambda_star)
  double tail_bound = 0.0;  ///< delay-pmf tail mass times sup g
  bool closed_form = false;

  [[nodiscard]] ThresholdWaitRule rule() const noexcept { return {threshold}; }
  [[nodiscard]] double wait(double y_bar) const noexcept { return rule()(y_bar); }
};

/// Default lambda bracket: [V 2^{-2 ell}, V) for the OU penalty, [g(0), sup g)
/// for other bounded penalties, and a doubling search for unbounded ones.
template <AgePenalty G>
[[nodiscard]] std::pair<double, double> default_iir_bracket(const G& g, const IIRDelayPmf& pmf) {
  if constexpr (std::is_same_v<G, OUMsePenalty>) {
    const double v = g.params().variance();
    return {std::ldexp(v, -2 * g.ell()), v * (1.0 - 1e-9)};
  } else {
    const double lo = g(0.0);
    if (auto sup = penalty_upper_bound(g)) {
      return {lo, *sup - 2.0 * detail::kLevelSlack};
    }
    double hi = std::max(1.0, 2.0 * std::abs(lo));
    for (int i = 0; i < 200 && dinkelbach_value_iir(g, pmf, hi) > 0.0; ++i) {
      hi *= 2.0;
    }
    return {lo, hi};
  }
}

/// Dinkelbach bisection: lambda* solves p^{IIR}(lambda) = 0.
template <AgePenalty G>
[[nodiscard]] IIRSolution solve_iir(const G& g, const IIRDelayPmf& pmf, const IIRSolverOptions& opt = {}) {
  const auto [lo, hi] = opt.bracket ? *opt.bracket : default_iir_bracket(g, pmf);
  IIRSolution sol;
  detail::DecreasingRoot root;
  if constexpr (std::is_same_v<G, OUMsePenalty>) {
    if (!opt.force_general) {
      root = detail::bisect_decreasing([&](double l) { return dinkelbach_value_iir_ou(g, pmf, l); }, lo, hi,
                                       opt.lambda_tol);
      sol.closed_form = true;
      sol.threshold = std::max(ou_target_age(g, pmf, root.root), 0.0);
    }
  }
  if (!sol.closed_form) {
    root = detail::bisect_decreasing([&](double l) { return dinkelbach_value_iir(g, pmf, l, opt.wait_tol); }, lo,
                                     hi, opt.lambda_tol);
    sol.threshold = threshold_rule(g, pmf, root.root, opt.wait_tol).threshold;
  }
  sol.lambda_star = root.root;
  sol.iterations = root.iterations;
  sol.residual = root.residual;
  const auto sup = penalty_upper_bound(g);
  sol.tail_bound = pmf.tail * (sup ? *sup : 1.0);
  return sol;
}

}  // namespace ouage

#endif  // OUAGE_POLICY_IIR_HPP
