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

#ifndef OUAGE_CHANNEL_HPP
#define OUAGE_CHANNEL_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ouage/rng.hpp"

namespace ouage {

/// Quantization and channel-coding parameters shared by both schemes.
class CodingConfig {
 public:
  CodingConfig(int ell, int n, double t_b, double beta, double epsilon)
      : ell_{ell}, n_{n}, t_b_{t_b}, beta_{beta}, epsilon_{epsilon} {
    if (ell < 1) {
      throw std::invalid_argument("CodingConfig: ell must be >= 1, got " + std::to_string(ell));
    }
    if (n < ell) {
      throw std::invalid_argument("CodingConfig: need n >= ell, got n=" + std::to_string(n) +
                                  " ell=" + std::to_string(ell));
    }
    if (!(t_b > 0.0) || !std::isfinite(t_b)) {
      throw std::invalid_argument("CodingConfig: t_b must be finite and > 0, got " + std::to_string(t_b));
    }
    if (!(beta >= 0.0) || !std::isfinite(beta)) {
      throw std::invalid_argument("CodingConfig: beta must be finite and >= 0, got " + std::to_string(beta));
    }
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
      throw std::invalid_argument("CodingConfig: epsilon must lie in (0, 0.5), got " + std::to_string(epsilon));
    }
  }

  [[nodiscard]] int ell() const noexcept { return ell_; }
  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] double t_b() const noexcept { return t_b_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }
  [[nodiscard]] double epsilon() const noexcept { return epsilon_; }

  /// Codeword airtime plus one decoding interval.
  [[nodiscard]] double n_bar() const noexcept { return n_ * t_b_ + beta_; }
  /// Extra delay per incremental-redundancy bit.
  [[nodiscard]] double ir_step() const noexcept { return t_b_ + beta_; }
  /// Spacing between FR attempt starts under just-in-time operation.
  [[nodiscard]] double k_spacing() const noexcept { return std::max(beta_, n_ * t_b_); }

 private:
  int ell_;
  int n_;
  double t_b_;
  double beta_;
  double epsilon_;
};

namespace detail {

/// sum_{k=first}^{last} P(Binomial(trials, eps) = k), accumulated in the log domain.
inline double binomial_range_mass(int first, int last, int trials, double eps) {
  const double log_ratio = std::log(eps) - std::log1p(-eps);
  std::vector<double> log_terms;
  log_terms.reserve(static_cast<std::size_t>(last - first) + 1);
  double lt = std::lgamma(trials + 1.0) - std::lgamma(first + 1.0) - std::lgamma(trials - first + 1.0) +
              first * std::log(eps) + (trials - first) * std::log1p(-eps);
  log_terms.push_back(lt);
  for (int k = first; k < last; ++k) {
    lt += std::log(static_cast<double>(trials - k) / static_cast<double>(k + 1)) + log_ratio;
    log_terms.push_back(lt);
  }
  const double peak = *std::max_element(log_terms.begin(), log_terms.end());
  double acc = 0.0;
  for (double v : log_terms) {
    acc += std::exp(v - peak);
  }
  return std::exp(peak) * acc;
}

}  // namespace detail

/// P(Binomial(trials, eps) <= radius). Above the mean the upper tail is summed
/// and complemented, so values near 1 are not swamped by rounding.
[[nodiscard]] inline double binomial_cdf(int radius, int trials, double eps) {
  if (radius < 0) {
    return 0.0;
  }
  if (radius >= trials) {
    return 1.0;
  }
  if (radius >= trials * eps) {
    return std::max(0.0, 1.0 - detail::binomial_range_mass(radius + 1, trials, trials, eps));
  }
  return std::min(1.0, detail::binomial_range_mass(0, radius, trials, eps));
}

/// Decoding success probability once `j` IR bits have been appended: an MDS
/// code of length n + j over a BSC corrects floor((n + j - ell) / 2) errors.
[[nodiscard]] inline double ack_prob(const CodingConfig& cfg, int j) {
  if (j < 0) {
    throw std::invalid_argument("ack_prob: j must be >= 0, got " + std::to_string(j));
  }
  const int length = cfg.n() + j;
  return binomial_cdf((length - cfg.ell()) / 2, length, cfg.epsilon());
}

/// Default success-probability sequence (BSC + MDS).
struct BscMdsAck {
  CodingConfig cfg;
  [[nodiscard]] double operator()(int j) const { return ack_prob(cfg, j); }
};

/// Any map j -> p_j in [0, 1].
template <class A>
concept AckSequence = requires(const A& a, int j) {
  { a(j) } -> std::convertible_to<double>;
};

struct MonotoneVerdict {
  int j_max = 0;
  bool monotone = true;
  std::optional<int> first_violation;  ///< smallest j with p_{j+1} < p_j
  double worst_drop = 0.0;             ///< max over j of p_j - p_{j+1}
};

class MonotonicityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Checks p_j <= p_{j+1} for j in [0, j_max).
template <AckSequence A>
[[nodiscard]] MonotoneVerdict check_ack_monotone(const A& ack, int j_max) {
  MonotoneVerdict v;
  v.j_max = j_max;
  double prev = ack(0);
  for (int j = 0; j < j_max; ++j) {
    const double next = ack(j + 1);
    if (next < prev) {
      if (!v.first_violation) {
        v.first_violation = j;
      }
      v.monotone = false;
      v.worst_drop = std::max(v.worst_drop, prev - next);
    }
    prev = next;
  }
  return v;
}

[[nodiscard]] inline MonotoneVerdict check_ack_monotone(const CodingConfig& cfg, int j_max) {
  return check_ack_monotone(BscMdsAck{cfg}, j_max);
}

/// Same check, throwing MonotonicityViolation on failure.
template <class A>
MonotoneVerdict require_ack_monotone(const A& ack, int j_max) {
  auto v = check_ack_monotone(ack, j_max);
  if (!v.monotone) {
    throw MonotonicityViolation("p_j decreases at j=" + std::to_string(*v.first_violation) +
                                " (largest drop " + std::to_string(v.worst_drop) + ")");
  }
  return v;
}

/**
 * Truncated law of the IIR channel delay Y.
 *
 * Atom k sits at first + k * step with mass q_k. The unrepresented mass
 * `tail` = P(Y > y_K) is kept separately and is never folded into the q_k.
 * Expectations place it on the next support point y_{K+1}, the smallest
 * value it can take, which makes them exact lower bounds in stochastic
 * order. `tail` bounds their error for any integrand with range <= 1.
 */
struct IIRDelayPmf {
  double first = 0.0;
  double step = 0.0;
  std::vector<double> prob;
  double tail = 0.0;

  /// Degenerate delay. `step` only fixes where the (zero) tail would sit.
  [[nodiscard]] static IIRDelayPmf point_mass(double y, double step = 1.0) { return {y, step, {1.0}, 0.0}; }

  [[nodiscard]] std::size_t size() const noexcept { return prob.size(); }
  [[nodiscard]] double support(std::size_t k) const noexcept { return first + static_cast<double>(k) * step; }
  [[nodiscard]] double tail_support() const noexcept { return support(prob.size()); }

  [[nodiscard]] double mass() const noexcept {
    double s = 0.0;
    for (double q : prob) {
      s += q;
    }
    return s;
  }

  /// E[f(Y)] with the tail mass placed at tail_support().
  template <class F>
  [[nodiscard]] double expect(const F& f) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < prob.size(); ++k) {
      acc += prob[k] * f(support(k));
    }
    if (tail > 0.0) {
      acc += tail * f(tail_support());
    }
    return acc;
  }

  /// Calls f(y, mass) for every atom, the tail atom included.
  template <class F>
  void for_each_atom(const F& f) const {
    for (std::size_t k = 0; k < prob.size(); ++k) {
      f(support(k), prob[k]);
    }
    if (tail > 0.0) {
      f(tail_support(), tail);
    }
  }

  [[nodiscard]] double mean() const {
    return expect([](double y) { return y; });
  }
};

inline constexpr std::size_t kMaxDelaySupport = 1'000'000;

/// Builds the IIR delay pmf from an arbitrary success-probability sequence:
/// q_k = p_k prod_{j<k} (1 - p_j), truncated once P(Y > y_K) <= tail_tol.
template <AckSequence A>
[[nodiscard]] IIRDelayPmf iir_delay_pmf(const CodingConfig& cfg, const A& ack, double tail_tol) {
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) {
    throw std::invalid_argument("iir_delay_pmf: tail_tol must lie in (0, 1), got " + std::to_string(tail_tol));
  }
  IIRDelayPmf pmf{cfg.n_bar(), cfg.ir_step(), {}, 1.0};
  double survival = 1.0;
  for (int k = 0; survival > tail_tol; ++k) {
    if (pmf.prob.size() >= kMaxDelaySupport) {
      throw std::runtime_error("iir_delay_pmf: residual mass " + std::to_string(survival) + " still above " +
                               std::to_string(tail_tol) + " after " + std::to_string(kMaxDelaySupport) +
                               " support points");
    }
    const double p = std::clamp(static_cast<double>(ack(k)), 0.0, 1.0);
    pmf.prob.push_back(survival * p);
    survival *= (1.0 - p);
  }
  pmf.tail = survival;
  return pmf;
}

[[nodiscard]] inline IIRDelayPmf iir_delay_pmf(const CodingConfig& cfg, double tail_tol = 1e-13) {
  return iir_delay_pmf(cfg, BscMdsAck{cfg}, tail_tol);
}

/// E[e^{-rate Y}].
[[nodiscard]] inline double exp_moment_iir(const IIRDelayPmf& pmf, double rate) {
  if (!(rate >= 0.0)) {
    throw std::invalid_argument("exp_moment_iir: rate must be >= 0");
  }
  return pmf.expect([rate](double y) { return std::exp(-rate * y); });
}

/// Geometric number of FR attempts per successful delivery.
struct FRAttemptDist {
  double p0 = 1.0;

  /// P(M = m), m >= 1.
  [[nodiscard]] double pmf(std::uint64_t m) const {
    if (m == 0) {
      return 0.0;
    }
    return std::pow(1.0 - p0, static_cast<double>(m - 1)) * p0;
  }
  [[nodiscard]] double mean() const noexcept { return 1.0 / p0; }
};

[[nodiscard]] inline FRAttemptDist fr_attempt_dist(const CodingConfig& cfg) {
  const double p0 = ack_prob(cfg, 0);
  if (!(p0 > 0.0)) {
    throw std::runtime_error("fr_attempt_dist: p0 underflowed to 0");
  }
  return FRAttemptDist{p0};
}

// ---------------------------------------------------------------------------
// Samplers

struct IIRDelayDraw {
  double delay = 0.0;
  int ir_bits = 0;  ///< IR bits appended before the ACK
};

/// Sequential IIR delivery process. Success probabilities are computed on
/// first use and cached; one instance per worker.
class IIRDelaySampler {
 public:
  explicit IIRDelaySampler(const CodingConfig& cfg) : cfg_{cfg} {}

  [[nodiscard]] const CodingConfig& config() const noexcept { return cfg_; }

  IIRDelayDraw draw(Rng& rng) {
    int j = 0;
    while (!rng.bernoulli(p(j))) {
      ++j;
    }
    return {cfg_.n_bar() + j * cfg_.ir_step(), j};
  }

  double p(int j) {
    while (static_cast<int>(cache_.size()) <= j) {
      cache_.push_back(ack_prob(cfg_, static_cast<int>(cache_.size())));
    }
    return cache_[static_cast<std::size_t>(j)];
  }

 private:
  CodingConfig cfg_;
  std::vector<double> cache_;
};

[[nodiscard]] inline double sample_iir_delay(const CodingConfig& cfg, Rng& rng) {
  IIRDelaySampler sampler{cfg};
  return sampler.draw(rng).delay;
}

[[nodiscard]] inline std::uint64_t sample_fr_attempts(const FRAttemptDist& dist, Rng& rng) {
  return rng.geometric(dist.p0);
}

[[nodiscard]] inline std::uint64_t sample_fr_attempts(const CodingConfig& cfg, Rng& rng) {
  return sample_fr_attempts(fr_attempt_dist(cfg), rng);
}

}  // namespace ouage

#endif  // OUAGE_CHANNEL_HPP
