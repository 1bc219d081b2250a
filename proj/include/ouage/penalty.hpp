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

#ifndef OUAGE_PENALTY_HPP
#define OUAGE_PENALTY_HPP

#include <cmath>
#include <concepts>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

/**
 * \file
 * \brief Ornstein-Uhlenbeck process parameters and age-penalty functionals.
 *
 * An age-penalty is any nondecreasing map from age-of-information to a
 * nonnegative cost. Penalties are plain value types satisfying the
 * `AgePenalty` concept; optional capabilities (exact integral, limit at
 * infinity, affine growth bound, derivative) are detected at compile time.
 */

namespace ouage {

/// Mean-reversion rate and diffusion scale of an OU process.
class OUParams {
 public:
  OUParams(double theta, double sigma) : theta_{theta}, sigma_{sigma} {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
      throw std::invalid_argument("OUParams: theta must be finite and > 0, got " + std::to_string(theta));
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw std::invalid_argument("OUParams: sigma must be finite and > 0, got " + std::to_string(sigma));
    }
  }

  [[nodiscard]] double theta() const noexcept { return theta_; }
  [[nodiscard]] double sigma() const noexcept { return sigma_; }

  /// sigma^2 / (2 theta).
  [[nodiscard]] double variance() const noexcept { return sigma_ * sigma_ / (2.0 * theta_); }

 private:
  double theta_;
  double sigma_;
};

[[nodiscard]] inline double steady_state_variance(const OUParams& p) noexcept { return p.variance(); }

/// Steady-state mean-square error of an ideal `ell`-bit quantizer.
[[nodiscard]] inline double quantization_mse(const OUParams& p, int ell) {
  if (ell < 1) {
    throw std::invalid_argument("quantization_mse: ell must be >= 1, got " + std::to_string(ell));
  }
  return std::ldexp(p.variance(), -2 * ell);
}

/// MMSE of the quantized estimate at age `delta`:
/// V * (1 - (1 - 2^{-2 ell}) e^{-2 theta delta}).
[[nodiscard]] inline double mse_penalty(const OUParams& p, int ell, double delta) {
  if (ell < 1) {
    throw std::invalid_argument("mse_penalty: ell must be >= 1, got " + std::to_string(ell));
  }
  if (!(delta >= 0.0)) {
    throw std::invalid_argument("mse_penalty: age must be >= 0, got " + std::to_string(delta));
  }
  const double keep = 1.0 - std::ldexp(1.0, -2 * ell);
  // std::exp underflows cleanly to 0 for large theta*delta
  return p.variance() * (1.0 - keep * std::exp(-2.0 * p.theta() * delta));
}

// ---------------------------------------------------------------------------
// Penalty concepts

template <class G>
concept AgePenalty = std::copy_constructible<G> && requires(const G& g, double t) {
  { g(t) } -> std::convertible_to<double>;
};

/// Penalty providing the exact value of \f$\int_a^b g\f$.
template <class G>
concept ExactlyIntegrable = AgePenalty<G> && requires(const G& g, double a, double b) {
  { g.integral(a, b) } -> std::convertible_to<double>;
};

/// Penalty with a finite limit at infinite age (which is also its supremum).
template <class G>
concept BoundedPenalty = AgePenalty<G> && requires(const G& g) {
  { g.limit() } -> std::convertible_to<double>;
};

/// Penalty known to satisfy g(t) <= c0 + c1 * t; used to bound series tails.
template <class G>
concept AffineBoundedPenalty = AgePenalty<G> && requires(const G& g) {
  { g.affine_growth() } -> std::convertible_to<std::pair<double, double>>;
};

/// Optional derivative. None of the solvers need it.
template <class G>
concept DifferentiablePenalty = AgePenalty<G> && requires(const G& g, double t) {
  { g.derivative(t) } -> std::convertible_to<double>;
};

// ---------------------------------------------------------------------------
// Penalty instances

/// The OU MMSE penalty h_ell.
class OUMsePenalty {
 public:
  OUMsePenalty(OUParams params, int ell) : params_{params}, ell_{ell} {
    if (ell < 1) {
      throw std::invalid_argument("OUMsePenalty: ell must be >= 1, got " + std::to_string(ell));
    }
  }

  [[nodiscard]] const OUParams& params() const noexcept { return params_; }
  [[nodiscard]] int ell() const noexcept { return ell_; }

  /// 1 - 2^{-2 ell}: the fraction of variance the quantized sample resolves.
  [[nodiscard]] double resolved_fraction() const noexcept { return 1.0 - std::ldexp(1.0, -2 * ell_); }

  [[nodiscard]] double operator()(double delta) const { return mse_penalty(params_, ell_, delta); }

  [[nodiscard]] double integral(double a, double b) const {
    const double two_theta = 2.0 * params_.theta();
    return params_.variance() *
           ((b - a) + resolved_fraction() * (std::exp(-two_theta * b) - std::exp(-two_theta * a)) / two_theta);
  }

  [[nodiscard]] double limit() const noexcept { return params_.variance(); }

  [[nodiscard]] double derivative(double delta) const {
    const double two_theta = 2.0 * params_.theta();
    return params_.variance() * resolved_fraction() * two_theta * std::exp(-two_theta * delta);
  }

 private:
  OUParams params_;
  int ell_;
};

/// g(t) = t: plain age-of-information.
struct LinearAgePenalty {
  [[nodiscard]] double operator()(double t) const noexcept { return t; }
  [[nodiscard]] double integral(double a, double b) const noexcept { return 0.5 * (b * b - a * a); }
  [[nodiscard]] std::pair<double, double> affine_growth() const noexcept { return {0.0, 1.0}; }
  [[nodiscard]] double derivative(double) const noexcept { return 1.0; }
};

struct ConstantPenalty {
  double value = 1.0;

  [[nodiscard]] double operator()(double) const noexcept { return value; }
  [[nodiscard]] double integral(double a, double b) const noexcept { return value * (b - a); }
  [[nodiscard]] double limit() const noexcept { return value; }
};

/// User-supplied penalty. Integrals fall back to adaptive quadrature.
class FunctionPenalty {
 public:
  explicit FunctionPenalty(std::function<double(double)> fn, std::optional<double> limit = std::nullopt)
      : fn_{std::move(fn)}, limit_{limit} {}

  [[nodiscard]] double operator()(double t) const { return fn_(t); }
  [[nodiscard]] const std::optional<double>& known_limit() const noexcept { return limit_; }

 private:
  std::function<double(double)> fn_;
  std::optional<double> limit_;
};

// ---------------------------------------------------------------------------
// Integration

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double fa, double b, double fb, double m, double fm, double whole,
                    double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
template <class F>
[[nodiscard]] double adaptive_simpson(const F& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
  if (a == b) {
    return 0.0;
  }
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

/// Accumulated penalty over ages [a, b].
template <AgePenalty G>
[[nodiscard]] double penalty_integral(const G& g, double a, double b) {
  if (!(a >= 0.0)) {
    throw std::invalid_argument("penalty_integral: lower limit must be >= 0, got " + std::to_string(a));
  }
  if (!(a <= b)) {
    throw std::invalid_argument("penalty_integral: need a <= b, got [" + std::to_string(a) + ", " +
                                std::to_string(b) + "]");
  }
  if (a == b) {
    return 0.0;
  }
  if constexpr (ExactlyIntegrable<G>) {
    return g.integral(a, b);
  } else {
    return adaptive_simpson(g, a, b, 1e-12);
  }
}

/// Finite supremum of g if known, else nullopt.
template <AgePenalty G>
[[nodiscard]] std::optional<double> penalty_upper_bound(const G& g) {
  if constexpr (BoundedPenalty<G>) {
    return g.limit();
  } else if constexpr (std::same_as<G, FunctionPenalty>) {
    return g.known_limit();
  } else {
    return std::nullopt;
  }
}

}  // namespace ouage

#endif  // OUAGE_PENALTY_HPP
