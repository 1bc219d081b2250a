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

#ifndef OUAGE_QUANTIZER_HPP
#define OUAGE_QUANTIZER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

namespace ouage {

/// Scalar MMSE quantizer for a zero-mean Gaussian source.
struct LloydMaxQuantizer {
  std::vector<double> levels;      ///< 2^ell reconstruction points, ascending
  std::vector<double> thresholds;  ///< 2^ell - 1 cell boundaries, ascending
  double distortion = 0.0;         ///< E[(X - Q(X))^2]
  double mean_error = 0.0;         ///< E[X - Q(X)], zero at the fixed point
  int iterations = 0;

  [[nodiscard]] double quantize(double x) const {
    const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), x);
    return levels[static_cast<std::size_t>(it - thresholds.begin())];
  }
};

namespace detail {

inline double std_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
/// Upper tail P(Z > x); accurate far out in the tail.
inline double std_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

}  // namespace detail

inline constexpr int kLloydMaxIterCap = 100'000;

/**
 * Lloyd iteration on the standard normal, scaled by sqrt(variance).
 * Symmetry is imposed: only the positive half-line is iterated, with 0 as a
 * fixed threshold. Levels start from a companding rule (point density
 * proportional to pdf^{1/3}); iteration stops once no level moves by more than
 * 1e-10 standard deviations.
 */
[[nodiscard]] inline LloydMaxQuantizer lloyd_max_quantizer(double variance, int ell) {
  if (ell < 1 || ell > 8) {
    throw std::invalid_argument("lloyd_max_quantizer: ell must lie in [1, 8], got " + std::to_string(ell));
  }
  if (!(variance > 0.0)) {
    throw std::invalid_argument("lloyd_max_quantizer: variance must be > 0");
  }
  const std::size_t half = std::size_t{1} << (ell - 1);
  const boost::math::normal_distribution<double> wide(0.0, std::sqrt(3.0));
  std::vector<double> c(half);
  for (std::size_t i = 0; i < half; ++i) {
    c[i] = boost::math::quantile(wide, 0.5 + (static_cast<double>(i) + 0.5) / (2.0 * static_cast<double>(half)));
  }
  // cell i of the positive half is [t[i], t[i+1]) with t[0] = 0, t[half] = inf
  std::vector<double> t(half + 1);
  t[0] = 0.0;
  t[half] = std::numeric_limits<double>::infinity();
  auto update_thresholds = [&] {
    for (std::size_t i = 1; i < half; ++i) {
      t[i] = 0.5 * (c[i - 1] + c[i]);
    }
  };
  LloydMaxQuantizer out;
  for (out.iterations = 1;; ++out.iterations) {
    if (out.iterations > kLloydMaxIterCap) {
      throw std::runtime_error("lloyd_max_quantizer: no fixed point within " + std::to_string(kLloydMaxIterCap) +
                               " iterations");
    }
    update_thresholds();
    double shift = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      const double a = t[i];
      const double b = t[i + 1];
      const double mass = detail::std_q(a) - detail::std_q(b);
      const double moment = detail::std_pdf(a) - (std::isinf(b) ? 0.0 : detail::std_pdf(b));
      const double centroid = mass > 0.0 ? moment / mass : 0.5 * (a + (std::isinf(b) ? a + 1.0 : b));
      shift = std::max(shift, std::abs(centroid - c[i]));
      c[i] = centroid;
    }
    if (shift < 1e-10) {
      break;
    }
  }
  update_thresholds();

  // Per-cell moments on the positive half; the negative half mirrors them.
  double distortion = 0.0;
  double mean_error = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    const double a = t[i];
    const double b = t[i + 1];
    const double mass = detail::std_q(a) - detail::std_q(b);
    const double pa = detail::std_pdf(a);
    const double pb = std::isinf(b) ? 0.0 : detail::std_pdf(b);
    const double m1 = pa - pb;
    const double m2 = mass + a * pa - (std::isinf(b) ? 0.0 : b * pb);
    distortion += 2.0 * (m2 - 2.0 * c[i] * m1 + c[i] * c[i] * mass);
    mean_error += m1 - c[i] * mass;
  }
  // The mirrored half contributes -mean_error; report the one-sided residual
  // so a broken centroid step stays visible.
  out.mean_error = mean_error;
  out.distortion = variance * distortion;

  const double scale = std::sqrt(variance);
  out.levels.resize(2 * half);
  out.thresholds.resize(2 * half - 1);
  for (std::size_t i = 0; i < half; ++i) {
    out.levels[half + i] = scale * c[i];
    out.levels[half - 1 - i] = -scale * c[i];
  }
  out.thresholds[half - 1] = 0.0;
  for (std::size_t i = 1; i < half; ++i) {
    out.thresholds[half - 1 + i] = scale * t[i];
    out.thresholds[half - 1 - i] = -scale * t[i];
  }
  out.mean_error *= scale;
  return out;
}

}  // namespace ouage

#endif  // OUAGE_QUANTIZER_HPP
