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

#ifndef OUAGE_DETAIL_ROOT_FINDING_HPP
#define OUAGE_DETAIL_ROOT_FINDING_HPP

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace ouage {

/// The requested level is at or above the supremum of a bounded map.
class NonInvertibleLevel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A bisection bracket does not enclose a sign change.
class BracketError : public std::runtime_error {
 public:
  BracketError(const std::string& what, double lo, double f_lo, double hi, double f_hi)
      : std::runtime_error(what + ": p(" + std::to_string(lo) + ")=" + std::to_string(f_lo) + ", p(" +
                           std::to_string(hi) + ")=" + std::to_string(f_hi)),
        lo_{lo}, f_lo_{f_lo}, hi_{hi}, f_hi_{f_hi} {}

  [[nodiscard]] double lo() const noexcept { return lo_; }
  [[nodiscard]] double f_lo() const noexcept { return f_lo_; }
  [[nodiscard]] double hi() const noexcept { return hi_; }
  [[nodiscard]] double f_hi() const noexcept { return f_hi_; }

 private:
  double lo_, f_lo_, hi_, f_hi_;
};

namespace detail {

inline constexpr double kLevelSlack = 1e-12;
inline constexpr double kSearchCeiling = 1e15;

/**
 * Solves f(x) = level for x >= 0 where f is nondecreasing and f(0) < level.
 *
 * The upper end grows geometrically from 1. Throws NonInvertibleLevel when
 * `limit` (the supremum of f) is within kLevelSlack of level, or when f
 * stops growing before reaching it.
 */
template <class F>
double invert_increasing(const F& f, double level, double tol, std::optional<double> limit = std::nullopt) {
  if (limit && level >= *limit - kLevelSlack) {
    throw NonInvertibleLevel("level " + std::to_string(level) + " is not below the supremum " +
                             std::to_string(*limit));
  }
  double lo = 0.0;
  double hi = 1.0;
  double f_prev = f(lo);
  double f_hi = f(hi);
  while (f_hi < level) {
    if (hi > kSearchCeiling || (f_hi - f_prev) <= 1e-15 * std::max(1.0, std::abs(f_hi))) {
      throw NonInvertibleLevel("level " + std::to_string(level) + " not reached; map saturates near " +
                               std::to_string(f_hi));
    }
    lo = hi;
    f_prev = f_hi;
    hi *= 2.0;
    f_hi = f(hi);
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    if (f(mid) < level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct DecreasingRoot {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

/// Root of a decreasing function on [lo, hi]; stops once the bracket is
/// narrower than `tol` and |f(root)| <= tol.
template <class F>
DecreasingRoot bisect_decreasing(const F& f, double lo, double hi, double tol, int max_iter = 300) {
  const double f_lo = f(lo);
  const double f_hi = f(hi);
  if (!(f_lo >= 0.0 && f_hi <= 0.0)) {
    throw BracketError("bracket does not enclose the root", lo, f_lo, hi, f_hi);
  }
  DecreasingRoot out;
  double mid = 0.5 * (lo + hi);
  double f_mid = f(mid);
  for (out.iterations = 1; out.iterations < max_iter; ++out.iterations) {
    if (hi - lo <= tol && std::abs(f_mid) <= tol) {
      break;
    }
    if (f_mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    const double next = 0.5 * (lo + hi);
    if (next <= lo || next >= hi) {
      break;
    }
    mid = next;
    f_mid = f(mid);
  }
  out.root = mid;
  out.residual = f_mid;
  return out;
}

}  // namespace detail
}  // namespace ouage

#endif  // OUAGE_DETAIL_ROOT_FINDING_HPP
