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

#ifndef OUAGE_EXPERIMENTS_HPP
#define OUAGE_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "ouage/channel.hpp"
#include "ouage/penalty.hpp"
#include "ouage/policy_fr.hpp"
#include "ouage/policy_iir.hpp"
#include "ouage/sim.hpp"

namespace ouage {

/// Parameter grid over (scheme, theta, epsilon, beta, ell, n).
struct SweepSpec {
  double sigma = 1.0;
  std::vector<double> thetas{0.5};
  std::vector<double> epsilons{0.1};
  int ell_min = 1;
  int ell_max = 8;
  int min_redundancy = 0;  ///< n starts at ell + min_redundancy
  int n_extra = 24;        ///< and ends at ell + n_extra
  double t_b = 0.05;
  std::vector<double> betas{0.15};
  std::vector<Scheme> schemes{Scheme::iir, Scheme::fr};
  FRTimeline fr_timeline = FRTimeline::pipelined;
  double tail_tol = 1e-13;
  double lambda_tol = 1e-9;
  unsigned workers = 0;  ///< 0: hardware concurrency

  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("SweepSpec: " + m); };
    if (!(sigma > 0.0)) fail("sigma must be > 0");
    if (thetas.empty()) fail("theta grid is empty");
    if (epsilons.empty()) fail("epsilon grid is empty");
    if (betas.empty()) fail("beta grid is empty");
    if (schemes.empty()) fail("no schemes selected");
    if (ell_min < 1 || ell_max < ell_min) fail("ell range must satisfy 1 <= ell_min <= ell_max");
    if (min_redundancy < 0 || n_extra < min_redundancy) fail("n range must satisfy 0 <= min_redundancy <= n_extra");
    for (double th : thetas) {
      if (!(th > 0.0)) fail("theta values must be > 0");
    }
    for (double e : epsilons) {
      if (!(e > 0.0 && e < 0.5)) fail("epsilon values must lie in (0, 0.5)");
    }
    for (double b : betas) {
      if (!(b >= 0.0)) fail("beta values must be >= 0");
    }
    if (!(t_b > 0.0)) fail("t_b must be > 0");
  }
};

struct SweepRecord {
  Scheme scheme = Scheme::iir;
  double theta = 0.0;
  double sigma = 0.0;
  double epsilon = 0.0;
  int ell = 0;
  int n = 0;
  double t_b = 0.0;
  double beta = 0.0;
  double lambda_star = 0.0;
  int iterations = 0;
  double residual = 0.0;

  bool operator==(const SweepRecord&) const = default;
};

struct SweepFailure {
  SweepRecord point;  ///< lambda_star etc. unset
  std::string message;
};

/// Best (ell, n) for one (scheme, theta, epsilon, beta) setting.
struct ArgminRecord {
  Scheme scheme = Scheme::iir;
  double theta = 0.0;
  double sigma = 0.0;
  double epsilon = 0.0;
  double t_b = 0.0;
  double beta = 0.0;
  int ell_star = 0;
  int n_star = 0;
  double lambda_star = 0.0;
  std::vector<std::pair<int, int>> ties;  ///< every (ell, n) within the tie tolerance, sorted

  bool operator==(const ArgminRecord&) const = default;
};

struct SweepResult {
  std::vector<SweepRecord> records;
  std::vector<ArgminRecord> argmins;
  std::vector<SweepFailure> failures;

  [[nodiscard]] const ArgminRecord* find(Scheme scheme, double theta, double epsilon, double beta) const {
    for (const auto& a : argmins) {
      if (a.scheme == scheme && a.theta == theta && a.epsilon == epsilon && a.beta == beta) {
        return &a;
      }
    }
    return nullptr;
  }
};

inline constexpr double kTieRelTol = 1e-9;

/// lambda* of one grid point: Dinkelbach bisection for IIR, closed form for FR.
[[nodiscard]] inline SweepRecord solve_point(Scheme scheme, const OUParams& ou, const CodingConfig& cfg,
                                             const SweepSpec& spec) {
  SweepRecord r{scheme, ou.theta(), ou.sigma(), cfg.epsilon(), cfg.ell(), cfg.n(), cfg.t_b(), cfg.beta()};
  const OUMsePenalty h{ou, cfg.ell()};
  if (scheme == Scheme::iir) {
    const auto pmf = iir_delay_pmf(cfg, spec.tail_tol);
    IIRSolverOptions opt;
    opt.lambda_tol = spec.lambda_tol;
    const auto sol = solve_iir(h, pmf, opt);
    r.lambda_star = sol.lambda_star;
    r.iterations = sol.iterations;
    r.residual = sol.residual;
  } else {
    r.lambda_star = fr_lambda_closed_form(ou, cfg, spec.fr_timeline);
    r.residual = dinkelbach_value_fr(h, cfg, r.lambda_star, spec.fr_timeline);
  }
  return r;
}

namespace detail {

inline std::vector<ArgminRecord> argmins_of(const std::vector<SweepRecord>& records) {
  using Key = std::tuple<int, double, double, double>;
  std::map<Key, std::vector<const SweepRecord*>> groups;
  for (const auto& r : records) {
    groups[{static_cast<int>(r.scheme), r.theta, r.epsilon, r.beta}].push_back(&r);
  }
  std::vector<ArgminRecord> out;
  for (const auto& [key, members] : groups) {
    double best = members.front()->lambda_star;
    for (const auto* m : members) {
      best = std::min(best, m->lambda_star);
    }
    ArgminRecord a;
    const auto* first = members.front();
    a.scheme = first->scheme;
    a.theta = first->theta;
    a.sigma = first->sigma;
    a.epsilon = first->epsilon;
    a.t_b = first->t_b;
    a.beta = first->beta;
    a.lambda_star = best;
    for (const auto* m : members) {
      if (m->lambda_star <= best + kTieRelTol * std::abs(best)) {
        a.ties.emplace_back(m->ell, m->n);
      }
    }
    std::sort(a.ties.begin(), a.ties.end());
    a.ell_star = a.ties.front().first;
    a.n_star = a.ties.front().second;
    for (const auto* m : members) {
      if (m->ell == a.ell_star && m->n == a.n_star) {
        a.lambda_star = m->lambda_star;
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace detail

/// Solves every grid point (concurrently) and reports the argmin per setting.
/// Record order is canonical regardless of the worker count. `solve` maps
/// (scheme, ou, cfg, spec) to a record; exceptions it throws are recorded as
/// failures and the point is skipped.
template <class PointSolver>
[[nodiscard]] SweepResult grid_search(const SweepSpec& spec, const PointSolver& solve) {
  spec.validate();
  struct Point {
    Scheme scheme;
    double theta, epsilon, beta;
    int ell, n;
  };
  std::vector<Point> points;
  for (Scheme s : spec.schemes) {
    for (double th : spec.thetas) {
      for (double e : spec.epsilons) {
        for (double b : spec.betas) {
          for (int l = spec.ell_min; l <= spec.ell_max; ++l) {
            for (int n = l + spec.min_redundancy; n <= l + spec.n_extra; ++n) {
              points.push_back({s, th, e, b, l, n});
            }
          }
        }
      }
    }
  }
  std::vector<std::optional<SweepRecord>> solved(points.size());
  std::vector<std::string> errors(points.size());
  std::atomic<std::size_t> cursor{0};
  auto work = [&] {
    for (std::size_t i = cursor++; i < points.size(); i = cursor++) {
      const auto& p = points[i];
      try {
        const OUParams ou{p.theta, spec.sigma};
        const CodingConfig cfg{p.ell, p.n, spec.t_b, p.beta, p.epsilon};
        solved[i] = solve(p.scheme, ou, cfg, spec);
      } catch (const std::exception& ex) {
        errors[i] = ex.what();
      }
    }
  };
  unsigned workers = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, points.size())));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  SweepResult res;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (solved[i]) {
      res.records.push_back(*solved[i]);
    } else {
      const auto& p = points[i];
      res.failures.push_back({{p.scheme, p.theta, spec.sigma, p.epsilon, p.ell, p.n, spec.t_b, p.beta}, errors[i]});
    }
  }
  res.argmins = detail::argmins_of(res.records);
  return res;
}

[[nodiscard]] inline SweepResult grid_search(const SweepSpec& spec) {
  return grid_search(spec, [](Scheme s, const OUParams& ou, const CodingConfig& cfg, const SweepSpec& sp) {
    return solve_point(s, ou, cfg, sp);
  });
}

/// One lambda*(beta) curve (n, and ell if ranged, optimized per beta).
struct BetaCurve {
  Scheme scheme = Scheme::iir;
  double theta = 0.0;
  double epsilon = 0.0;
  std::vector<double> betas;
  std::vector<double> lambdas;
};

struct BetaSweepResult {
  SweepResult sweep;
  std::vector<BetaCurve> curves;  ///< ordered by (scheme, theta, epsilon)

  [[nodiscard]] const BetaCurve* curve(Scheme scheme, double theta, double epsilon) const {
    for (const auto& c : curves) {
      if (c.scheme == scheme && c.theta == theta && c.epsilon == epsilon) {
        return &c;
      }
    }
    return nullptr;
  }
};

[[nodiscard]] inline BetaSweepResult beta_sweep(const SweepSpec& spec) {
  if (spec.betas.empty()) {
    throw std::invalid_argument("beta_sweep: beta grid is empty");
  }
  BetaSweepResult out;
  out.sweep = grid_search(spec);
  std::vector<double> betas = spec.betas;
  std::sort(betas.begin(), betas.end());
  for (Scheme s : spec.schemes) {
    for (double th : spec.thetas) {
      for (double e : spec.epsilons) {
        BetaCurve c{s, th, e, {}, {}};
        for (double b : betas) {
          if (const auto* a = out.sweep.find(s, th, e, b)) {
            c.betas.push_back(b);
            c.lambdas.push_back(a->lambda_star);
          }
        }
        out.curves.push_back(std::move(c));
      }
    }
  }
  return out;
}

struct Crossover {
  std::optional<double> beta;  ///< first grid beta from which FR stays strictly better
  bool fr_better_everywhere = false;
  bool fr_better_at_end = false;
};

/// Crossover of two curves sampled on the same beta grid.
[[nodiscard]] inline Crossover find_crossover(const BetaCurve& iir, const BetaCurve& fr) {
  if (iir.betas != fr.betas || iir.betas.empty()) {
    throw std::invalid_argument("find_crossover: curves must share a nonempty beta grid");
  }
  Crossover c;
  const std::size_t n = iir.betas.size();
  std::size_t k = n;
  while (k > 0 && fr.lambdas[k - 1] < iir.lambdas[k - 1]) {
    --k;
  }
  c.fr_better_at_end = k < n;
  c.fr_better_everywhere = k == 0;
  if (k > 0 && k < n) {
    c.beta = iir.betas[k];
  }
  return c;
}

struct EllTrendRow {
  Scheme scheme = Scheme::iir;
  double epsilon = 0.0;
  double beta = 0.0;
  std::vector<std::pair<double, int>> ell_by_theta;  ///< (theta, ell*), theta ascending
  bool consistent = true;                            ///< ell* nonincreasing in theta
};

struct EllTrendReport {
  std::vector<EllTrendRow> rows;
  std::vector<std::string> findings;  ///< one line per violation
  [[nodiscard]] bool consistent() const noexcept { return findings.empty(); }
};

/// Checks that the optimal bit count does not grow with theta.
[[nodiscard]] inline EllTrendReport ell_trend_report(const SweepResult& result) {
  using Key = std::tuple<int, double, double>;
  std::map<Key, EllTrendRow> rows;
  for (const auto& a : result.argmins) {
    auto& row = rows[{static_cast<int>(a.scheme), a.epsilon, a.beta}];
    row.scheme = a.scheme;
    row.epsilon = a.epsilon;
    row.beta = a.beta;
    row.ell_by_theta.emplace_back(a.theta, a.ell_star);
  }
  EllTrendReport rep;
  for (auto& [key, row] : rows) {
    std::sort(row.ell_by_theta.begin(), row.ell_by_theta.end());
    for (std::size_t i = 1; i < row.ell_by_theta.size(); ++i) {
      if (row.ell_by_theta[i].second > row.ell_by_theta[i - 1].second) {
        row.consistent = false;
        rep.findings.push_back(std::string(to_string(row.scheme)) + " eps=" + std::to_string(row.epsilon) +
                               ": ell*=" + std::to_string(row.ell_by_theta[i].second) +
                               " at theta=" + std::to_string(row.ell_by_theta[i].first) + " exceeds ell*=" +
                               std::to_string(row.ell_by_theta[i - 1].second) +
                               " at theta=" + std::to_string(row.ell_by_theta[i - 1].first));
      }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace ouage

#endif  // OUAGE_EXPERIMENTS_HPP
