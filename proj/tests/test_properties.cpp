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

// Randomized checks of structural invariants. Each generator draws a valid
// configuration from a fixed seed so failures replay exactly.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "ouage/ouage.hpp"

namespace ouage {
namespace {

struct Gen {
  Rng rng;

  double uniform(double a, double b) { return a + (b - a) * rng.uniform(); }
  int integer(int a, int b) { return a + static_cast<int>(rng.uniform() * (b - a + 1)); }

  OUParams ou() { return OUParams{uniform(0.005, 2.0), uniform(0.3, 2.0)}; }
  CodingConfig coding() {
    const int ell = integer(1, 8);
    return CodingConfig{ell, ell + integer(0, 24), uniform(0.01, 0.1), uniform(0.0, 1.0), uniform(0.01, 0.49)};
  }
};

constexpr int kCases = 300;

TEST(Properties, QuantizationErrorIsPenaltyAtZeroAge) {
  Gen g{Rng{1}};
  for (int i = 0; i < kCases; ++i) {
    const auto p = g.ou();
    const int ell = g.integer(1, 20);
    ASSERT_EQ(quantization_mse(p, ell), mse_penalty(p, ell, 0.0));
    // past 2 theta age ~ 36 the gap to V is below one ulp and rounds away
    ASSERT_LT(mse_penalty(p, ell, g.uniform(0.0, 15.0 / p.theta())), steady_state_variance(p));
    ASSERT_LE(mse_penalty(p, ell, g.uniform(0.0, 1e6)), steady_state_variance(p));
  }
}

TEST(Properties, AckProbabilityNonincreasingInErrorRate) {
  Gen g{Rng{2}};
  for (int i = 0; i < kCases; ++i) {
    const int ell = g.integer(1, 8);
    const int n = ell + g.integer(0, 24);
    double e1 = g.uniform(0.001, 0.499);
    double e2 = g.uniform(0.001, 0.499);
    if (e1 > e2) {
      std::swap(e1, e2);
    }
    const int j = g.integer(0, 60);
    ASSERT_GE(ack_prob(CodingConfig{ell, n, 0.05, 0.15, e1}, j), ack_prob(CodingConfig{ell, n, 0.05, 0.15, e2}, j));
  }
}

TEST(Properties, DelayPmfNormalizedOnRegularSupport) {
  Gen g{Rng{3}};
  for (int i = 0; i < 100; ++i) {
    const auto c = g.coding();
    const auto pmf = iir_delay_pmf(c);
    ASSERT_NEAR(pmf.mass() + pmf.tail, 1.0, 1e-14);
    ASSERT_LE(pmf.tail, 1e-13);
    ASSERT_EQ(pmf.support(0), c.n_bar());
    for (std::size_t k = 0; k + 1 < pmf.size(); ++k) {
      ASSERT_NEAR(pmf.support(k + 1) - pmf.support(k), c.t_b() + c.beta(), 1e-12);
      ASSERT_GE(pmf.prob[k], 0.0);
    }
  }
}

TEST(Properties, IIRThresholdStructure) {
  Gen g{Rng{4}};
  for (int i = 0; i < 100; ++i) {
    const auto ou = g.ou();
    const auto c = g.coding();
    const OUMsePenalty h{ou, c.ell()};
    const auto pmf = iir_delay_pmf(c);
    const double lambda = g.uniform(quantization_mse(ou, c.ell()), 0.999 * ou.variance());
    const auto rule = threshold_rule(h, pmf, lambda);
    double prev = std::numeric_limits<double>::infinity();
    double level = -1.0;
    for (int k = 0; k < 40; ++k) {
      const double y = 0.1 * k;
      const double w = rule(y);
      ASSERT_GE(w, 0.0);
      ASSERT_LE(w, prev);
      if (w > 0.0) {
        if (level < 0.0) {
          level = y + w;
        }
        ASSERT_NEAR(y + w, level, 1e-12 * std::max(1.0, level));
      }
      prev = w;
    }
  }
}

TEST(Properties, IIRBracketEnclosesRoot) {
  Gen g{Rng{5}};
  for (int i = 0; i < 100; ++i) {
    const auto ou = g.ou();
    const auto c = g.coding();
    const OUMsePenalty h{ou, c.ell()};
    const auto pmf = iir_delay_pmf(c);
    const auto [lo, hi] = default_iir_bracket(h, pmf);
    ASSERT_GE(dinkelbach_value_iir_ou(h, pmf, lo), 0.0);
    ASSERT_LT(dinkelbach_value_iir_ou(h, pmf, hi), 0.0);
  }
}

TEST(Properties, OptimaInsidePenaltyRange) {
  Gen g{Rng{6}};
  for (int i = 0; i < 100; ++i) {
    const auto ou = g.ou();
    const auto c = g.coding();
    const OUMsePenalty h{ou, c.ell()};
    const double iir = solve_iir(h, iir_delay_pmf(c)).lambda_star;
    const double fr = fr_lambda_closed_form(ou, c);
    for (double l : {iir, fr}) {
      ASSERT_GE(l, quantization_mse(ou, c.ell()));
      ASSERT_LT(l, ou.variance());
    }
    ASSERT_GE(fr, h(c.n_bar()));
  }
}

TEST(Properties, SimulatedAverageWithinPenaltyRange) {
  Gen g{Rng{7}};
  for (int i = 0; i < 20; ++i) {
    const auto ou = g.ou();
    const auto c = g.coding();
    const OUMsePenalty h{ou, c.ell()};
    SimConfig sim;
    sim.num_epochs = 2000;
    sim.seed = static_cast<std::uint64_t>(i);
    const auto a = simulate_iir(h, c, solve_iir(h, iir_delay_pmf(c)).rule(), sim);
    const auto b = simulate_fr(h, c, sim);
    for (const auto& r : {a, b}) {
      ASSERT_GE(r.avg_penalty, h(0.0));
      ASSERT_LT(r.avg_penalty, ou.variance());
      ASSERT_GE(r.std_error, 0.0);
    }
  }
}

// Quadrupling the epochs should roughly halve the batch-means error.
TEST(Properties, StandardErrorScalesAsInverseRoot) {
  const OUParams ou{0.5, 1.0};
  const CodingConfig c{2, 4, 0.05, 0.15, 0.4};
  const OUMsePenalty h{ou, 2};
  const auto rule = solve_iir(h, iir_delay_pmf(c)).rule();
  double se_small = 0.0;
  double se_large = 0.0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    SimConfig sim;
    sim.seed = seed;
    sim.num_epochs = 100'000;
    se_small += simulate_iir(h, c, rule, sim).std_error;
    sim.num_epochs = 400'000;
    se_large += simulate_iir(h, c, rule, sim).std_error;
  }
  const double ratio = se_small / se_large;
  EXPECT_GT(ratio, 1.7);
  EXPECT_LT(ratio, 2.3);
}

TEST(Properties, SweepCsvRoundTripIsStable) {
  Gen g{Rng{8}};
  std::vector<SweepRecord> rows;
  for (int i = 0; i < kCases; ++i) {
    const auto c = g.coding();
    rows.push_back({i % 2 ? Scheme::fr : Scheme::iir, g.uniform(0.001, 5.0), g.uniform(0.1, 3.0), c.epsilon(),
                    c.ell(), c.n(), c.t_b(), c.beta(), g.uniform(0.0, 100.0), g.integer(0, 80),
                    g.uniform(-1e-9, 1e-9)});
  }
  std::ostringstream first;
  csv::write_sweep(first, rows);
  std::istringstream in{first.str()};
  const auto back = csv::read_sweep(in);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ASSERT_EQ(back[i].lambda_star, std::stod(csv::format_real(rows[i].lambda_star)));
    ASSERT_EQ(back[i].ell, rows[i].ell);
  }
  std::ostringstream second;
  csv::write_sweep(second, back);
  EXPECT_EQ(first.str(), second.str());
}

}  // namespace
}  // namespace ouage
