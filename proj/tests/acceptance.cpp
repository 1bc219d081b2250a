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

// End-to-end acceptance checks. Prints one [PASS]/[FAIL] line per criterion,
// with indented detail lines, and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <unistd.h>

#include "ouage/ouage.hpp"

namespace fs = std::filesystem;
using namespace ouage;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back("violated: " + what);
    }
  }
  void note(const std::string& what) { details.push_back(what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Gen {
  Rng rng;
  double uniform(double a, double b) { return a + (b - a) * rng.uniform(); }
  int integer(int a, int b) { return a + static_cast<int>(rng.uniform() * (b - a + 1)); }
  OUParams ou() { return OUParams{uniform(0.01, 2.0), uniform(0.5, 2.0)}; }
  CodingConfig coding(int max_ell = 8, int max_extra = 24) {
    const int ell = integer(1, max_ell);
    return CodingConfig{ell, ell + integer(0, max_extra), uniform(0.01, 0.1), uniform(0.0, 1.0),
                        uniform(0.02, 0.45)};
  }
};

// ---- 1 ----------------------------------------------------------------------

struct TableEntry {
  Scheme scheme;
  double theta, eps;
  int ell, n;
};

constexpr TableEntry kTable[] = {
    {Scheme::iir, 0.01, 0.1, 5, 7}, {Scheme::fr, 0.01, 0.1, 5, 7}, {Scheme::iir, 0.01, 0.4, 4, 10},
    {Scheme::fr, 0.01, 0.4, 4, 6},  {Scheme::iir, 0.5, 0.1, 2, 4}, {Scheme::fr, 0.5, 0.1, 2, 4},
    {Scheme::iir, 0.5, 0.4, 1, 3},  {Scheme::fr, 0.5, 0.4, 2, 4},
};

SweepSpec table_spec(int min_redundancy) {
  SweepSpec s;
  s.sigma = 1.0;
  s.thetas = {0.01, 0.5};
  s.epsilons = {0.1, 0.4};
  s.betas = {0.15};
  s.t_b = 0.05;
  s.ell_min = 1;
  s.ell_max = 8;
  s.min_redundancy = min_redundancy;
  s.n_extra = 24;
  return s;
}

int table_matches(const SweepResult& res, std::vector<std::string>* lines) {
  int hits = 0;
  for (const auto& t : kTable) {
    const auto* a = res.find(t.scheme, t.theta, t.eps, 0.15);
    const bool ok = a && a->ell_star == t.ell && a->n_star == t.n;
    hits += ok;
    if (lines && a) {
      lines->push_back(fmt("%-3s theta=%-4g eps=%-3g got (%d,%d) lambda*=%.6f, expected (%d,%d)%s%s",
                           to_string(t.scheme), t.theta, t.eps, a->ell_star, a->n_star, a->lambda_star, t.ell, t.n,
                           ok ? "" : "  MISMATCH", a->ties.size() > 1 ? "  [ties]" : ""));
    }
  }
  return hits;
}

Outcome criterion_table() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = grid_search(table_spec(0));
  const double secs = seconds_since(t0);
  o.check(res.failures.empty(), fmt("%zu grid points failed", res.failures.size()));
  const int hits = table_matches(res, &o.details);
  o.check(hits == 8, fmt("%d of 8 argmins match on n in [l, l+24]", hits));
  o.check(secs < 300.0, "runtime under 5 minutes");
  const int coded = table_matches(grid_search(table_spec(2)), nullptr);
  o.note(fmt("info: on the coded grid n in [l+2, l+24] %d of 8 argmins match", coded));
  o.summary = fmt("reference argmins on l in [1,8], n in [l,l+24]: %d/8 match (%.2f s)", hits, secs);
  return o;
}

// ---- 2 ----------------------------------------------------------------------

struct CrossoverReading {
  std::optional<double> beta;  // first grid beta from which FR stays below IIR
  std::string text;
};

CrossoverReading crossover_at(const BetaSweepResult& bs, double eps) {
  const auto* iir = bs.curve(Scheme::iir, 0.25, eps);
  const auto* fr = bs.curve(Scheme::fr, 0.25, eps);
  const auto c = find_crossover(*iir, *fr);
  CrossoverReading r;
  if (c.fr_better_everywhere) {
    r.beta = iir->betas.front();
    r.text = "FR below IIR on the whole grid";
  } else if (c.beta) {
    r.beta = c.beta;
    r.text = fmt("crossover at beta=%.2f (IIR %.4f vs FR %.4f at beta=0)", *c.beta, iir->lambdas.front(),
                 fr->lambdas.front());
  } else {
    r.text = "no crossover in range";
  }
  return r;
}

BetaSweepResult fig_sweep(int min_redundancy) {
  SweepSpec s;
  s.thetas = {0.25};
  s.epsilons = {0.1, 0.4};
  s.ell_min = 3;
  s.ell_max = 3;
  s.min_redundancy = min_redundancy;
  s.betas.clear();
  for (int i = 0; i <= 100; ++i) {
    s.betas.push_back(i / 100.0);
  }
  return beta_sweep(s);
}

Outcome criterion_fig() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto bs = fig_sweep(0);
  const double secs = seconds_since(t0);
  const auto bad = crossover_at(bs, 0.4);
  const auto good = crossover_at(bs, 0.1);
  o.note("eps=0.4: " + bad.text);
  o.note("eps=0.1: " + good.text);
  o.check(bad.beta.has_value(), "eps=0.4 has a crossover in beta in [0, 1]");
  o.check(!good.beta || (bad.beta && *bad.beta < *good.beta), "eps=0.4 crosses over at a smaller beta than eps=0.1");
  o.check(secs < 120.0, "runtime under 2 minutes");
  const auto coded = fig_sweep(2);
  o.note("info: coded grid n >= l+2: eps=0.4 " + crossover_at(coded, 0.4).text + "; eps=0.1 " +
         crossover_at(coded, 0.1).text);
  o.summary = fmt("beta sweep crossovers, theta=0.25, l=3 (%.2f s)", secs);
  return o;
}

// ---- 3 ----------------------------------------------------------------------

Outcome criterion_simulation() {
  Outcome o;
  Gen g{Rng{2026}};
  const auto t0 = std::chrono::steady_clock::now();
  int count = 0;
  double worst_z = 0.0;
  double worst_rel = 0.0;
  for (auto scheme : {Scheme::iir, Scheme::fr}) {
    for (int i = 0; i < 6; ++i) {
      const OUParams ou{g.uniform(0.01, 1.0), 1.0};
      const int ell = g.integer(1, 6);
      const CodingConfig c{ell, ell + g.integer(0, 10), 0.05, g.uniform(0.0, 0.5), g.uniform(0.02, 0.45)};
      const OUMsePenalty h{ou, ell};
      SimConfig sim;
      sim.num_epochs = 1'000'000;
      sim.seed = 100 + static_cast<std::uint64_t>(count);
      double lambda = 0.0;
      SimResult r;
      if (scheme == Scheme::iir) {
        const auto sol = solve_iir(h, iir_delay_pmf(c));
        lambda = sol.lambda_star;
        r = simulate_iir(h, c, sol.rule(), sim);
      } else {
        lambda = fr_lambda_closed_form(ou, c);
        r = simulate_fr(h, c, sim);
      }
      const double z = std::abs(r.avg_penalty - lambda) / r.std_error;
      const double rel = std::abs(r.avg_penalty - lambda) / lambda;
      worst_z = std::max(worst_z, z);
      worst_rel = std::max(worst_rel, rel);
      const std::string tag = fmt("%-3s theta=%.3f l=%d n=%d beta=%.3f eps=%.3f", to_string(scheme), ou.theta(), ell,
                                  c.n(), c.beta(), c.epsilon());
      o.note(fmt("%s: sim %.6f +- %.6f, analytic %.6f (%.2f SE, %.3f%%)", tag.c_str(), r.avg_penalty, r.std_error,
                 lambda, z, 100.0 * rel));
      o.check(z <= 3.0, tag + " within 3 SE");
      o.check(rel <= 0.005, tag + " within 0.5%");
      ++count;
    }
  }
  const double secs = seconds_since(t0);
  o.check(secs < 300.0, "runtime under 5 minutes");
  o.summary = fmt("simulation vs analytic, %d configs x 1e6 epochs: worst %.2f SE, %.3f%% (%.1f s)", count, worst_z,
                  100.0 * worst_rel, secs);
  return o;
}

// ---- 4 ----------------------------------------------------------------------

Outcome criterion_closed_forms() {
  Outcome o;
  Gen g{Rng{4}};
  double worst_wait = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto ou = g.ou();
    const auto c = g.coding(8, 24);
    const OUMsePenalty h{ou, c.ell()};
    const auto pmf = iir_delay_pmf(c);
    const double v = ou.variance();
    const double lambda = g.uniform(std::ldexp(v, -2 * c.ell()), 0.999 * v);
    const double y_bar = g.uniform(0.0, 3.0);
    const double closed = ou_threshold_wait(h, pmf, lambda, y_bar);
    const double numeric = invert_G(h, pmf, y_bar, lambda);
    worst_wait = std::max(worst_wait, std::abs(closed - numeric));
  }
  o.check(worst_wait <= 1e-9, fmt("IIR wait: worst |closed - numeric| = %.3g > 1e-9", worst_wait));
  double worst_rel = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto ou = g.ou();
    const auto c = g.coding();
    const double closed = fr_lambda_closed_form(ou, c);
    const double series = fr_lambda_general(OUMsePenalty{ou, c.ell()}, c);
    worst_rel = std::max(worst_rel, std::abs(closed - series) / closed);
  }
  o.check(worst_rel <= 1e-10, fmt("FR lambda*: worst relative gap %.3g > 1e-10", worst_rel));
  o.summary = fmt("closed forms: IIR wait max abs err %.2g over 1000 pairs, FR lambda* max rel err %.2g over 100",
                  worst_wait, worst_rel);
  return o;
}

// ---- 5 ----------------------------------------------------------------------

Outcome criterion_structure() {
  Outcome o;
  Gen g{Rng{5}};
  // (a) threshold structure, both inversion paths
  int a_bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto ou = g.ou();
    const auto c = g.coding();
    const OUMsePenalty h{ou, c.ell()};
    const auto pmf = iir_delay_pmf(c);
    const double lambda = solve_iir(h, pmf).lambda_star;
    double prev = std::numeric_limits<double>::infinity();
    double level = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k <= 50; ++k) {
      const double y = 0.08 * k;
      const double w = invert_G(h, pmf, y, lambda);
      const double w_closed = ou_threshold_wait(h, pmf, lambda, y);
      bool ok = w >= 0.0 && w <= prev + 1e-12 && std::abs(w - w_closed) <= 1e-9;
      if (w > 0.0) {
        if (std::isnan(level)) {
          level = y + w;
        }
        ok = ok && std::abs(y + w - level) <= 1e-9;
      }
      a_bad += !ok;
      prev = w;
    }
  }
  o.check(a_bad == 0, fmt("(a) %d threshold-structure violations", a_bad));

  // (b) delaying the first FR attempt never helps
  int b_cases = 0;
  for (int i = 0; i < 4; ++i) {
    const OUParams ou{g.uniform(0.05, 1.0), 1.0};
    const int ell = g.integer(1, 6);
    const CodingConfig c{ell, ell + g.integer(0, 8), 0.05, g.uniform(0.0, 0.5), g.uniform(0.05, 0.45)};
    const OUMsePenalty h{ou, ell};
    SimConfig sim;
    sim.num_epochs = 400'000;
    sim.seed = 500 + static_cast<std::uint64_t>(i);
    const auto base = simulate_fr(h, c, sim);
    for (double frac : {0.1, 0.5, 1.0}) {
      const double w1 = frac * c.k_spacing();
      const auto pert = simulate_fr(h, c, sim, FRSimOptions{.timeline = FRTimeline::pipelined, .first_wait = w1});
      o.check(pert.avg_penalty >= base.avg_penalty - 3.0 * base.std_error,
              fmt("(b) w1=%.3f lowers the FR average %.6f below %.6f", w1, pert.avg_penalty, base.avg_penalty));
      ++b_cases;
    }
  }

  // (c) p_IIR strictly decreasing inside the bracket; p_FR(G(0)) <= 0
  int c_bad = 0;
  for (int i = 0; i < 30; ++i) {
    const auto ou = g.ou();
    const auto c = g.coding();
    const OUMsePenalty h{ou, c.ell()};
    const auto pmf = iir_delay_pmf(c);
    const auto [lo, hi] = default_iir_bracket(h, pmf);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 20; ++k) {
      const double l = lo + (hi - lo) * k / 19.0;
      const double p = dinkelbach_value_iir(h, pmf, l);
      c_bad += !(p < prev);
      prev = p;
    }
  }
  int fr_bad = 0;
  for (int i = 0; i < 200; ++i) {
    const auto ou = g.ou();
    const auto c = g.coding();
    const OUMsePenalty h{ou, c.ell()};
    const double g0 = fr_expected_penalty_G(h, c, fr_attempt_dist(c)).value;
    fr_bad += !(dinkelbach_value_fr(h, c, g0) <= 0.0);
  }
  o.check(c_bad == 0, fmt("(c) %d non-decreasing steps of p_IIR on 20-point grids", c_bad));
  o.check(fr_bad == 0, fmt("(c) p_FR(G(0)) > 0 in %d of 200 configs", fr_bad));
  o.summary = fmt("policy structure: 100 threshold rules, %d FR wait perturbations, 30 p_IIR grids, 200 p_FR signs",
                  b_cases);
  return o;
}

// ---- 6 ----------------------------------------------------------------------

Outcome criterion_model() {
  Outcome o;
  // p_j nondecreasing in j
  int configs = 0;
  int violating = 0;
  std::set<std::tuple<int, int, double>> seen;
  for (const auto& t : kTable) {
    if (!seen.insert({t.ell, t.n, t.eps}).second) {
      continue;
    }
    const auto v = check_ack_monotone(CodingConfig{t.ell, t.n, 0.05, 0.15, t.eps}, 60);
    ++configs;
    if (!v.monotone) {
      ++violating;
      o.note(fmt("p_j drops for l=%d n=%d eps=%g: first at j=%d, largest drop %.4f", t.ell, t.n, t.eps,
                 *v.first_violation, v.worst_drop));
    }
  }
  for (auto [ell, n, eps] : {std::tuple{5, 7, 0.1}, std::tuple{1, 3, 0.4}}) {
    const CodingConfig c{ell, n, 0.05, 0.15, eps};
    o.note(fmt("l=%d n=%d eps=%g: p0=%.4f p1=%.4f p2=%.4f", ell, n, eps, ack_prob(c, 0), ack_prob(c, 1),
               ack_prob(c, 2)));
  }
  o.check(violating == 0, fmt("p_j nondecreasing in j (%d of %d distinct reference configs violate)", violating, configs));

  // pmf normalization
  Gen g{Rng{6}};
  double worst_mass = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto pmf = iir_delay_pmf(g.coding());
    worst_mass = std::max(worst_mass, std::abs(pmf.mass() + pmf.tail - 1.0));
  }
  o.check(worst_mass <= 1e-14, fmt("pmf mass + tail = 1 (worst gap %.3g)", worst_mass));

  // exact OU transitions over 1e5 paths
  {
    const OUParams p{0.5, 1.2};
    const double x0 = 1.5;
    const std::vector<double> times{0.3, 1.0, 2.5};
    constexpr int kPaths = 100'000;
    std::vector<double> s1(times.size()), s2(times.size());
    double cross = 0.0;
    Rng rng{66};
    for (int i = 0; i < kPaths; ++i) {
      const auto path = ou_path(p, x0, times, rng);
      for (std::size_t k = 0; k < times.size(); ++k) {
        s1[k] += path[k];
        s2[k] += path[k] * path[k];
      }
      // stationary start for the autocorrelation
      const double z0 = std::sqrt(p.variance()) * rng.normal();
      const std::vector<double> lag{1.0};
      cross += z0 * ou_path(p, z0, lag, rng)[0];
    }
    int bad = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double m = s1[k] / kPaths;
      const double var = s2[k] / kPaths - m * m;
      const double want_m = x0 * std::exp(-p.theta() * times[k]);
      const double want_v = p.variance() * -std::expm1(-2.0 * p.theta() * times[k]);
      bad += std::abs(m - want_m) > 3.0 * std::sqrt(want_v / kPaths);
      bad += std::abs(var - want_v) > 3.0 * want_v * std::sqrt(2.0 / kPaths);
    }
    const double want_c = p.variance() * std::exp(-p.theta());
    // Var(Z0 Z1) = V^2 (1 + rho^2) for a bivariate normal pair
    const double rho = std::exp(-p.theta());
    const double se_c = p.variance() * std::sqrt((1.0 + rho * rho) / kPaths);
    bad += std::abs(cross / kPaths - want_c) > 3.0 * se_c;
    o.check(bad == 0, fmt("OU sampler moments within 3 SE (%d of 7 off)", bad));
  }

  // Lloyd-Max
  const auto one_bit = lloyd_max_quantizer(1.0, 1);
  o.check(std::abs(one_bit.distortion - (1.0 - 2.0 / std::numbers::pi)) <= 1e-6, "1-bit Lloyd-Max distortion");
  for (int ell = 1; ell <= 6; ++ell) {
    for (double v : {1.0, 50.0}) {
      o.check(lloyd_max_quantizer(v, ell).distortion >= std::ldexp(v, -2 * ell),
              fmt("Lloyd-Max above 2^{-2l} V at l=%d", ell));
    }
  }
  o.summary = fmt("model layer: p_j monotonicity, pmf mass (worst %.1g), OU sampler, Lloyd-Max", worst_mass);
  return o;
}

// ---- 7 ----------------------------------------------------------------------

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::string slurp(const fs::path& p) {
  std::ifstream in{p, std::ios::binary};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_determinism(const std::string& cli) {
  Outcome o;
  if (cli.empty()) {
    o.check(false, "no --cli binary given");
    o.summary = "determinism";
    return o;
  }
  const fs::path root = fs::temp_directory_path() / ("ouage_acceptance_" + std::to_string(::getpid()));
  const char* runs[] = {
      "sweep --table1 --workers 4",
      "sweep --fig2 --workers 3",
      "simulate --scheme iir --theta 0.5 --ell 2 --n 4 --epsilon 0.4 --epochs 200000 --seed 11 --trace",
      "simulate --scheme fr --theta 0.01 --ell 5 --n 7 --epsilon 0.1 --epochs 200000 --seed 12",
  };
  std::size_t files = 0;
  for (std::size_t r = 0; r < std::size(runs); ++r) {
    const fs::path a = root / std::to_string(r) / "a";
    const fs::path b = root / std::to_string(r) / "b";
    for (const auto& dir : {a, b}) {
      const std::string cmd =
          shell_quote(cli) + " " + runs[r] + " --output-dir " + shell_quote(dir.string()) + " > /dev/null";
      const int rc = std::system(cmd.c_str());
      o.check(rc == 0, fmt("'%s' exited with status %d", runs[r], rc));
    }
    std::vector<fs::path> names;
    if (fs::exists(a)) {
      for (const auto& e : fs::directory_iterator(a)) {
        names.push_back(e.path().filename());
      }
    }
    o.check(!names.empty(), fmt("'%s' produced no files", runs[r]));
    for (const auto& n : names) {
      ++files;
      o.check(fs::exists(b / n) && slurp(a / n) == slurp(b / n),
              fmt("'%s': %s differs between runs", runs[r], n.string().c_str()));
    }
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  o.summary = fmt("determinism: %zu output files byte-identical across repeated CLI runs", files);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::string cli;
  std::vector<int> only;
  app.add_option("--cli", cli, "Path to the ouage executable");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{
      criterion_table,  criterion_fig,   criterion_simulation,
      criterion_closed_forms, criterion_structure, criterion_model,
      [&] { return criterion_determinism(cli); },
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) {
      continue;
    }
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("threw: ") + e.what();
    }
    failed += !o.pass;
    std::printf("[%s] criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, o.summary.c_str());
    for (const auto& d : o.details) {
      std::printf("    %s\n", d.c_str());
    }
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
