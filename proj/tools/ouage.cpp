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

// ouage: solve, simulate and sweep the IIR and FR sampling policies.
//
// Exit codes: 0 success, 1 invalid configuration or arguments, 2 solver
// failure, 3 I/O failure.

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ouage/ouage.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit : int { kOk = 0, kInvalid = 1, kSolver = 2, kIo = 3 };

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Options shared by every subcommand, collected into config overrides.
struct CommonArgs {
  std::optional<std::string> config;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;  // section.key -> value

  void add_to(CLI::App& cmd) {
    cmd.add_option("-c,--config", config, "INI configuration file")->check(CLI::ExistingFile);
    cmd.add_option("--set", sets, "Override one key, e.g. --set coding.n=6 (repeatable)");
    bind(cmd, "--output-dir", "output.dir", "Output directory");
  }

  void bind(CLI::App& cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd.add_option_function<std::string>(flag, [this, key](const std::string& v) { flags[key] = v; }, help);
  }

  void bind_coding(CLI::App& cmd) {
    bind(cmd, "--scheme", "solver.scheme", "iir or fr");
    bind(cmd, "--theta", "process.theta", "Mean-reversion rate");
    bind(cmd, "--sigma", "process.sigma", "Diffusion scale");
    bind(cmd, "--ell", "coding.ell", "Quantization bits");
    bind(cmd, "--n", "coding.n", "Codeword length in bits");
    bind(cmd, "--t-b", "coding.t_b", "Time per transmitted bit");
    bind(cmd, "--beta", "coding.beta", "Decoding and feedback time");
    bind(cmd, "--epsilon", "coding.epsilon", "BSC crossover probability");
    bind(cmd, "--fr-timeline", "solver.fr_timeline", "pipelined or sequential");
  }

  [[nodiscard]] ouage::ConfigOverrides overrides() const {
    ouage::ConfigOverrides out;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ouage::ConfigError({"--set " + s + ": expected section.key=value"});
      }
      out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    // dedicated flags win over --set
    for (const auto& kv : flags) {
      out.push_back(kv);
    }
    return out;
  }

  [[nodiscard]] ouage::RunConfig load(const ouage::ConfigOverrides& preset = {}) const {
    return ouage::load_run_config(config, overrides(), preset);
  }
};

std::string real(double x) { return ouage::csv::format_real(x); }

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  }
}

/// Writes through a temporary file so a failed write leaves no partial file.
void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    }
    body(out);
    out.flush();
    if (!out) {
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

// ---- solve ------------------------------------------------------------------

int cmd_solve(const CommonArgs& args, const std::optional<std::string>& json_path) {
  const auto cfg = args.load();
  const auto ou = cfg.ou();
  const auto coding = cfg.coding();
  const ouage::OUMsePenalty h{ou, coding.ell()};
  nlohmann::ordered_json rec;
  rec["scheme"] = ouage::to_string(cfg.scheme);
  rec["theta"] = cfg.theta;
  rec["sigma"] = cfg.sigma;
  rec["ell"] = cfg.ell;
  rec["n"] = cfg.n;
  rec["t_b"] = cfg.t_b;
  rec["beta"] = cfg.beta;
  rec["epsilon"] = cfg.epsilon;

  std::printf("scheme        %s\n", ouage::to_string(cfg.scheme));
  if (cfg.scheme == ouage::Scheme::iir) {
    const auto pmf = ouage::iir_delay_pmf(coding, cfg.tail_tol);
    ouage::IIRSolverOptions opt;
    opt.lambda_tol = cfg.lambda_tol;
    opt.wait_tol = cfg.wait_tol;
    const auto sol = ouage::solve_iir(h, pmf, opt);
    std::printf("lambda_star   %s\n", real(sol.lambda_star).c_str());
    std::printf("threshold     %s  (wait = max(threshold - previous delay, 0))\n", real(sol.threshold).c_str());
    std::printf("wait_at_nbar  %s\n", real(sol.wait(coding.n_bar())).c_str());
    std::printf("iterations    %d\n", sol.iterations);
    std::printf("residual      %s\n", real(sol.residual).c_str());
    std::printf("pmf_support   %zu  (tail mass %s)\n", pmf.size(), real(pmf.tail).c_str());
    rec["lambda_star"] = sol.lambda_star;
    rec["threshold"] = sol.threshold;
    rec["iterations"] = sol.iterations;
    rec["residual"] = sol.residual;
    rec["tail_mass"] = pmf.tail;
  } else {
    const auto sol = ouage::solve_fr(ou, coding, cfg.fr_timeline);
    const double residual = ouage::dinkelbach_value_fr(h, coding, sol.lambda_star, cfg.fr_timeline);
    std::printf("lambda_star   %s\n", real(sol.lambda_star).c_str());
    std::printf("wait_gap      %s  (idle time after a delivery; attempts %s apart, %s timeline)\n",
                real(sol.wait_gap).c_str(), real(sol.k_spacing).c_str(), ouage::to_string(sol.timeline));
    std::printf("first_wait    %s  (zero-wait)\n", real(sol.first_wait).c_str());
    std::printf("p0            %s\n", real(ouage::ack_prob(coding, 0)).c_str());
    std::printf("residual      %s\n", real(residual).c_str());
    rec["lambda_star"] = sol.lambda_star;
    rec["wait_gap"] = sol.wait_gap;
    rec["first_wait"] = sol.first_wait;
    rec["k_spacing"] = sol.k_spacing;
    rec["timeline"] = ouage::to_string(sol.timeline);
    rec["residual"] = residual;
  }
  if (json_path) {
    const fs::path p{*json_path};
    if (p.has_parent_path()) {
      ensure_dir(p.parent_path());
    }
    write_file(p, [&](std::ostream& out) { out << rec.dump(2) << '\n'; });
  }
  return kOk;
}

// ---- simulate ---------------------------------------------------------------

int cmd_simulate(const CommonArgs& args) {
  const auto cfg = args.load();
  const auto ou = cfg.ou();
  const auto coding = cfg.coding();
  const auto sim = cfg.sim();
  const ouage::OUMsePenalty h{ou, coding.ell()};
  double lambda = 0.0;
  ouage::SimResult res;
  if (cfg.scheme == ouage::Scheme::iir) {
    const auto pmf = ouage::iir_delay_pmf(coding, cfg.tail_tol);
    ouage::IIRSolverOptions opt;
    opt.lambda_tol = cfg.lambda_tol;
    const auto sol = ouage::solve_iir(h, pmf, opt);
    lambda = sol.lambda_star;
    res = ouage::simulate_iir(h, coding, sol.rule(), sim);
  } else {
    lambda = ouage::fr_lambda_closed_form(ou, coding, cfg.fr_timeline);
    ouage::FRSimOptions opt;
    opt.timeline = cfg.fr_timeline;
    res = ouage::simulate_fr(h, coding, sim, opt);
  }
  const fs::path dir{cfg.output_dir};
  ensure_dir(dir);
  ouage::csv::SimSummary s{cfg.scheme, cfg.theta,   cfg.sigma,       cfg.epsilon,       cfg.ell,
                           cfg.n,      cfg.t_b,     cfg.beta,        cfg.seed,          res.epoch_count,
                           res.avg_penalty, res.std_error, lambda, res.total_time};
  write_file(dir / "sim_summary.csv", [&](std::ostream& out) { ouage::csv::write_sim_summary(out, s); });
  if (cfg.trace) {
    write_file(dir / "sim_trace.csv", [&](std::ostream& out) { ouage::csv::write_trace(out, res.trace); });
  }
  const double gap = res.avg_penalty - lambda;
  std::printf("scheme        %s\n", ouage::to_string(cfg.scheme));
  std::printf("epochs        %llu retained\n", static_cast<unsigned long long>(res.epoch_count));
  std::printf("simulated     %s +/- %s\n", real(res.avg_penalty).c_str(), real(res.std_error).c_str());
  std::printf("analytic      %s\n", real(lambda).c_str());
  if (!std::isfinite(res.std_error)) {
    std::printf("verdict       INCONCLUSIVE (fewer than two batches)\n");
  } else {
    std::printf("verdict       %s (|gap| = %s, %.2f std errors)\n",
                std::abs(gap) <= 3.0 * res.std_error ? "PASS" : "FAIL", real(std::abs(gap)).c_str(),
                res.std_error > 0.0 ? std::abs(gap) / res.std_error : 0.0);
  }
  return kOk;
}

// ---- sweep ------------------------------------------------------------------

const ouage::ConfigOverrides kTable1Preset{
    {"process.sigma", "1"},       {"coding.t_b", "0.05"},        {"sweep.thetas", "0.01,0.5"},
    {"sweep.epsilons", "0.1,0.4"}, {"sweep.betas", "0.15"},       {"sweep.ell_min", "1"},
    {"sweep.ell_max", "8"},       {"sweep.min_redundancy", "2"}, {"sweep.n_extra", "24"},
    {"sweep.schemes", "iir,fr"},  {"solver.fr_timeline", "pipelined"}};

const ouage::ConfigOverrides kFig2Preset{
    {"process.sigma", "1"},       {"coding.t_b", "0.05"},        {"sweep.thetas", "0.25"},
    {"sweep.epsilons", "0.1,0.4"}, {"sweep.betas", "0:0.01:1"},   {"sweep.ell_min", "3"},
    {"sweep.ell_max", "3"},       {"sweep.min_redundancy", "2"}, {"sweep.n_extra", "24"},
    {"sweep.schemes", "iir,fr"},  {"solver.fr_timeline", "pipelined"}};

int cmd_sweep(const CommonArgs& args, bool table1, bool fig2) {
  const auto cfg = args.load(table1 ? kTable1Preset : fig2 ? kFig2Preset : ouage::ConfigOverrides{});
  const auto spec = cfg.sweep_spec();
  spec.validate();
  const bool curves = spec.betas.size() > 1;
  ouage::BetaSweepResult bs;
  if (curves) {
    bs = ouage::beta_sweep(spec);
  } else {
    bs.sweep = ouage::grid_search(spec);
  }
  const auto& res = bs.sweep;

  const fs::path dir{cfg.output_dir};
  ensure_dir(dir);
  write_file(dir / "sweep.csv", [&](std::ostream& out) { ouage::csv::write_sweep(out, res.records); });
  write_file(dir / "argmin.csv", [&](std::ostream& out) { ouage::csv::write_argmins(out, res.argmins); });
  if (!res.failures.empty()) {
    write_file(dir / "failures.csv", [&](std::ostream& out) { ouage::csv::write_failures(out, res.failures); });
  } else {
    std::error_code ec;
    fs::remove(dir / "failures.csv", ec);
  }
  if (curves) {
    write_file(dir / "curves.csv", [&](std::ostream& out) { ouage::csv::write_curves(out, bs.curves); });
    write_file(dir / "lambda_vs_beta.svg", [&](std::ostream& out) { ouage::svg::write_beta_sweep_chart(out, bs.curves); });
  }

  std::printf("%zu points solved, %zu failed\n", res.records.size(), res.failures.size());
  if (!curves) {
    std::printf("%-4s %8s %8s %8s  %-8s %s\n", "", "theta", "epsilon", "beta", "(l*,n*)", "lambda*");
    for (const auto& a : res.argmins) {
      std::printf("%-4s %8s %8s %8s  (%d,%d)    %s%s\n", ouage::to_string(a.scheme), real(a.theta).c_str(),
                  real(a.epsilon).c_str(), real(a.beta).c_str(), a.ell_star, a.n_star, real(a.lambda_star).c_str(),
                  a.ties.size() > 1 ? "  (ties logged in argmin.csv)" : "");
    }
  } else {
    for (double th : spec.thetas) {
      for (double e : spec.epsilons) {
        const auto* iir = bs.curve(ouage::Scheme::iir, th, e);
        const auto* fr = bs.curve(ouage::Scheme::fr, th, e);
        if (!iir || !fr || iir->betas.empty() || iir->betas != fr->betas) {
          continue;
        }
        const auto c = ouage::find_crossover(*iir, *fr);
        std::printf("theta=%s eps=%s: ", real(th).c_str(), real(e).c_str());
        if (c.beta) {
          std::printf("FR below IIR for beta >= %s\n", real(*c.beta).c_str());
        } else if (c.fr_better_everywhere) {
          std::printf("FR below IIR on the whole grid\n");
        } else {
          std::printf("no crossover in range\n");
        }
      }
    }
  }
  if (spec.thetas.size() > 1) {
    const auto trend = ouage::ell_trend_report(res);
    std::printf("ell* trend in theta: %s\n", trend.consistent() ? "nonincreasing everywhere" : "violations");
    for (const auto& f : trend.findings) {
      std::printf("  %s\n", f.c_str());
    }
  }
  if (!res.failures.empty()) {
    std::fprintf(stderr, "error: %zu grid points failed; see %s\n", res.failures.size(),
                 (dir / "failures.csv").string().c_str());
    return kSolver;
  }
  return kOk;
}

int cmd_validate(const CommonArgs& args) {
  const auto cfg = args.load();
  (void)cfg.coding();
  cfg.sweep_spec().validate();
  std::printf("configuration ok\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal sampling of an Ornstein-Uhlenbeck source over IIR and FR channels"};
  app.require_subcommand(1);

  CommonArgs solve_args, sim_args, sweep_args, validate_args;
  std::optional<std::string> json_path;
  bool table1 = false;
  bool fig2 = false;

  auto* solve = app.add_subcommand("solve", "Optimal policy and lambda* for one configuration");
  solve_args.add_to(*solve);
  solve_args.bind_coding(*solve);
  solve->add_option("--json", json_path, "Also write the solution as a JSON record");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of the optimal policy");
  sim_args.add_to(*simulate);
  sim_args.bind_coding(*simulate);
  sim_args.bind(*simulate, "--epochs", "sim.epochs", "Number of epochs");
  sim_args.bind(*simulate, "--seed", "sim.seed", "RNG seed");
  sim_args.bind(*simulate, "--warmup", "sim.warmup", "Discarded leading epochs (default 1%)");
  sim_args.bind(*simulate, "--batches", "sim.batches", "Batches for the standard error");
  simulate->add_flag_callback("--trace", [&] { sim_args.flags["sim.trace"] = "true"; }, "Write sim_trace.csv");

  auto* sweep = app.add_subcommand("sweep", "(ell, n) grid search and beta sweeps");
  sweep_args.add_to(*sweep);
  sweep_args.bind(*sweep, "--workers", "sweep.workers", "Worker threads (0: all cores)");
  sweep_args.bind(*sweep, "--fr-timeline", "solver.fr_timeline", "pipelined or sequential");
  auto* t1 = sweep->add_flag("--table1", table1, "Preset: optimal (ell, n) over two thetas and two channels");
  auto* f2 = sweep->add_flag("--fig2", fig2, "Preset: lambda* versus beta, ell=3, theta=0.25");
  t1->excludes(f2);

  auto* validate = app.add_subcommand("validate-config", "Check a configuration without running anything");
  validate_args.add_to(*validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args, json_path);
    if (simulate->parsed()) return cmd_simulate(sim_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args, table1, fig2);
    if (validate->parsed()) return cmd_validate(validate_args);
  } catch (const ouage::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInvalid;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kSolver;
  }
  return kInvalid;
}
