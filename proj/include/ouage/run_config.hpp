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

#ifndef OUAGE_RUN_CONFIG_HPP
#define OUAGE_RUN_CONFIG_HPP

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ouage/channel.hpp"
#include "ouage/experiments.hpp"
#include "ouage/penalty.hpp"
#include "ouage/policy_fr.hpp"
#include "ouage/sim.hpp"

/**
 * \file
 * \brief INI run configuration.
 *
 * Sections: [process] [coding] [solver] [sim] [sweep] [output]. Every key
 * has a default. Values are layered: defaults, then the file, then the
 * output-directory environment variable, then explicit overrides (CLI
 * flags). The whole configuration is validated before anything runs and
 * every problem is reported as "section.key: message".
 *
 * Real lists accept comma-separated values and "start:step:stop" ranges,
 * e.g. `betas = 0:0.01:1`.
 */

namespace ouage {

inline constexpr const char* kOutputDirEnv = "OUAGE_OUTPUT_DIR";

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_{std::move(problems)} {}

  [[nodiscard]] const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string out = "invalid configuration";
    for (const auto& s : p) {
      out += "\n  " + s;
    }
    return out;
  }
  std::vector<std::string> problems_;
};

struct RunConfig {
  // [process]
  double theta = 0.5;
  double sigma = 1.0;
  // [coding]
  int ell = 2;
  int n = 4;
  double t_b = 0.05;
  double beta = 0.15;
  double epsilon = 0.1;
  // [solver]
  Scheme scheme = Scheme::iir;
  double lambda_tol = 1e-9;
  double wait_tol = 1e-11;
  double tail_tol = 1e-13;
  FRTimeline fr_timeline = FRTimeline::pipelined;
  // [sim]
  std::uint64_t epochs = 1'000'000;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> warmup;
  int batches = 100;
  bool trace = false;
  // [sweep]
  SweepSpec sweep;
  // [output]
  std::string output_dir = "out";

  [[nodiscard]] OUParams ou() const { return OUParams{theta, sigma}; }
  [[nodiscard]] CodingConfig coding() const { return CodingConfig{ell, n, t_b, beta, epsilon}; }
  [[nodiscard]] SimConfig sim() const {
    SimConfig s;
    s.num_epochs = epochs;
    s.seed = seed;
    s.warmup_epochs = warmup;
    s.batches = batches;
    s.record_trace = trace;
    return s;
  }
  [[nodiscard]] SweepSpec sweep_spec() const {
    SweepSpec s = sweep;
    s.sigma = sigma;
    s.t_b = t_b;
    s.tail_tol = tail_tol;
    s.lambda_tol = lambda_tol;
    s.fr_timeline = fr_timeline;
    return s;
  }
};

/// "section.key" -> value.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

class FieldReader {
 public:
  explicit FieldReader(const boost::property_tree::ptree& tree) : tree_{tree} {}

  template <class T, class Parse>
  void read(const std::string& path, T& field, const Parse& parse) {
    seen_.insert(path);
    const auto raw = tree_.get_optional<std::string>(boost::property_tree::ptree::path_type(path, '.'));
    if (!raw) {
      return;
    }
    try {
      field = parse(trim(*raw));
    } catch (const std::exception& ex) {
      problems_.push_back(path + ": " + ex.what());
    }
  }

  void real(const std::string& path, double& f) { read(path, f, parse_real); }
  void integer(const std::string& path, int& f) {
    read(path, f, [](const std::string& s) { return static_cast<int>(parse_int(s)); });
  }
  void count(const std::string& path, std::uint64_t& f) { read(path, f, parse_count); }

  /// Keys present in the tree but never read.
  void check_unknown() {
    for (const auto& [section, body] : tree_) {
      if (body.empty() && !body.data().empty()) {
        problems_.push_back(section + ": key outside any section");
        continue;
      }
      for (const auto& [key, value] : body) {
        if (!seen_.count(section + "." + key)) {
          problems_.push_back(section + "." + key + ": unknown key");
        }
      }
    }
  }

  void problem(const std::string& p) { problems_.push_back(p); }
  [[nodiscard]] const std::vector<std::string>& problems() const { return problems_; }

  static double parse_real(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
      throw std::invalid_argument("expected a finite number, got '" + s + "'");
    }
    return v;
  }

  static long long parse_int(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
      throw std::invalid_argument("expected an integer, got '" + s + "'");
    }
    return v;
  }

  static std::uint64_t parse_count(const std::string& s) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s.front() == '-' || end != s.c_str() + s.size() || errno == ERANGE) {
      throw std::invalid_argument("expected a nonnegative integer, got '" + s + "'");
    }
    return v;
  }

 private:
  const boost::property_tree::ptree& tree_;
  std::set<std::string> seen_;
  std::vector<std::string> problems_;
};

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in{s};
  for (std::string item; std::getline(in, item, ',');) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(item);
    }
  }
  return out;
}

/// Comma-separated reals and start:step:stop ranges (stop included).
inline std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) {
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
      out.push_back(FieldReader::parse_real(item));
      continue;
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos) {
      throw std::invalid_argument("range '" + item + "' must be start:step:stop");
    }
    const double start = FieldReader::parse_real(trim(item.substr(0, c1)));
    const double step = FieldReader::parse_real(trim(item.substr(c1 + 1, c2 - c1 - 1)));
    const double stop = FieldReader::parse_real(trim(item.substr(c2 + 1)));
    if (!(step > 0.0) || stop < start) {
      throw std::invalid_argument("range '" + item + "' needs step > 0 and stop >= start");
    }
    const double span = (stop - start) / step;
    if (span > 1e6) {
      throw std::invalid_argument("range '" + item + "' has more than 1e6 points");
    }
    const auto count = static_cast<long long>(std::floor(span + 1e-9));
    for (long long i = 0; i <= count; ++i) {
      out.push_back(start + static_cast<double>(i) * step);
    }
  }
  return out;
}

inline Scheme parse_scheme(const std::string& s) {
  if (s == "iir" || s == "IIR") return Scheme::iir;
  if (s == "fr" || s == "FR") return Scheme::fr;
  throw std::invalid_argument("expected 'iir' or 'fr', got '" + s + "'");
}

inline std::vector<Scheme> parse_schemes(const std::string& s) {
  std::vector<Scheme> out;
  for (const auto& item : split_list(s)) {
    const Scheme sc = parse_scheme(item);
    if (std::find(out.begin(), out.end(), sc) == out.end()) {
      out.push_back(sc);
    }
  }
  return out;
}

inline FRTimeline parse_timeline(const std::string& s) {
  if (s == "pipelined") return FRTimeline::pipelined;
  if (s == "sequential") return FRTimeline::sequential;
  throw std::invalid_argument("expected 'pipelined' or 'sequential', got '" + s + "'");
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + s + "'");
}

}  // namespace detail

/// Parses and validates a layered key/value tree.
[[nodiscard]] inline RunConfig run_config_from_tree(const boost::property_tree::ptree& tree) {
  RunConfig c;
  detail::FieldReader r{tree};
  r.real("process.theta", c.theta);
  r.real("process.sigma", c.sigma);
  r.integer("coding.ell", c.ell);
  r.integer("coding.n", c.n);
  r.real("coding.t_b", c.t_b);
  r.real("coding.beta", c.beta);
  r.real("coding.epsilon", c.epsilon);
  r.read("solver.scheme", c.scheme, detail::parse_scheme);
  r.real("solver.lambda_tol", c.lambda_tol);
  r.real("solver.wait_tol", c.wait_tol);
  r.real("solver.tail_tol", c.tail_tol);
  r.read("solver.fr_timeline", c.fr_timeline, detail::parse_timeline);
  r.count("sim.epochs", c.epochs);
  r.count("sim.seed", c.seed);
  r.read("sim.warmup", c.warmup, [](const std::string& s) -> std::optional<std::uint64_t> {
    if (s.empty() || s == "auto") return std::nullopt;
    return detail::FieldReader::parse_count(s);
  });
  r.integer("sim.batches", c.batches);
  r.read("sim.trace", c.trace, detail::parse_bool);
  // the sweep shares process.sigma and coding.t_b
  r.read("sweep.thetas", c.sweep.thetas, detail::parse_real_list);
  r.read("sweep.epsilons", c.sweep.epsilons, detail::parse_real_list);
  r.read("sweep.betas", c.sweep.betas, detail::parse_real_list);
  r.integer("sweep.ell_min", c.sweep.ell_min);
  r.integer("sweep.ell_max", c.sweep.ell_max);
  r.integer("sweep.min_redundancy", c.sweep.min_redundancy);
  r.integer("sweep.n_extra", c.sweep.n_extra);
  r.read("sweep.schemes", c.sweep.schemes, detail::parse_schemes);
  r.read("sweep.workers", c.sweep.workers, [](const std::string& s) {
    const auto v = detail::FieldReader::parse_count(s);
    if (v > 4096) throw std::invalid_argument("at most 4096 workers");
    return static_cast<unsigned>(v);
  });
  r.read("output.dir", c.output_dir, [](const std::string& s) {
    if (s.empty()) throw std::invalid_argument("must not be empty");
    return s;
  });
  r.check_unknown();

  // Domain checks, reported against the field that owns them.
  auto check = [&](bool ok, const std::string& p) {
    if (!ok) r.problem(p);
  };
  check(c.theta > 0.0, "process.theta: must be > 0");
  check(c.sigma > 0.0, "process.sigma: must be > 0");
  check(c.ell >= 1, "coding.ell: must be >= 1");
  check(c.n >= c.ell, "coding.n: must be >= coding.ell");
  check(c.t_b > 0.0, "coding.t_b: must be > 0");
  check(c.beta >= 0.0, "coding.beta: must be >= 0");
  check(c.epsilon > 0.0 && c.epsilon < 0.5, "coding.epsilon: must lie in (0, 0.5)");
  check(c.lambda_tol > 0.0, "solver.lambda_tol: must be > 0");
  check(c.wait_tol > 0.0, "solver.wait_tol: must be > 0");
  check(c.tail_tol > 0.0 && c.tail_tol < 1.0, "solver.tail_tol: must lie in (0, 1)");
  check(c.epochs >= 1, "sim.epochs: must be >= 1");
  check(c.batches >= 1, "sim.batches: must be >= 1");
  check(!c.sweep.thetas.empty(), "sweep.thetas: grid is empty");
  for (double v : c.sweep.thetas) {
    check(v > 0.0, "sweep.thetas: values must be > 0");
  }
  check(!c.sweep.epsilons.empty(), "sweep.epsilons: grid is empty");
  for (double v : c.sweep.epsilons) {
    check(v > 0.0 && v < 0.5, "sweep.epsilons: values must lie in (0, 0.5)");
  }
  check(!c.sweep.betas.empty(), "sweep.betas: grid is empty");
  for (double v : c.sweep.betas) {
    check(v >= 0.0, "sweep.betas: values must be >= 0");
  }
  check(c.sweep.ell_min >= 1, "sweep.ell_min: must be >= 1");
  check(c.sweep.ell_max >= c.sweep.ell_min, "sweep.ell_max: must be >= sweep.ell_min");
  check(c.sweep.min_redundancy >= 0, "sweep.min_redundancy: must be >= 0");
  check(c.sweep.n_extra >= c.sweep.min_redundancy, "sweep.n_extra: must be >= sweep.min_redundancy");
  check(!c.sweep.schemes.empty(), "sweep.schemes: no schemes selected");

  if (!r.problems().empty()) {
    throw ConfigError(r.problems());
  }
  return c;
}

/// Layers, lowest first: defaults, the file (if any), `preset`, the
/// environment, `overrides`.
[[nodiscard]] inline RunConfig load_run_config(const std::optional<std::string>& path,
                                               const ConfigOverrides& overrides = {},
                                               const ConfigOverrides& preset = {}) {
  boost::property_tree::ptree tree;
  if (path) {
    try {
      boost::property_tree::read_ini(*path, tree);
    } catch (const boost::property_tree::ini_parser_error& ex) {
      throw ConfigError({ex.filename() + ":" + std::to_string(ex.line()) + ": " + ex.message()});
    }
  }
  for (const auto& [key, value] : preset) {
    tree.put(boost::property_tree::ptree::path_type(key, '.'), value);
  }
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
    tree.put("output.dir", std::string(env));
  }
  for (const auto& [key, value] : overrides) {
    tree.put(boost::property_tree::ptree::path_type(key, '.'), value);
  }
  return run_config_from_tree(tree);
}

[[nodiscard]] inline RunConfig parse_run_config(const std::string& ini_text) {
  boost::property_tree::ptree tree;
  std::istringstream in{ini_text};
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& ex) {
    throw ConfigError({"line " + std::to_string(ex.line()) + ": " + ex.message()});
  }
  return run_config_from_tree(tree);
}

}  // namespace ouage

#endif  // OUAGE_RUN_CONFIG_HPP
