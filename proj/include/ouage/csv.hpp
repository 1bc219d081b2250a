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

#ifndef OUAGE_CSV_HPP
#define OUAGE_CSV_HPP

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ouage/experiments.hpp"
#include "ouage/sim.hpp"

/**
 * \file
 * \brief CSV writers and readers for sweep, argmin, failure and trace files.
 *
 * Reals are written with 12 significant digits ("%.12g"), so a file read back
 * and written again is byte-identical.
 */

namespace ouage::csv {

inline constexpr std::string_view kSweepHeader =
    "scheme,theta,sigma,epsilon,ell,n,t_b,beta,lambda_star,iterations,residual";
inline constexpr std::string_view kArgminHeader =
    "scheme,theta,sigma,epsilon,t_b,beta,ell_star,n_star,lambda_star,ties";
inline constexpr std::string_view kFailureHeader = "scheme,theta,sigma,epsilon,ell,n,t_b,beta,message";
inline constexpr std::string_view kTraceHeader = "epoch,start_age,wait,delay,attempts,reward,length";
inline constexpr std::string_view kCurveHeader = "scheme,theta,epsilon,beta,lambda_star";

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_{line} {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[nodiscard]] inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// Quotes a field when it holds a comma, quote or newline.
[[nodiscard]] inline std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

/// Splits one record; doubled quotes inside quoted fields unescape to one.
[[nodiscard]] inline std::vector<std::string> split_record(std::string_view line, std::size_t line_no = 0) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) {
    throw ParseError(line_no, "unterminated quoted field");
  }
  return fields;
}

namespace detail {

inline double parse_real(const std::string& s, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ParseError(line, "not a number: '" + s + "'");
  }
  return v;
}

inline long long parse_int(const std::string& s, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ParseError(line, "not an integer: '" + s + "'");
  }
  return v;
}

inline std::uint64_t parse_uint(const std::string& s, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || s.front() == '-' || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ParseError(line, "not an unsigned integer: '" + s + "'");
  }
  return v;
}

inline Scheme parse_scheme(const std::string& s, std::size_t line) {
  if (s == "IIR") return Scheme::iir;
  if (s == "FR") return Scheme::fr;
  throw ParseError(line, "unknown scheme '" + s + "'");
}

/// Reads a file body after checking its header; calls row(fields, line).
template <class Row>
void read_rows(std::istream& in, std::string_view header, std::size_t width, const Row& row) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw ParseError(1, "expected header '" + std::string(header) + "'");
  }
  for (std::size_t no = 2; std::getline(in, line); ++no) {
    if (line.empty()) {
      continue;
    }
    const auto f = split_record(line, no);
    if (f.size() != width) {
      throw ParseError(no, "expected " + std::to_string(width) + " fields, got " + std::to_string(f.size()));
    }
    row(f, no);
  }
}

}  // namespace detail

inline void write_sweep(std::ostream& out, const std::vector<SweepRecord>& records) {
  out << kSweepHeader << '\n';
  for (const auto& r : records) {
    out << to_string(r.scheme) << ',' << format_real(r.theta) << ',' << format_real(r.sigma) << ','
        << format_real(r.epsilon) << ',' << r.ell << ',' << r.n << ',' << format_real(r.t_b) << ','
        << format_real(r.beta) << ',' << format_real(r.lambda_star) << ',' << r.iterations << ','
        << format_real(r.residual) << '\n';
  }
}

[[nodiscard]] inline std::vector<SweepRecord> read_sweep(std::istream& in) {
  std::vector<SweepRecord> out;
  detail::read_rows(in, kSweepHeader, 11, [&](const std::vector<std::string>& f, std::size_t no) {
    SweepRecord r;
    r.scheme = detail::parse_scheme(f[0], no);
    r.theta = detail::parse_real(f[1], no);
    r.sigma = detail::parse_real(f[2], no);
    r.epsilon = detail::parse_real(f[3], no);
    r.ell = static_cast<int>(detail::parse_int(f[4], no));
    r.n = static_cast<int>(detail::parse_int(f[5], no));
    r.t_b = detail::parse_real(f[6], no);
    r.beta = detail::parse_real(f[7], no);
    r.lambda_star = detail::parse_real(f[8], no);
    r.iterations = static_cast<int>(detail::parse_int(f[9], no));
    r.residual = detail::parse_real(f[10], no);
    out.push_back(r);
  });
  return out;
}

/// Ties are written as "ell:n" pairs joined by ';'.
inline void write_argmins(std::ostream& out, const std::vector<ArgminRecord>& argmins) {
  out << kArgminHeader << '\n';
  for (const auto& a : argmins) {
    std::string ties;
    for (const auto& [l, n] : a.ties) {
      if (!ties.empty()) {
        ties += ';';
      }
      ties += std::to_string(l) + ':' + std::to_string(n);
    }
    out << to_string(a.scheme) << ',' << format_real(a.theta) << ',' << format_real(a.sigma) << ','
        << format_real(a.epsilon) << ',' << format_real(a.t_b) << ',' << format_real(a.beta) << ',' << a.ell_star
        << ',' << a.n_star << ',' << format_real(a.lambda_star) << ',' << ties << '\n';
  }
}

[[nodiscard]] inline std::vector<ArgminRecord> read_argmins(std::istream& in) {
  std::vector<ArgminRecord> out;
  detail::read_rows(in, kArgminHeader, 10, [&](const std::vector<std::string>& f, std::size_t no) {
    ArgminRecord a;
    a.scheme = detail::parse_scheme(f[0], no);
    a.theta = detail::parse_real(f[1], no);
    a.sigma = detail::parse_real(f[2], no);
    a.epsilon = detail::parse_real(f[3], no);
    a.t_b = detail::parse_real(f[4], no);
    a.beta = detail::parse_real(f[5], no);
    a.ell_star = static_cast<int>(detail::parse_int(f[6], no));
    a.n_star = static_cast<int>(detail::parse_int(f[7], no));
    a.lambda_star = detail::parse_real(f[8], no);
    std::stringstream ties{f[9]};
    for (std::string pair; std::getline(ties, pair, ';');) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) {
        throw ParseError(no, "malformed tie '" + pair + "'");
      }
      a.ties.emplace_back(static_cast<int>(detail::parse_int(pair.substr(0, colon), no)),
                          static_cast<int>(detail::parse_int(pair.substr(colon + 1), no)));
    }
    out.push_back(std::move(a));
  });
  return out;
}

inline void write_failures(std::ostream& out, const std::vector<SweepFailure>& failures) {
  out << kFailureHeader << '\n';
  for (const auto& f : failures) {
    const auto& p = f.point;
    out << to_string(p.scheme) << ',' << format_real(p.theta) << ',' << format_real(p.sigma) << ','
        << format_real(p.epsilon) << ',' << p.ell << ',' << p.n << ',' << format_real(p.t_b) << ','
        << format_real(p.beta) << ',' << quote(f.message) << '\n';
  }
}

/// Messages are single-line; embedded newlines are not supported by the reader.
[[nodiscard]] inline std::vector<SweepFailure> read_failures(std::istream& in) {
  std::vector<SweepFailure> out;
  detail::read_rows(in, kFailureHeader, 9, [&](const std::vector<std::string>& f, std::size_t no) {
    SweepFailure s;
    s.point.scheme = detail::parse_scheme(f[0], no);
    s.point.theta = detail::parse_real(f[1], no);
    s.point.sigma = detail::parse_real(f[2], no);
    s.point.epsilon = detail::parse_real(f[3], no);
    s.point.ell = static_cast<int>(detail::parse_int(f[4], no));
    s.point.n = static_cast<int>(detail::parse_int(f[5], no));
    s.point.t_b = detail::parse_real(f[6], no);
    s.point.beta = detail::parse_real(f[7], no);
    s.message = f[8];
    out.push_back(std::move(s));
  });
  return out;
}

inline void write_curves(std::ostream& out, const std::vector<BetaCurve>& curves) {
  out << kCurveHeader << '\n';
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.betas.size(); ++i) {
      out << to_string(c.scheme) << ',' << format_real(c.theta) << ',' << format_real(c.epsilon) << ','
          << format_real(c.betas[i]) << ',' << format_real(c.lambdas[i]) << '\n';
    }
  }
}

[[nodiscard]] inline std::vector<BetaCurve> read_curves(std::istream& in) {
  std::vector<BetaCurve> out;
  detail::read_rows(in, kCurveHeader, 5, [&](const std::vector<std::string>& f, std::size_t no) {
    const Scheme s = detail::parse_scheme(f[0], no);
    const double th = detail::parse_real(f[1], no);
    const double e = detail::parse_real(f[2], no);
    if (out.empty() || out.back().scheme != s || out.back().theta != th || out.back().epsilon != e) {
      out.push_back({s, th, e, {}, {}});
    }
    out.back().betas.push_back(detail::parse_real(f[3], no));
    out.back().lambdas.push_back(detail::parse_real(f[4], no));
  });
  return out;
}

inline void write_trace(std::ostream& out, const std::vector<EpochRecord>& trace) {
  out << kTraceHeader << '\n';
  for (const auto& e : trace) {
    out << e.index << ',' << format_real(e.start_age) << ',' << format_real(e.wait) << ',' << format_real(e.delay)
        << ',' << e.attempts << ',' << format_real(e.reward) << ',' << format_real(e.length) << '\n';
  }
}

[[nodiscard]] inline std::vector<EpochRecord> read_trace(std::istream& in) {
  std::vector<EpochRecord> out;
  detail::read_rows(in, kTraceHeader, 7, [&](const std::vector<std::string>& f, std::size_t no) {
    EpochRecord e;
    e.index = detail::parse_uint(f[0], no);
    e.start_age = detail::parse_real(f[1], no);
    e.wait = detail::parse_real(f[2], no);
    e.delay = detail::parse_real(f[3], no);
    e.attempts = detail::parse_uint(f[4], no);
    e.reward = detail::parse_real(f[5], no);
    e.length = detail::parse_real(f[6], no);
    out.push_back(e);
  });
  return out;
}

/// Key/value summary of one simulation run.
struct SimSummary {
  Scheme scheme = Scheme::iir;
  double theta = 0.0;
  double sigma = 0.0;
  double epsilon = 0.0;
  int ell = 0;
  int n = 0;
  double t_b = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t epochs = 0;
  double avg_penalty = 0.0;
  double std_error = 0.0;
  double lambda_star = 0.0;
  double total_time = 0.0;
};

inline constexpr std::string_view kSimSummaryHeader =
    "scheme,theta,sigma,epsilon,ell,n,t_b,beta,seed,epochs,avg_penalty,std_error,lambda_star,total_time";

inline void write_sim_summary(std::ostream& out, const SimSummary& s) {
  out << kSimSummaryHeader << '\n'
      << to_string(s.scheme) << ',' << format_real(s.theta) << ',' << format_real(s.sigma) << ','
      << format_real(s.epsilon) << ',' << s.ell << ',' << s.n << ',' << format_real(s.t_b) << ','
      << format_real(s.beta) << ',' << s.seed << ',' << s.epochs << ',' << format_real(s.avg_penalty) << ','
      << format_real(s.std_error) << ',' << format_real(s.lambda_star) << ',' << format_real(s.total_time) << '\n';
}

[[nodiscard]] inline std::vector<SimSummary> read_sim_summary(std::istream& in) {
  std::vector<SimSummary> out;
  detail::read_rows(in, kSimSummaryHeader, 14, [&](const std::vector<std::string>& f, std::size_t no) {
    SimSummary s;
    s.scheme = detail::parse_scheme(f[0], no);
    s.theta = detail::parse_real(f[1], no);
    s.sigma = detail::parse_real(f[2], no);
    s.epsilon = detail::parse_real(f[3], no);
    s.ell = static_cast<int>(detail::parse_int(f[4], no));
    s.n = static_cast<int>(detail::parse_int(f[5], no));
    s.t_b = detail::parse_real(f[6], no);
    s.beta = detail::parse_real(f[7], no);
    s.seed = detail::parse_uint(f[8], no);
    s.epochs = detail::parse_uint(f[9], no);
    s.avg_penalty = detail::parse_real(f[10], no);
    s.std_error = detail::parse_real(f[11], no);
    s.lambda_star = detail::parse_real(f[12], no);
    s.total_time = detail::parse_real(f[13], no);
    out.push_back(s);
  });
  return out;
}

}  // namespace ouage::csv

#endif  // OUAGE_CSV_HPP
