/*
 * Copyright 2026 The nbrw-lab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// JSON and CSV encodings of the result types.

#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "json.hpp"
#include "nbrw/error.hpp"
#include "nbrw/sieve.hpp"
#include "nbrw/spectral.hpp"
#include "nbrw/stats.hpp"
#include "nbrw/walk.hpp"

namespace nbrw::io {

using nlohmann::json;

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double x) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline json to_json(const MixingReport& report) {
  json j;
  j["rho"] = report.rho;
  j["tau"] = report.tau ? json(*report.tau) : json(nullptr);
  j["dev"] = report.dev;
  return j;
}

inline MixingReport mixing_report_from_json(const json& j) {
  MixingReport report;
  report.rho = j.at("rho").get<double>();
  if (!j.at("tau").is_null()) report.tau = j.at("tau").get<std::uint32_t>();
  report.dev = j.at("dev").get<std::vector<double>>();
  return report;
}

/// "k,dev" series.
inline std::string dev_csv(const MixingReport& report) {
  std::string out = "k,dev\n";
  for (std::size_t k = 0; k < report.dev.size(); ++k) out += std::to_string(k) + "," + format_double(report.dev[k]) + "\n";
  return out;
}

/// "vertex,count" rows.
inline std::string counts_csv(const VisitCounts& counts) {
  std::string out = "vertex,count\n";
  for (std::size_t v = 0; v < counts.counts.size(); ++v)
    out += std::to_string(v) + "," + std::to_string(counts.counts[v]) + "\n";
  return out;
}

/// "t,count,fraction,poisson_reference" rows for t = 0..max(t_range, max load).
inline std::string histogram_csv(const VisitHistogram& hist, double mu, std::size_t t_range) {
  std::string out = "t,count,fraction,poisson_reference\n";
  const std::size_t upto = std::max(t_range + 1, hist.N.size());
  for (std::size_t t = 0; t < upto; ++t)
    out += std::to_string(t) + "," + std::to_string(hist.at(t)) + "," + format_double(hist.fraction(t)) + "," +
           format_double(poisson_pmf(mu, t)) + "\n";
  return out;
}

/// Ensemble rows: count pooled over trials, fraction = mean of N_t / n.
inline std::string histogram_csv(const HistogramEnsemble& ens, double mu, std::size_t t_range) {
  std::string out = "t,count,fraction,poisson_reference\n";
  const VisitHistogram& pooled = ens.pooled();
  const std::size_t upto = std::max(t_range + 1, pooled.N.size());
  for (std::size_t t = 0; t < upto; ++t)
    out += std::to_string(t) + "," + std::to_string(pooled.at(t)) + "," + format_double(ens.mean(t)) + "," +
           format_double(poisson_pmf(mu, t)) + "\n";
  return out;
}

inline json to_json(const VisitHistogram& hist) {
  return json{{"n", hist.n},
              {"m", hist.m},
              {"N", hist.N},
              {"excluded_radius", hist.excluded_radius},
              {"counted_vertices", hist.counted_vertices},
              {"counted_visits", hist.counted_visits}};
}

inline json to_json(const ComparisonReport& rep) {
  json j{{"mu", rep.mu},
         {"deviations", rep.deviations},
         {"fractions", rep.fractions},
         {"poisson_reference", rep.references},
         {"max_visit_observed", rep.max_visit_observed},
         {"tv_distance", rep.tv_distance}};
  if (rep.max_visit_predicted) {
    const auto& p = *rep.max_visit_predicted;
    j["max_visit_predicted"] = {{"center", p.center}, {"lo", p.lo}, {"hi", p.hi}, {"window", p.window},
                                {"delta", p.delta}};
  } else {
    j["max_visit_predicted"] = nullptr;
  }
  return j;
}

inline json to_json(const FactorialMomentTable& table) {
  json entries = json::array();
  for (std::size_t f = 0; f < table.size(); ++f) {
    json e{{"idx", table.unflatten(f)}, {"value", table.values()[f]}};
    if (table.has_stderr()) e["stderr"] = table.stderrs()[f];
    entries.push_back(std::move(e));
  }
  return json{{"r", table.r()}, {"tmax", table.tmax()}, {"entries", std::move(entries)}};
}

/// Reads a moment table. Entries may be omitted; the table is then cut
/// down to the largest depth at which every index is present, so requests
/// that need a missing entry fail with TableTooSmall.
inline FactorialMomentTable moment_table_from_json(const json& j) {
  try {
    const auto r = j.at("r").get<std::uint32_t>();
    const auto tmax = j.at("tmax").get<std::uint32_t>();
    FactorialMomentTable full(r, tmax);
    std::vector<char> present(full.size(), 0);
    bool any_stderr = false;
    for (const auto& e : j.at("entries")) {
      const auto idx = e.at("idx").get<std::vector<std::uint64_t>>();
      if (!full.contains(idx)) fail(ErrorCode::ParseError, "entry index outside declared tmax");
      full.set(idx, e.at("value").get<double>());
      if (e.contains("stderr")) {
        full.set_stderr(idx, e.at("stderr").get<double>());
        any_stderr = true;
      }
      present[full.flat(idx)] = 1;
    }
    // complete depth: largest D with every index in {0..D}^r present
    std::uint32_t complete = tmax + 1;
    for (std::size_t f = 0; f < full.size(); ++f) {
      if (present[f]) continue;
      const auto idx = full.unflatten(f);
      complete = std::min(complete, static_cast<std::uint32_t>(*std::max_element(idx.begin(), idx.end())));
    }
    if (complete == 0) fail(ErrorCode::TableTooSmall, "moment table lacks S(0,...,0)");
    const std::uint32_t depth = complete - 1;
    if (depth == tmax) return full;
    FactorialMomentTable cut(r, depth);
    for (std::size_t f = 0; f < cut.size(); ++f) {
      const auto idx = cut.unflatten(f);
      cut.set(idx, full.at(idx));
      if (any_stderr) cut.set_stderr(idx, full.stderr_at(idx));
    }
    return cut;
  } catch (const json::exception& e) {
    fail(ErrorCode::ParseError, std::string("moment table: ") + e.what());
  }
}

inline json to_json(const SieveBounds& bounds) {
  return json{{"m", bounds.m}, {"lambda", bounds.lambda}, {"lower", bounds.lower}, {"upper", bounds.upper}};
}

inline json to_json(const BrunCheck& check) {
  return json{{"hypothesis_ok", check.hypothesis_ok},
              {"s_above_mu", check.s_above_mu},
              {"epsilon_above_tail", check.epsilon_above_tail},
              {"epsilon_below_cap", check.epsilon_below_cap},
              {"moments_within_epsilon", check.moments_within_epsilon},
              {"max_moment_deviation", check.max_moment_deviation},
              {"epsilon_prime", check.epsilon_prime},
              {"required_depth", check.required_depth}};
}

}  // namespace nbrw::io
