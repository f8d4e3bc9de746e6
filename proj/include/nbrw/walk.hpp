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

// Seeded samplers for non-backtracking and simple random walks.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nbrw/error.hpp"
#include "nbrw/graph.hpp"
#include "nbrw/parallel.hpp"
#include "nbrw/rng.hpp"

namespace nbrw {

enum class WalkKind { Nbrw, Srw };

constexpr std::string_view to_string(WalkKind kind) noexcept { return kind == WalkKind::Nbrw ? "nbrw" : "srw"; }

inline WalkKind parse_walk_kind(std::string_view s) {
  if (s == "nbrw") return WalkKind::Nbrw;
  if (s == "srw") return WalkKind::Srw;
  fail(ErrorCode::InvalidArgument, "walk kind must be nbrw or srw, got '" + std::string(s) + "'");
}

struct WalkConfig {
  std::uint64_t length = 1;  // m
  Vertex start = 0;
  WalkKind kind = WalkKind::Nbrw;
  std::uint64_t seed = 0;
  bool record_trace = false;
};

/// Visits of one walk w_0..w_m. Positions 1..m are counted; w_0 is not.
struct VisitCounts {
  std::vector<std::uint32_t> counts;
  std::uint64_t length = 0;
  Vertex start = 0;
  Vertex end = 0;  // w_m
  std::vector<Vertex> trace;  // w_0..w_m when recorded

  std::uint32_t max_count() const noexcept {
    std::uint32_t best = 0;
    for (auto c : counts) best = std::max(best, c);
    return best;
  }
};

namespace detail {

inline void validate_walk(const RegularGraph& g, const WalkConfig& cfg) {
  if (cfg.length == 0) fail(ErrorCode::InvalidArgument, "walk length must be at least 1");
  if (cfg.start >= g.n()) fail(ErrorCode::BadStart, "start " + std::to_string(cfg.start) + " not in graph");
  if (cfg.kind == WalkKind::Nbrw && cfg.length >= 2 && g.d() < 3)
    fail(ErrorCode::DegreeTooSmall, "non-backtracking walks of length >= 2 need d >= 3");
  if (cfg.length > 0xFFFFFFFFULL) fail(ErrorCode::InvalidArgument, "walk length above 2^32 - 1");
}

inline VisitCounts empty_counts(const RegularGraph& g, const WalkConfig& cfg) {
  VisitCounts out;
  out.counts.assign(g.n(), 0);
  out.length = cfg.length;
  out.start = cfg.start;
  if (cfg.record_trace) {
    out.trace.reserve(cfg.length + 1);
    out.trace.push_back(cfg.start);
  }
  return out;
}

}  // namespace detail

/// Non-backtracking walk drawing from `rng`. The first step is uniform
/// over all d neighbours; every later step draws an index in [0, d-1) and
/// skips the slot of the vertex just left, so each step costs one draw.
inline VisitCounts nbrw_sample(const RegularGraph& g, const WalkConfig& cfg, Rng& rng) {
  detail::validate_walk(g, cfg);
  VisitCounts out = detail::empty_counts(g, cfg);
  const std::uint32_t d = g.d();
  std::size_t edge = static_cast<std::size_t>(cfg.start) * d + rng.below(d);
  for (std::uint64_t i = 1;; ++i) {
    const Vertex here = g.head(edge);
    ++out.counts[here];
    if (cfg.record_trace) out.trace.push_back(here);
    if (i == cfg.length) {
      out.end = here;
      break;
    }
    const std::size_t back = g.reverse(edge);  // slot of (here -> previous)
    const std::size_t back_pos = back - static_cast<std::size_t>(here) * d;
    std::size_t pos = rng.below(d - 1);
    if (pos >= back_pos) ++pos;
    edge = static_cast<std::size_t>(here) * d + pos;
  }
  return out;
}

/// Simple random walk: every step uniform over all d neighbours.
inline VisitCounts srw_sample(const RegularGraph& g, const WalkConfig& cfg, Rng& rng) {
  detail::validate_walk(g, cfg);
  VisitCounts out = detail::empty_counts(g, cfg);
  Vertex here = cfg.start;
  for (std::uint64_t i = 1; i <= cfg.length; ++i) {
    here = g.neighbors(here)[rng.below(g.d())];
    ++out.counts[here];
    if (cfg.record_trace) out.trace.push_back(here);
  }
  out.end = here;
  return out;
}

inline VisitCounts sample_walk(const RegularGraph& g, const WalkConfig& cfg, Rng& rng) {
  return cfg.kind == WalkKind::Nbrw ? nbrw_sample(g, cfg, rng) : srw_sample(g, cfg, rng);
}

/// Single walk on stream 0 of cfg.seed (identical to trial 0 of run_trials).
inline VisitCounts nbrw_sample(const RegularGraph& g, const WalkConfig& cfg) {
  Rng rng(cfg.seed, 0);
  return nbrw_sample(g, cfg, rng);
}

inline VisitCounts srw_sample(const RegularGraph& g, const WalkConfig& cfg) {
  Rng rng(cfg.seed, 0);
  return srw_sample(g, cfg, rng);
}

/// Calls visit(i, counts) for trial i on stream (cfg.seed, i). Each worker
/// handles whole trials, so `visit` must write into per-trial slots.
template <typename Visitor>
void for_each_trial(const RegularGraph& g, const WalkConfig& cfg, std::uint64_t trials, unsigned threads,
                    Visitor&& visit) {
  if (trials == 0) fail(ErrorCode::InvalidArgument, "trials must be at least 1");
  detail::validate_walk(g, cfg);
  parallel_for(trials, threads, [&](std::size_t i) {
    Rng rng(cfg.seed, i);
    visit(i, sample_walk(g, cfg, rng));
  });
}

/// All trials, ordered by trial index whatever the thread count.
inline std::vector<VisitCounts> run_trials(const RegularGraph& g, const WalkConfig& cfg, std::uint64_t trials,
                                           unsigned threads = 1) {
  std::vector<VisitCounts> out(trials);
  for_each_trial(g, cfg, trials, threads, [&](std::size_t i, VisitCounts&& counts) { out[i] = std::move(counts); });
  return out;
}

}  // namespace nbrw
