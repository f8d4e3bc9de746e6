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

// Brute-force reference computations used only by the tests. Nothing here
// calls into the code paths it is used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "nbrw/graph.hpp"

namespace nbrw::oracle {

/// Endpoint law of a k-step non-backtracking walk from `start`, by listing
/// every vertex sequence w_0..w_k with w_{i+1} != w_{i-1}. Each path has
/// probability 1/d * (1/(d-1))^(k-1).
inline std::vector<double> enumerate_nbrw_endpoint_law(const RegularGraph& g, Vertex start, unsigned k) {
  std::vector<double> law(g.n(), 0.0);
  if (k == 0) {
    law[start] = 1.0;
    return law;
  }
  const double d = g.d();
  const double path_prob = (1.0 / d) * std::pow(1.0 / (d - 1.0), static_cast<double>(k) - 1.0);
  std::function<void(Vertex, Vertex, unsigned)> extend = [&](Vertex prev, Vertex here, unsigned steps) {
    if (steps == k) {
      law[here] += path_prob;
      return;
    }
    for (Vertex next : g.neighbors(here)) {
      if (next == prev) continue;
      extend(here, next, steps + 1);
    }
  };
  for (Vertex first : g.neighbors(start)) extend(start, first, 1);
  return law;
}

/// Number of k-step non-backtracking paths from start (d (d-1)^(k-1)).
inline std::uint64_t count_nbrw_paths(const RegularGraph& g, Vertex start, unsigned k) {
  std::uint64_t count = 0;
  std::function<void(Vertex, Vertex, unsigned)> extend = [&](Vertex prev, Vertex here, unsigned steps) {
    if (steps == k) {
      ++count;
      return;
    }
    for (Vertex next : g.neighbors(here))
      if (next != prev) extend(here, next, steps + 1);
  };
  for (Vertex first : g.neighbors(start)) extend(start, first, 1);
  return count;
}

/// Shortest simple cycle by exhaustive DFS over all simple paths; only
/// sensible for small graphs.
inline std::uint32_t brute_force_girth(const RegularGraph& g) {
  std::uint32_t best = kInfinity;
  std::vector<char> on_path(g.n(), 0);
  std::function<void(Vertex, Vertex, std::uint32_t)> dfs = [&](Vertex root, Vertex here, std::uint32_t len) {
    for (Vertex next : g.neighbors(here)) {
      if (next == root && len >= 3) best = std::min(best, len);
      if (next <= root || on_path[next]) continue;
      on_path[next] = 1;
      dfs(root, next, len + 1);
      on_path[next] = 0;
    }
  };
  for (Vertex root = 0; root < g.n(); ++root) {
    on_path[root] = 1;
    dfs(root, root, 1);
    on_path[root] = 0;
  }
  return best;
}

/// All-pairs distances by Floyd-Warshall.
inline std::vector<std::vector<std::uint32_t>> floyd_warshall(const RegularGraph& g) {
  const std::uint32_t n = g.n();
  const std::uint64_t inf = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::vector<std::uint64_t>> dist(n, std::vector<std::uint64_t>(n, inf));
  for (Vertex u = 0; u < n; ++u) {
    dist[u][u] = 0;
    for (Vertex v : g.neighbors(u)) dist[u][v] = 1;
  }
  for (Vertex k = 0; k < n; ++k)
    for (Vertex i = 0; i < n; ++i)
      for (Vertex j = 0; j < n; ++j)
        if (dist[i][k] + dist[k][j] < dist[i][j]) dist[i][j] = dist[i][k] + dist[k][j];
  std::vector<std::vector<std::uint32_t>> out(n, std::vector<std::uint32_t>(n));
  for (Vertex i = 0; i < n; ++i)
    for (Vertex j = 0; j < n; ++j) out[i][j] = dist[i][j] >= inf ? kInfinity : static_cast<std::uint32_t>(dist[i][j]);
  return out;
}

/// Exact joint law of the loads of bins 0..r-1 when n_balls balls go into
/// n_bins bins, by enumerating all n_bins^n_balls assignments. Returned
/// row-major over {0..n_balls}^r.
inline std::vector<double> enumerate_bin_loads(unsigned n_balls, unsigned n_bins, unsigned r) {
  const std::size_t side = n_balls + 1;
  std::size_t cells = 1;
  for (unsigned j = 0; j < r; ++j) cells *= side;
  std::vector<double> law(cells, 0.0);
  std::uint64_t total = 1;
  for (unsigned b = 0; b < n_balls; ++b) total *= n_bins;
  const double w = 1.0 / static_cast<double>(total);
  std::vector<unsigned> loads(r);
  for (std::uint64_t code = 0; code < total; ++code) {
    std::fill(loads.begin(), loads.end(), 0u);
    std::uint64_t c = code;
    for (unsigned b = 0; b < n_balls; ++b) {
      const auto bin = static_cast<unsigned>(c % n_bins);
      c /= n_bins;
      if (bin < r) ++loads[bin];
    }
    std::size_t idx = 0;
    for (unsigned j = 0; j < r; ++j) idx = idx * side + loads[j];
    law[idx] += w;
  }
  return law;
}

/// E[prod_j C(X_j, t_j)] for the bin loads, again by full enumeration.
inline double enumerate_bin_factorial_moment(unsigned n_balls, unsigned n_bins, const std::vector<unsigned>& t) {
  auto choose = [](unsigned x, unsigned i) {
    if (i > x) return 0.0;
    double c = 1.0;
    for (unsigned j = 1; j <= i; ++j) c = c * (x - i + j) / j;
    return c;
  };
  std::uint64_t total = 1;
  for (unsigned b = 0; b < n_balls; ++b) total *= n_bins;
  const auto r = static_cast<unsigned>(t.size());
  std::vector<unsigned> loads(r);
  double sum = 0.0;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::fill(loads.begin(), loads.end(), 0u);
    std::uint64_t c = code;
    for (unsigned b = 0; b < n_balls; ++b) {
      const auto bin = static_cast<unsigned>(c % n_bins);
      c /= n_bins;
      if (bin < r) ++loads[bin];
    }
    double prod = 1.0;
    for (unsigned j = 0; j < r; ++j) prod *= choose(loads[j], t[j]);
    sum += prod;
  }
  return sum / static_cast<double>(total);
}

}  // namespace nbrw::oracle
