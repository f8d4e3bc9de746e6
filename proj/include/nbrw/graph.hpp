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

// Simple d-regular graphs: construction, fixtures, random generation,
// girth and BFS distances, and the edge-list text format.

#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nbrw/error.hpp"
#include "nbrw/rng.hpp"

namespace nbrw {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Marker for "no cycle" (girth) and "unreachable" (distance).
inline constexpr std::uint32_t kInfinity = std::numeric_limits<std::uint32_t>::max();

/// Immutable simple d-regular graph.
///
/// Neighbours live in one flat array: the neighbours of v occupy slots
/// [v*d, v*d + d), sorted ascending. Slot index e = v*d + i doubles as the
/// id of the directed edge v -> neighbors(v)[i]; reverse(e) is the slot of
/// the opposite direction.
class RegularGraph {
 public:
  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t d() const noexcept { return d_; }
  std::size_t num_edges() const noexcept { return static_cast<std::size_t>(n_) * d_ / 2; }
  std::size_t num_directed_edges() const noexcept { return adj_.size(); }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {adj_.data() + static_cast<std::size_t>(v) * d_, d_};
  }

  /// Head of directed edge e.
  Vertex head(std::size_t e) const noexcept { return adj_[e]; }
  /// Tail of directed edge e.
  Vertex tail(std::size_t e) const noexcept { return static_cast<Vertex>(e / d_); }
  /// Slot of the opposite direction of e.
  std::size_t reverse(std::size_t e) const noexcept { return rev_[e]; }

  bool has_edge(Vertex u, Vertex v) const noexcept {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Undirected edges (u < v), lexicographically sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(num_edges());
    for (Vertex u = 0; u < n_; ++u)
      for (Vertex v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  friend bool operator==(const RegularGraph& a, const RegularGraph& b) {
    return a.n_ == b.n_ && a.d_ == b.d_ && a.adj_ == b.adj_;
  }

  friend RegularGraph build_from_edge_list(std::uint32_t n, std::span<const Edge> edges);

 private:
  RegularGraph() = default;

  std::uint32_t n_ = 0;
  std::uint32_t d_ = 0;
  std::vector<Vertex> adj_;
  std::vector<std::size_t> rev_;
};

/// Validates and builds. Rejects self-loops, repeated pairs, ids outside
/// [0, n), and any degree sequence that is not constant d >= 2.
inline RegularGraph build_from_edge_list(std::uint32_t n, std::span<const Edge> edges) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "graph needs at least one vertex");
  std::vector<std::vector<Vertex>> lists(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n)
      fail(ErrorCode::BadVertexId, "edge (" + std::to_string(u) + "," + std::to_string(v) + ") outside [0," +
                                       std::to_string(n) + ")");
    if (u == v) fail(ErrorCode::SelfLoop, "self-loop at vertex " + std::to_string(u));
    lists[u].push_back(v);
    lists[v].push_back(u);
  }
  for (Vertex v = 0; v < n; ++v) {
    auto& nb = lists[v];
    std::sort(nb.begin(), nb.end());
    if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
      fail(ErrorCode::DuplicateEdge, "repeated edge at vertex " + std::to_string(v));
  }
  const auto d = static_cast<std::uint32_t>(lists[0].size());
  for (Vertex v = 0; v < n; ++v)
    if (lists[v].size() != d)
      fail(ErrorCode::NotRegular, "vertex 0 has degree " + std::to_string(d) + " but vertex " + std::to_string(v) +
                                      " has degree " + std::to_string(lists[v].size()));
  if (d < 2) fail(ErrorCode::NotRegular, "degree " + std::to_string(d) + " is below 2");

  RegularGraph g;
  g.n_ = n;
  g.d_ = d;
  g.adj_.reserve(static_cast<std::size_t>(n) * d);
  for (const auto& nb : lists) g.adj_.insert(g.adj_.end(), nb.begin(), nb.end());
  g.rev_.resize(g.adj_.size());
  for (std::size_t e = 0; e < g.adj_.size(); ++e) {
    const Vertex u = g.tail(e);
    auto nb = g.neighbors(g.adj_[e]);
    const auto pos = static_cast<std::size_t>(std::lower_bound(nb.begin(), nb.end(), u) - nb.begin());
    g.rev_[e] = static_cast<std::size_t>(g.adj_[e]) * d + pos;
  }
  return g;
}

inline RegularGraph build_from_edge_list(std::uint32_t n, std::initializer_list<Edge> edges) {
  return build_from_edge_list(n, std::span<const Edge>(edges.begin(), edges.size()));
}

/// Small fixtures: "k4", "petersen", "k33", "q3".
inline RegularGraph named_graph(std::string_view name) {
  std::vector<Edge> edges;
  std::uint32_t n = 0;
  if (name == "k4") {
    n = 4;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  } else if (name == "petersen") {
    n = 10;
    for (Vertex i = 0; i < 5; ++i) {
      edges.emplace_back(i, (i + 1) % 5);              // outer 5-cycle
      edges.emplace_back(i, i + 5);                    // spokes
      edges.emplace_back(i + 5, (i + 2) % 5 + 5);      // inner pentagram
    }
  } else if (name == "k33") {
    n = 6;
    for (Vertex u = 0; u < 3; ++u)
      for (Vertex v = 3; v < 6; ++v) edges.emplace_back(u, v);
  } else if (name == "q3") {
    n = 8;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex bit = 1; bit < n; bit <<= 1)
        if (u < (u ^ bit)) edges.emplace_back(u, u ^ bit);
  } else {
    fail(ErrorCode::UnknownName, "no named graph '" + std::string(name) + "'");
  }
  return build_from_edge_list(n, edges);
}

/// BFS distances from `source`; kInfinity marks unreachable vertices.
/// Stops expanding past `max_depth`.
inline std::vector<std::uint32_t> bfs_distances(const RegularGraph& g, Vertex source,
                                                std::uint32_t max_depth = kInfinity) {
  if (source >= g.n()) fail(ErrorCode::BadVertexId, "vertex " + std::to_string(source));
  std::vector<std::uint32_t> dist(g.n(), kInfinity);
  std::vector<Vertex> queue;
  queue.reserve(g.n());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex u = queue[head];
    if (dist[u] >= max_depth) continue;
    for (Vertex w : g.neighbors(u)) {
      if (dist[w] == kInfinity) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

/// Shortest-path length, kInfinity when disconnected.
inline std::uint32_t pairwise_distance(const RegularGraph& g, Vertex u, Vertex v) {
  if (u >= g.n() || v >= g.n())
    fail(ErrorCode::BadVertexId, "pair (" + std::to_string(u) + "," + std::to_string(v) + ")");
  if (u == v) return 0;
  return bfs_distances(g, u)[v];
}

/// Length of the shortest cycle, kInfinity for forests.
///
/// One BFS per root. A non-tree edge (x, y) seen from the root closes a
/// closed walk of length dist[x] + dist[y] + 1; the minimum over all roots
/// is the girth. A root's BFS stops once no shorter cycle can appear.
inline std::uint32_t girth(const RegularGraph& g) {
  const std::uint32_t n = g.n();
  std::uint32_t best = kInfinity;
  std::vector<std::uint32_t> dist(n, kInfinity);
  std::vector<Vertex> parent(n);
  std::vector<Vertex> queue;
  queue.reserve(n);
  for (Vertex root = 0; root < n; ++root) {
    for (Vertex v : queue) dist[v] = kInfinity;
    queue.clear();
    dist[root] = 0;
    parent[root] = root;
    queue.push_back(root);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Vertex x = queue[head];
      if (best != kInfinity && 2 * dist[x] + 1 >= best) break;
      for (Vertex y : g.neighbors(x)) {
        if (dist[y] == kInfinity) {
          dist[y] = dist[x] + 1;
          parent[y] = x;
          queue.push_back(y);
        } else if (parent[x] != y) {
          best = std::min(best, dist[x] + dist[y] + 1);
        }
      }
    }
    if (best == 3) break;
  }
  return best;
}

/// Greedy lowest-id-first selection of r vertices with pairwise distance
/// at least min_distance, starting from `anchor`.
inline std::vector<Vertex> far_vertex_set(const RegularGraph& g, std::uint32_t r, std::uint32_t min_distance,
                                          Vertex anchor) {
  if (r == 0 || min_distance == 0) fail(ErrorCode::InvalidArgument, "r and g must be at least 1");
  if (anchor >= g.n()) fail(ErrorCode::BadVertexId, "anchor " + std::to_string(anchor));
  std::vector<Vertex> chosen{anchor};
  // blocked[v]: v is closer than min_distance to something already chosen
  std::vector<char> blocked(g.n(), 0);
  auto block_around = [&](Vertex c) {
    const auto dist = bfs_distances(g, c, min_distance);
    for (Vertex v = 0; v < g.n(); ++v)
      if (dist[v] < min_distance) blocked[v] = 1;
  };
  block_around(anchor);
  for (Vertex v = 0; v < g.n() && chosen.size() < r; ++v) {
    if (blocked[v]) continue;
    chosen.push_back(v);
    block_around(v);
  }
  if (chosen.size() < r)
    fail(ErrorCode::Infeasible, "only " + std::to_string(chosen.size()) + " vertices at pairwise distance >= " +
                                    std::to_string(min_distance));
  return chosen;
}

struct GraphGenSpec {
  std::uint32_t n = 0;
  std::uint32_t d = 3;
  std::optional<std::uint32_t> min_girth;
  std::uint64_t seed = 0;
  std::uint32_t max_attempts = 10000;
};

namespace detail {

// Pairings tried per simple-graph draw before giving up.
inline constexpr std::uint64_t kMaxPairingRestarts = 1'000'000;

// One uniform pairing of the n*d stubs; nullopt on the first self-loop or
// repeated edge. Aborting early accepts exactly the same pairings as
// building the whole multigraph and rejecting it afterwards.
inline std::optional<std::vector<Edge>> try_pairing(std::uint32_t n, std::uint32_t d, Rng& rng,
                                                    std::vector<Vertex>& stubs, std::vector<Vertex>& adj,
                                                    std::vector<std::uint32_t>& fill) {
  stubs.resize(static_cast<std::size_t>(n) * d);
  for (std::size_t i = 0; i < stubs.size(); ++i) stubs[i] = static_cast<Vertex>(i / d);
  shuffle(stubs, rng);
  adj.assign(stubs.size(), 0);
  fill.assign(n, 0);
  std::vector<Edge> edges;
  edges.reserve(stubs.size() / 2);
  for (std::size_t i = 0; i < stubs.size(); i += 2) {
    const Vertex u = stubs[i];
    const Vertex v = stubs[i + 1];
    if (u == v) return std::nullopt;
    const Vertex* begin = adj.data() + static_cast<std::size_t>(u) * d;
    if (std::find(begin, begin + fill[u], v) != begin + fill[u]) return std::nullopt;
    adj[static_cast<std::size_t>(u) * d + fill[u]++] = v;
    adj[static_cast<std::size_t>(v) * d + fill[v]++] = u;
    edges.emplace_back(std::min(u, v), std::max(u, v));
  }
  return edges;
}

}  // namespace detail

/// Configuration-model d-regular graph with rejection of non-simple
/// pairings, regenerated until the girth constraint (if any) holds.
/// Deterministic in spec.seed.
inline RegularGraph random_regular(const GraphGenSpec& spec) {
  if ((static_cast<std::uint64_t>(spec.n) * spec.d) % 2 != 0)
    fail(ErrorCode::OddDegreeSum, "n*d = " + std::to_string(static_cast<std::uint64_t>(spec.n) * spec.d) + " is odd");
  if (spec.d < 3) fail(ErrorCode::DegreeTooSmall, "random_regular needs d >= 3");
  if (spec.d >= spec.n) fail(ErrorCode::InvalidArgument, "need d < n");
  if (spec.max_attempts == 0) fail(ErrorCode::InvalidArgument, "max_attempts must be positive");
  if (spec.min_girth && *spec.min_girth < 3) fail(ErrorCode::InvalidArgument, "min_girth must be at least 3");

  Rng rng(spec.seed);
  std::vector<Vertex> stubs, adj;
  std::vector<std::uint32_t> fill;
  for (std::uint32_t attempt = 0; attempt < spec.max_attempts; ++attempt) {
    std::optional<std::vector<Edge>> edges;
    for (std::uint64_t restart = 0; !edges; ++restart) {
      if (restart == detail::kMaxPairingRestarts)
        fail(ErrorCode::AttemptsExhausted, "no simple pairing found for n=" + std::to_string(spec.n) +
                                               " d=" + std::to_string(spec.d));
      edges = detail::try_pairing(spec.n, spec.d, rng, stubs, adj, fill);
    }
    RegularGraph g = build_from_edge_list(spec.n, *edges);
    if (!spec.min_girth || girth(g) >= *spec.min_girth) return g;
  }
  fail(ErrorCode::AttemptsExhausted, "girth >= " + std::to_string(*spec.min_girth) + " not reached in " +
                                         std::to_string(spec.max_attempts) + " attempts");
}

// Edge-list text format:
//   n d
//   u v      (one line per edge, u < v, lexicographic order on write)

inline void write_edge_list(std::ostream& out, const RegularGraph& g) {
  out << g.n() << ' ' << g.d() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

inline std::string to_edge_list(const RegularGraph& g) {
  std::ostringstream out;
  write_edge_list(out, g);
  return out.str();
}

namespace detail {

inline bool parse_uint(std::string_view s, std::uint64_t& value) {
  if (s.empty() || s.size() > 19) return false;
  value = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
    value = value * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return !(s.size() > 1 && s[0] == '0');
}

// "a b" with exactly one ASCII space and canonical decimals.
inline bool parse_pair_line(std::string_view line, std::uint64_t& a, std::uint64_t& b) {
  const auto sp = line.find(' ');
  if (sp == std::string_view::npos) return false;
  return parse_uint(line.substr(0, sp), a) && parse_uint(line.substr(sp + 1), b);
}

}  // namespace detail

/// Strict reader: header "n d", then one "u v" (u < v) per newline-terminated line.
inline RegularGraph read_edge_list(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (text.empty() || text.back() != '\n') fail(ErrorCode::ParseError, "edge list must end with a newline");
  std::vector<std::string_view> lines;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto nl = rest.find('\n');
    lines.push_back(rest.substr(0, nl));
    rest.remove_prefix(nl + 1);
  }
  std::uint64_t n = 0, d = 0;
  if (!detail::parse_pair_line(lines[0], n, d) || n == 0 || n > kInfinity - 1)
    fail(ErrorCode::ParseError, "bad header line '" + std::string(lines[0]) + "'");
  const std::uint64_t expected = n * d / 2;
  if ((n * d) % 2 != 0 || lines.size() - 1 != expected)
    fail(ErrorCode::ParseError, "expected " + std::to_string(expected) + " edge lines, found " +
                                    std::to_string(lines.size() - 1));
  std::vector<Edge> edges;
  edges.reserve(expected);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::uint64_t u = 0, v = 0;
    if (!detail::parse_pair_line(lines[i], u, v) || u >= v || v >= n)
      fail(ErrorCode::ParseError, "line " + std::to_string(i + 1) + ": '" + std::string(lines[i]) + "'");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  RegularGraph g = build_from_edge_list(static_cast<std::uint32_t>(n), edges);
  if (g.d() != d) fail(ErrorCode::ParseError, "header degree " + std::to_string(d) + " does not match edges");
  return g;
}

inline RegularGraph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_edge_list(in);
}

}  // namespace nbrw
