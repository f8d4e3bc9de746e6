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

// Spectral and mixing quantities of the non-backtracking walk.
//
// Exact k-step laws are propagated over directed edges: the state after
// step k is the probability of having just traversed edge (u -> v). One
// step moves the mass of (u -> v) uniformly onto the d - 1 edges (v -> w),
// w != u. The vertex law is the sum over edges entering each vertex.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbrw/error.hpp"
#include "nbrw/graph.hpp"
#include "nbrw/parallel.hpp"
#include "nbrw/rng.hpp"

namespace nbrw {

inline constexpr double kDefaultEigenTol = 1e-9;
inline constexpr std::uint64_t kPowerIterationCap = 100'000;
inline constexpr std::uint32_t kDenseEigenLimit = 512;
/// Largest k accepted by the k-step law unless the caller passes another horizon.
inline constexpr std::uint32_t kDefaultHorizon = 1u << 20;

struct SpectrumSummary {
  std::uint32_t d = 0;
  /// max_{i>1} |lambda_i| of the adjacency matrix.
  double lambda = 0.0;
  double tol = kDefaultEigenTol;

  /// lambda == d (within tol*d): disconnected or bipartite.
  bool has_gap() const noexcept { return lambda < d - tol * d; }
};

enum class EigenMethod { Auto, Dense, Power };

namespace detail {

inline double dense_lambda(const RegularGraph& g) {
  const Eigen::Index n = g.n();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Vertex u = 0; u < g.n(); ++u)
    for (Vertex v : g.neighbors(u)) a(u, v) = 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NoConvergence, "dense eigensolver failed");
  const auto& ev = solver.eigenvalues();  // ascending; ev[n-1] == d
  return std::max(std::abs(ev(0)), std::abs(ev(n - 2)));
}

inline void apply_adjacency(const RegularGraph& g, std::span<const double> x, std::span<double> y) {
  for (Vertex u = 0; u < g.n(); ++u) {
    double s = 0.0;
    for (Vertex v : g.neighbors(u)) s += x[v];
    y[u] = s;
  }
}

inline void remove_mean(std::span<double> x) {
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double& v : x) v -= mean;
}

inline double norm(std::span<const double> x) {
  return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

// Power iteration on A^2 restricted to the complement of the all-ones
// vector. Squaring folds lambda_2 and |lambda_n| onto the same side so the
// iterate cannot oscillate between them.
inline double power_lambda(const RegularGraph& g, double tol, std::uint64_t max_iter) {
  const std::size_t n = g.n();
  std::vector<double> x(n), y(n), z(n);
  Rng rng(0x5EEDF00DULL);
  for (double& v : x) v = rng.uniform() - 0.5;
  remove_mean(x);
  double nx = norm(x);
  for (double& v : x) v /= nx;
  double prev = -1.0;
  for (std::uint64_t it = 0; it < max_iter; ++it) {
    apply_adjacency(g, x, y);
    apply_adjacency(g, y, z);
    remove_mean(z);
    const double rayleigh = std::inner_product(x.begin(), x.end(), z.begin(), 0.0);
    const double estimate = std::sqrt(std::max(rayleigh, 0.0));
    const double nz = norm(z);
    if (nz == 0.0) return 0.0;
    for (std::size_t i = 0; i < n; ++i) x[i] = z[i] / nz;
    if (std::abs(estimate - prev) <= tol) return estimate;
    prev = estimate;
  }
  fail(ErrorCode::NoConvergence, "power iteration hit " + std::to_string(max_iter) + " iterations");
}

}  // namespace detail

/// Largest non-trivial adjacency eigenvalue in absolute value. Auto picks
/// the dense solver up to 512 vertices and deflated power iteration above.
inline SpectrumSummary second_eigenvalue(const RegularGraph& g, double tol = kDefaultEigenTol,
                                         EigenMethod method = EigenMethod::Auto,
                                         std::uint64_t max_iter = kPowerIterationCap) {
  if (!(tol > 0.0 && tol < 1.0)) fail(ErrorCode::InvalidArgument, "tol must lie in (0, 1)");
  if (method == EigenMethod::Auto) method = g.n() <= kDenseEigenLimit ? EigenMethod::Dense : EigenMethod::Power;
  const double lambda =
      method == EigenMethod::Dense ? detail::dense_lambda(g) : detail::power_lambda(g, tol, max_iter);
  return {g.d(), std::min(lambda, static_cast<double>(g.d())), tol};
}

/// psi(x) = 1 on [0, 1], x + sqrt(x^2 - 1) above.
inline double psi(double x) {
  if (!(x >= 0.0)) fail(ErrorCode::NegativeInput, "psi needs x >= 0, got " + std::to_string(x));
  return x <= 1.0 ? 1.0 : x + std::sqrt(x * x - 1.0);
}

namespace detail {
inline void check_rho_inputs(std::uint32_t d, double lambda) {
  if (d < 3) fail(ErrorCode::DegreeTooSmall, "mixing rate needs d >= 3, got " + std::to_string(d));
  if (!(lambda >= 0.0 && lambda <= d))
    fail(ErrorCode::InvalidArgument, "lambda must lie in [0, d], got " + std::to_string(lambda));
}
}  // namespace detail

/// Mixing rate of the non-backtracking walk on an (n, d, lambda) graph,
/// psi(lambda / (2 sqrt(d-1))) / sqrt(d-1). Above the branch point this is
/// evaluated as (lambda + sqrt(lambda^2 - 4(d-1))) / (2(d-1)), which is
/// exact at lambda = d.
inline double mixing_rate_rho(std::uint32_t d, double lambda) {
  detail::check_rho_inputs(d, lambda);
  const double q = static_cast<double>(d) - 1.0;
  const double disc = lambda * lambda - 4.0 * q;
  if (disc <= 0.0) return 1.0 / std::sqrt(q);
  return (lambda + std::sqrt(disc)) / (2.0 * q);
}

/// max(lambda/d, 1/sqrt(d-1)); never below mixing_rate_rho.
inline double rho_upper_bound(std::uint32_t d, double lambda) {
  detail::check_rho_inputs(d, lambda);
  return std::max(lambda / d, 1.0 / std::sqrt(static_cast<double>(d) - 1.0));
}

struct VertexDistribution {
  std::vector<double> probs;

  double operator[](Vertex v) const { return probs[v]; }
  double total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }
};

/// Mass on directed edges of one graph; probs[e] is the weight of edge
/// slot e (see RegularGraph). The graph must outlive the distribution.
class EdgeDistribution {
 public:
  /// Law after the first step from `start`: 1/d on each out-edge.
  static EdgeDistribution first_step(const RegularGraph& g, Vertex start) {
    if (start >= g.n()) fail(ErrorCode::BadVertexId, "start " + std::to_string(start));
    EdgeDistribution dist(g);
    const std::size_t base = static_cast<std::size_t>(start) * g.d();
    for (std::uint32_t i = 0; i < g.d(); ++i) dist.probs_[base + i] = 1.0 / g.d();
    return dist;
  }

  /// One non-backtracking step. `scratch` is reused storage.
  void step(std::vector<double>& scratch) {
    const RegularGraph& g = *graph_;
    const std::uint32_t d = g.d();
    const double share = 1.0 / (d - 1);
    scratch.resize(probs_.size());
    for (Vertex v = 0; v < g.n(); ++v) {
      const std::size_t base = static_cast<std::size_t>(v) * d;
      double inflow = 0.0;
      for (std::uint32_t j = 0; j < d; ++j) inflow += probs_[g.reverse(base + j)];
      // edge (v -> w) receives from every (u -> v) except u = w
      for (std::uint32_t j = 0; j < d; ++j) scratch[base + j] = (inflow - probs_[g.reverse(base + j)]) * share;
    }
    probs_.swap(scratch);
  }

  void step() {
    std::vector<double> scratch;
    step(scratch);
  }

  /// Probability of standing at each vertex (the head of the last edge).
  VertexDistribution vertex_marginal() const {
    VertexDistribution out{std::vector<double>(graph_->n(), 0.0)};
    marginal_into(out.probs);
    return out;
  }

  void marginal_into(std::span<double> out) const {
    const RegularGraph& g = *graph_;
    const std::uint32_t d = g.d();
    for (Vertex v = 0; v < g.n(); ++v) {
      const std::size_t base = static_cast<std::size_t>(v) * d;
      double s = 0.0;
      for (std::uint32_t j = 0; j < d; ++j) s += probs_[g.reverse(base + j)];
      out[v] = s;
    }
  }

  std::span<const double> probs() const noexcept { return probs_; }
  const RegularGraph& graph() const noexcept { return *graph_; }
  double total() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

 private:
  explicit EdgeDistribution(const RegularGraph& g) : graph_(&g), probs_(g.num_directed_edges(), 0.0) {}

  const RegularGraph* graph_;
  std::vector<double> probs_;
};

namespace detail {
inline void check_walk_degree(const RegularGraph& g, std::uint64_t k) {
  if (k >= 2 && g.d() < 3)
    fail(ErrorCode::DegreeTooSmall, "non-backtracking walks of length >= 2 need d >= 3");
}
}  // namespace detail

/// Exact law of the endpoint of a k-step non-backtracking walk from start.
inline VertexDistribution nbrw_k_step_vertex_distribution(const RegularGraph& g, Vertex start, std::uint64_t k,
                                                          std::uint64_t horizon = kDefaultHorizon) {
  if (start >= g.n()) fail(ErrorCode::BadVertexId, "start " + std::to_string(start));
  if (k > horizon)
    fail(ErrorCode::HorizonExceeded, "k = " + std::to_string(k) + " exceeds horizon " + std::to_string(horizon));
  detail::check_walk_degree(g, k);
  if (k == 0) {
    VertexDistribution point{std::vector<double>(g.n(), 0.0)};
    point.probs[start] = 1.0;
    return point;
  }
  auto dist = EdgeDistribution::first_step(g, start);
  std::vector<double> scratch;
  for (std::uint64_t step = 1; step < k; ++step) dist.step(scratch);
  return dist.vertex_marginal();
}

/// Laws for k = 0, 1, ..., kmax from one start, sharing the propagation.
inline std::vector<VertexDistribution> nbrw_vertex_distributions(const RegularGraph& g, Vertex start,
                                                                 std::uint64_t kmax) {
  std::vector<VertexDistribution> out;
  out.reserve(kmax + 1);
  out.push_back(nbrw_k_step_vertex_distribution(g, start, 0));
  if (kmax == 0) return out;
  detail::check_walk_degree(g, kmax);
  auto dist = EdgeDistribution::first_step(g, start);
  std::vector<double> scratch;
  for (std::uint64_t k = 1; k <= kmax; ++k) {
    if (k > 1) dist.step(scratch);
    out.push_back(dist.vertex_marginal());
  }
  return out;
}

struct MixingReport {
  double rho = 0.0;
  double lambda = 0.0;
  /// Least t with dev(k) <= 1/n^2 for every t <= k <= cap; empty if dev(cap) > 1/n^2.
  std::optional<std::uint32_t> tau;
  /// dev[k] = max_{u,v} |P~(k)_{uv} - 1/n| for k = 0..cap.
  std::vector<double> dev;
  /// Short-return window (log n)^2.
  double window_L = 0.0;
};

/// Sweeps the exact k-step laws from every start vertex up to `cap` and
/// records the worst deviation from uniform at each k. Refuses graphs
/// without a spectral gap. Starts are split into contiguous blocks, one per
/// worker, and merged by max, so the result does not depend on `threads`.
inline MixingReport fine_mixing_time_tau(const RegularGraph& g, std::uint32_t cap, unsigned threads = 1,
                                         double tol = kDefaultEigenTol) {
  if (cap == 0) fail(ErrorCode::InvalidArgument, "cap must be positive");
  if (g.d() < 3) fail(ErrorCode::DegreeTooSmall, "mixing needs d >= 3");
  const SpectrumSummary spectrum = second_eigenvalue(g, tol);
  if (!spectrum.has_gap())
    fail(ErrorCode::BipartiteOrDisconnected,
         "lambda = " + std::to_string(spectrum.lambda) + " equals d = " + std::to_string(g.d()));

  const std::uint32_t n = g.n();
  const double uniform = 1.0 / n;
  const std::size_t blocks = std::clamp<std::size_t>(threads, 1, n);
  std::vector<std::vector<double>> block_dev(blocks, std::vector<double>(cap + 1, 0.0));
  parallel_for(blocks, threads, [&](std::size_t b) {
    auto& dev = block_dev[b];
    const Vertex lo = static_cast<Vertex>(b * n / blocks);
    const Vertex hi = static_cast<Vertex>((b + 1) * n / blocks);
    std::vector<double> scratch, marginal(n);
    for (Vertex s = lo; s < hi; ++s) {
      dev[0] = std::max(dev[0], 1.0 - uniform);
      auto dist = EdgeDistribution::first_step(g, s);
      for (std::uint32_t k = 1; k <= cap; ++k) {
        if (k > 1) dist.step(scratch);
        dist.marginal_into(marginal);
        double worst = 0.0;
        for (double p : marginal) worst = std::max(worst, std::abs(p - uniform));
        dev[k] = std::max(dev[k], worst);
      }
    }
  });

  MixingReport report;
  report.lambda = spectrum.lambda;
  report.rho = mixing_rate_rho(g.d(), spectrum.lambda);
  report.dev.assign(cap + 1, 0.0);
  for (const auto& dev : block_dev)
    for (std::size_t k = 0; k <= cap; ++k) report.dev[k] = std::max(report.dev[k], dev[k]);
  const double threshold = 1.0 / (static_cast<double>(n) * n);
  std::optional<std::uint32_t> tau;
  for (std::uint32_t k = cap + 1; k-- > 0;) {
    if (report.dev[k] > threshold) break;
    tau = k;
  }
  report.tau = tau;
  const double log_n = std::log(static_cast<double>(n));
  report.window_L = log_n * log_n;
  return report;
}

/// max over ordered target pairs (i, j) of sum_{1 <= k < L} P~(k)_{v_i v_j}.
inline double short_return_mass_M(const RegularGraph& g, std::span<const Vertex> targets, std::uint32_t window) {
  if (targets.empty()) fail(ErrorCode::InvalidArgument, "targets must be nonempty");
  if (window == 0) fail(ErrorCode::InvalidArgument, "L must be at least 1");
  for (Vertex t : targets)
    if (t >= g.n()) fail(ErrorCode::BadVertexId, "target " + std::to_string(t));
  if (window <= 1) return 0.0;
  detail::check_walk_degree(g, window - 1);
  double best = 0.0;
  std::vector<double> scratch, marginal(g.n());
  for (Vertex from : targets) {
    std::vector<double> sums(targets.size(), 0.0);
    auto dist = EdgeDistribution::first_step(g, from);
    for (std::uint32_t k = 1; k < window; ++k) {
      if (k > 1) dist.step(scratch);
      dist.marginal_into(marginal);
      for (std::size_t j = 0; j < targets.size(); ++j) sums[j] += marginal[targets[j]];
    }
    best = std::max(best, *std::max_element(sums.begin(), sums.end()));
  }
  return best;
}

inline double short_return_mass_M(const RegularGraph& g, std::initializer_list<Vertex> targets,
                                  std::uint32_t window) {
  return short_return_mass_M(g, std::span<const Vertex>(targets.begin(), targets.size()), window);
}

/// Least-squares slope of log dev(k) against k over [k_lo, k_hi], skipping
/// non-positive entries.
inline double log_decay_slope(std::span<const double> dev, std::size_t k_lo, std::size_t k_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double count = 0;
  for (std::size_t k = k_lo; k <= k_hi && k < dev.size(); ++k) {
    if (!(dev[k] > 0.0)) continue;
    const double x = static_cast<double>(k);
    const double y = std::log(dev[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    count += 1;
  }
  if (count < 2) fail(ErrorCode::InvalidArgument, "slope fit needs at least two points");
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace nbrw
