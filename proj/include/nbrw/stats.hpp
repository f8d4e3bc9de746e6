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

// Visit-count histograms and their Poisson / balls-and-bins references.
// All logarithms are natural.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbrw/error.hpp"
#include "nbrw/graph.hpp"
#include "nbrw/rng.hpp"
#include "nbrw/sieve.hpp"
#include "nbrw/walk.hpp"

namespace nbrw {

/// N[t] = number of counted vertices (or bins) holding exactly t visits.
struct VisitHistogram {
  std::uint64_t n = 0;  // vertices (bins) in the underlying object
  std::uint64_t m = 0;  // walk length (balls)
  std::vector<std::uint64_t> N;
  std::uint32_t excluded_radius = 0;
  std::uint64_t counted_vertices = 0;  // sum_t N[t]
  std::uint64_t counted_visits = 0;    // sum_t t N[t]

  std::uint64_t at(std::size_t t) const noexcept { return t < N.size() ? N[t] : 0; }

  /// N[t] / counted_vertices.
  double fraction(std::size_t t) const noexcept {
    return counted_vertices == 0 ? 0.0 : static_cast<double>(at(t)) / static_cast<double>(counted_vertices);
  }

  /// Largest t with N[t] > 0.
  std::uint64_t max_load() const noexcept {
    for (std::size_t t = N.size(); t-- > 0;)
      if (N[t] > 0) return t;
    return 0;
  }

  /// Entrywise sum, used to pool trials.
  VisitHistogram& operator+=(const VisitHistogram& other) {
    if (other.N.size() > N.size()) N.resize(other.N.size(), 0);
    for (std::size_t t = 0; t < other.N.size(); ++t) N[t] += other.N[t];
    n += other.n;
    m += other.m;
    counted_vertices += other.counted_vertices;
    counted_visits += other.counted_visits;
    return *this;
  }
};

/// Histogram of per-vertex loads; `keep` selects which entries count.
template <typename Keep>
VisitHistogram histogram_of_loads(std::span<const std::uint32_t> loads, std::uint64_t m, Keep&& keep) {
  VisitHistogram h;
  h.n = loads.size();
  h.m = m;
  for (std::size_t v = 0; v < loads.size(); ++v) {
    if (!keep(v)) continue;
    const std::uint32_t t = loads[v];
    if (t >= h.N.size()) h.N.resize(t + 1, 0);
    ++h.N[t];
    ++h.counted_vertices;
    h.counted_visits += t;
  }
  if (h.N.empty()) h.N.push_back(0);
  return h;
}

inline VisitHistogram histogram_of_loads(std::span<const std::uint32_t> loads, std::uint64_t m) {
  return histogram_of_loads(loads, m, [](std::size_t) { return true; });
}

/// N_t of one walk. With excluded_radius > 0 only vertices at distance
/// >= excluded_radius from the walk's start are counted.
inline VisitHistogram visit_histogram(const VisitCounts& counts, const RegularGraph& g,
                                      std::uint32_t excluded_radius = 0) {
  if (counts.counts.size() != g.n()) fail(ErrorCode::DimensionMismatch, "counts do not match the graph");
  if (excluded_radius == 0) return histogram_of_loads(counts.counts, counts.length);
  const auto dist = bfs_distances(g, counts.start, excluded_radius);
  auto h = histogram_of_loads(counts.counts, counts.length,
                              [&](std::size_t v) { return dist[v] >= excluded_radius; });
  h.excluded_radius = excluded_radius;
  return h;
}

/// Po(mu) mass at t: the limiting value of N_t / n.
inline double expected_fraction(std::uint64_t t, double mu = 1.0) { return poisson_pmf(mu, t); }

namespace detail {
inline void check_log_domain(double n) {
  if (!(n > std::exp(std::numbers::e)))
    fail(ErrorCode::DomainTooSmall, "need n > e^e so that log log log n > 0, got " + std::to_string(n));
}
}  // namespace detail

/// F(x) = (1 + x lll(n)/ll(n)) log(n)/ll(n).
inline double threshold_F(double n, double x) {
  detail::check_log_domain(n);
  const double l1 = std::log(n);
  const double l2 = std::log(l1);
  const double l3 = std::log(l2);
  return (1.0 + x * l3 / l2) * l1 / l2;
}

struct MaxVisitPrediction {
  double center = 0.0;  // F(1)
  double lo = 0.0;      // F(1 - delta)
  double hi = 0.0;      // F(1 + delta)
  double window = 0.0;  // hi - lo
  double delta = 0.5;
};

/// Predicted maximal visit count of a length-n walk and its delta window.
inline MaxVisitPrediction max_visit_prediction(double n, double delta = 0.5) {
  if (!(delta >= 0.0)) fail(ErrorCode::InvalidArgument, "delta must be non-negative");
  MaxVisitPrediction p;
  p.center = threshold_F(n, 1.0);
  p.lo = threshold_F(n, 1.0 - delta);
  p.hi = threshold_F(n, 1.0 + delta);
  p.window = p.hi - p.lo;
  p.delta = delta;
  return p;
}

/// Throws n_balls into n_bins uniformly; histogram of bin loads.
inline VisitHistogram balls_and_bins(std::uint64_t n_balls, std::uint64_t n_bins, Rng& rng) {
  if (n_bins == 0) fail(ErrorCode::InvalidArgument, "need at least one bin");
  std::vector<std::uint32_t> loads(n_bins, 0);
  for (std::uint64_t b = 0; b < n_balls; ++b) ++loads[rng.below(n_bins)];
  return histogram_of_loads(loads, n_balls);
}

/// Stream 0 of `seed`.
inline VisitHistogram balls_and_bins(std::uint64_t n_balls, std::uint64_t n_bins, std::uint64_t seed) {
  Rng rng(seed, 0);
  return balls_and_bins(n_balls, n_bins, rng);
}

/// Total-variation distance between a law given on {0..size-1} and Po(mu).
/// Poisson mass beyond the supplied range is counted in full.
inline double tv_to_poisson(std::span<const double> law, double mu) {
  const auto horizon = static_cast<std::size_t>(std::ceil(mu + 20.0 * std::sqrt(mu) + 20.0));
  const std::size_t upto = std::max(law.size(), horizon);
  CompensatedSum diff, mass;
  for (std::size_t t = 0; t < upto; ++t) {
    const double p = poisson_pmf(mu, t);
    const double q = t < law.size() ? law[t] : 0.0;
    diff.add(std::abs(q - p));
    mass.add(p);
  }
  return std::clamp(0.5 * (diff.value() + std::max(0.0, 1.0 - mass.value())), 0.0, 1.0);
}

/// Total-variation distance between two laws on the non-negative integers.
inline double tv_distance(std::span<const double> a, std::span<const double> b) {
  CompensatedSum diff;
  for (std::size_t t = 0; t < std::max(a.size(), b.size()); ++t)
    diff.add(std::abs((t < a.size() ? a[t] : 0.0) - (t < b.size() ? b[t] : 0.0)));
  return std::clamp(0.5 * diff.value(), 0.0, 1.0);
}

struct ComparisonReport {
  double mu = 1.0;
  /// (N_t / counted) / Pr[Po(mu) = t] - 1 for t = 0..t_range.
  std::vector<double> deviations;
  std::vector<double> fractions;
  std::vector<double> references;
  std::uint64_t max_visit_observed = 0;
  std::optional<MaxVisitPrediction> max_visit_predicted;
  double tv_distance = 0.0;
};

/// Compares an empirical visit-count law (law[t] = share of vertices
/// visited t times) on an n-vertex object with Po(mu).
inline ComparisonReport compare_to_poisson(std::span<const double> law, std::uint64_t n,
                                           std::uint64_t max_visit_observed, double mu, std::uint32_t t_range,
                                           double delta = 0.5) {
  if (t_range < 1) fail(ErrorCode::InvalidArgument, "t_range must be at least 1");
  ComparisonReport rep;
  rep.mu = mu;
  for (std::uint32_t t = 0; t <= t_range; ++t) {
    const double ref = poisson_pmf(mu, t);
    const double frac = t < law.size() ? law[t] : 0.0;
    rep.fractions.push_back(frac);
    rep.references.push_back(ref);
    rep.deviations.push_back(frac / ref - 1.0);
  }
  rep.tv_distance = tv_to_poisson(law, mu);
  rep.max_visit_observed = max_visit_observed;
  if (static_cast<double>(n) > std::exp(std::numbers::e))
    rep.max_visit_predicted = max_visit_prediction(static_cast<double>(n), delta);
  return rep;
}

inline ComparisonReport compare_to_poisson(const VisitHistogram& hist, double mu, std::uint32_t t_range,
                                           double delta = 0.5) {
  std::vector<double> law(hist.N.size());
  for (std::size_t t = 0; t < law.size(); ++t) law[t] = hist.fraction(t);
  return compare_to_poisson(law, hist.n, hist.max_load(), mu, t_range, delta);
}

/// Per-t mean and standard error of N_t / counted over independent trials.
/// Trials are folded in the order given, so feed them by trial index.
class HistogramEnsemble {
 public:
  void add(const VisitHistogram& h) {
    const std::size_t size = std::max(sum_.size(), h.N.size());
    sum_.resize(size, 0.0);
    sum_sq_.resize(size, 0.0);
    for (std::size_t t = 0; t < size; ++t) {
      const double f = h.fraction(t);
      sum_[t] += f;
      sum_sq_[t] += f * f;
    }
    pooled_ += h;
    max_load_ = std::max(max_load_, h.max_load());
    ++trials_;
  }

  /// Largest load seen in any trial.
  std::uint64_t max_load() const noexcept { return max_load_; }

  std::uint64_t trials() const noexcept { return trials_; }
  const VisitHistogram& pooled() const noexcept { return pooled_; }

  double mean(std::size_t t) const noexcept {
    return trials_ == 0 || t >= sum_.size() ? 0.0 : sum_[t] / static_cast<double>(trials_);
  }

  double stderr_of_mean(std::size_t t) const noexcept {
    if (trials_ < 2 || t >= sum_.size()) return 0.0;
    const auto k = static_cast<double>(trials_);
    const double mu = sum_[t] / k;
    const double var = std::max(0.0, (sum_sq_[t] - k * mu * mu) / (k - 1));
    return std::sqrt(var / k);
  }

  /// Mean law (mean(0), mean(1), ...).
  std::vector<double> mean_law() const {
    std::vector<double> out(sum_.size());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = mean(t);
    return out;
  }

 private:
  std::vector<double> sum_, sum_sq_;
  VisitHistogram pooled_;
  std::uint64_t max_load_ = 0;
  std::uint64_t trials_ = 0;
};

}  // namespace nbrw
