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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nbrw/stats.hpp"

namespace nbrw {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an nbrw::Error";
  return ErrorCode::InvalidArgument;
}

TEST(Histogram, LengthOneWalk) {
  auto g = named_graph("petersen");
  auto c = nbrw_sample(g, {1, 0, WalkKind::Nbrw, 4, false});
  auto h = visit_histogram(c, g);
  EXPECT_EQ(h.at(1), 1u);
  EXPECT_EQ(h.at(0), 9u);
  EXPECT_EQ(h.max_load(), 1u);
  EXPECT_EQ(h.counted_vertices, 10u);
  EXPECT_EQ(h.counted_visits, 1u);
}

TEST(Histogram, Conservation) {
  auto g = random_regular({500, 3, std::nullopt, 6, 1});
  for (std::uint64_t m : {1u, 100u, 500u, 5000u}) {
    auto c = nbrw_sample(g, {m, 3, WalkKind::Nbrw, m, false});
    auto h = visit_histogram(c, g);
    std::uint64_t vertices = 0, visits = 0;
    for (std::size_t t = 0; t < h.N.size(); ++t) vertices += h.N[t], visits += t * h.N[t];
    EXPECT_EQ(vertices, g.n());
    EXPECT_EQ(visits, m);
    EXPECT_EQ(h.max_load(), c.max_count());
  }
}

TEST(Histogram, ExcludedRadius) {
  auto g = named_graph("petersen");
  auto c = nbrw_sample(g, {40, 0, WalkKind::Nbrw, 2, false});
  auto h = visit_histogram(c, g, 2);
  // distance >= 2 from vertex 0 leaves 10 - 1 - 3 = 6 vertices
  EXPECT_EQ(h.counted_vertices, 6u);
  EXPECT_EQ(h.excluded_radius, 2u);
  std::uint64_t visits = 0;
  const auto dist = bfs_distances(g, 0);
  for (Vertex v = 0; v < g.n(); ++v)
    if (dist[v] >= 2) visits += c.counts[v];
  EXPECT_EQ(h.counted_visits, visits);
}

TEST(Histogram, PoolingAddsEntrywise) {
  std::vector<std::uint32_t> a{0, 1, 1, 3}, b{2, 2, 0};
  auto h = histogram_of_loads(a, 5);
  h += histogram_of_loads(b, 4);
  EXPECT_EQ(h.N, (std::vector<std::uint64_t>{2, 2, 2, 1}));
  EXPECT_EQ(h.n, 7u);
  EXPECT_EQ(h.m, 9u);
  EXPECT_EQ(h.counted_visits, 9u);
}

TEST(Histogram, DimensionMismatch) {
  auto g = named_graph("k4");
  VisitCounts c;
  c.counts.assign(5, 0);
  EXPECT_EQ(code_of([&] { visit_histogram(c, g); }), ErrorCode::DimensionMismatch);
}

TEST(ExpectedFraction, InverseETFactorial) {
  for (std::uint64_t t = 0; t <= 8; ++t)
    EXPECT_NEAR(expected_fraction(t), 1.0 / (std::numbers::e * std::tgamma(t + 1.0)), 1e-16);
}

TEST(Threshold, Values) {
  const double n = std::exp(100.0);
  EXPECT_NEAR(threshold_F(n, 1.0), 28.9158226167923, 1e-11);
  EXPECT_NEAR(threshold_F(1e5, 0.5), 5.57309487378, 1e-10);
  EXPECT_NEAR(threshold_F(1e5, 1.5), 7.29586319225, 1e-10);
  EXPECT_NEAR(threshold_F(1e5, 1.0), 6.43447903301335, 1e-12);
  EXPECT_EQ(code_of([] { threshold_F(15.0, 1.0); }), ErrorCode::DomainTooSmall);
  EXPECT_NO_THROW(threshold_F(16.0, 1.0));
}

TEST(Threshold, Prediction) {
  auto p = max_visit_prediction(1e5);
  EXPECT_DOUBLE_EQ(p.center, threshold_F(1e5, 1.0));
  EXPECT_DOUBLE_EQ(p.window, p.hi - p.lo);
  EXPECT_NEAR(p.window, 7.29586319225 - 5.57309487378, 1e-10);
  EXPECT_EQ(code_of([] { max_visit_prediction(1e5, -1); }), ErrorCode::InvalidArgument);
}

TEST(BallsAndBins, Conservation) {
  auto h = balls_and_bins(1000, 1000, 3);
  EXPECT_EQ(h.counted_vertices, 1000u);
  EXPECT_EQ(h.counted_visits, 1000u);
  auto h2 = balls_and_bins(1000, 1000, 3);
  EXPECT_EQ(h.N, h2.N);
  EXPECT_EQ(code_of([] { balls_and_bins(5, 0, 1); }), ErrorCode::InvalidArgument);
}

TEST(BallsAndBins, EmptyBinFractionNearInverseE) {
  auto h = balls_and_bins(200000, 200000, 11);
  EXPECT_NEAR(h.fraction(0), std::exp(-1.0), 0.005);
  EXPECT_NEAR(h.fraction(1), std::exp(-1.0), 0.005);
}

TEST(TotalVariation, Basics) {
  std::vector<double> a{0.5, 0.5}, b{0.25, 0.25, 0.5};
  EXPECT_DOUBLE_EQ(tv_distance(a, b), 0.5);
  EXPECT_EQ(tv_distance(a, a), 0.0);
  std::vector<double> po(60);
  for (std::size_t t = 0; t < po.size(); ++t) po[t] = poisson_pmf(2.0, t);
  EXPECT_LT(tv_to_poisson(po, 2.0), 1e-14);
  std::vector<double> point{1.0};
  EXPECT_NEAR(tv_to_poisson(point, 1.0), 1.0 - std::exp(-1.0), 1e-14);
}

TEST(Comparison, Report) {
  std::vector<std::uint32_t> loads{0, 0, 1, 1, 2, 3};
  auto h = histogram_of_loads(loads, 7);
  auto rep = compare_to_poisson(h, 1.0, 4);
  ASSERT_EQ(rep.deviations.size(), 5u);
  EXPECT_NEAR(rep.fractions[0], 1.0 / 3, 1e-15);
  EXPECT_NEAR(rep.deviations[0], (1.0 / 3) * std::numbers::e - 1, 1e-14);
  EXPECT_NEAR(rep.deviations[4], -1.0, 0);
  EXPECT_EQ(rep.max_visit_observed, 3u);
  EXPECT_FALSE(rep.max_visit_predicted.has_value());  // n = 6 is below e^e
  EXPECT_EQ(code_of([&] { compare_to_poisson(h, 1.0, 0); }), ErrorCode::InvalidArgument);
}

TEST(Ensemble, MeansAndErrors) {
  HistogramEnsemble ens;
  std::vector<std::uint32_t> a{0, 1, 1, 2}, b{0, 0, 2, 2};
  ens.add(histogram_of_loads(a, 4));
  ens.add(histogram_of_loads(b, 4));
  EXPECT_EQ(ens.trials(), 2u);
  EXPECT_DOUBLE_EQ(ens.mean(0), (0.25 + 0.5) / 2);
  EXPECT_DOUBLE_EQ(ens.mean(1), 0.25);
  EXPECT_DOUBLE_EQ(ens.stderr_of_mean(1), 0.25);  // values 0.5, 0
  EXPECT_EQ(ens.pooled().counted_visits, 8u);
  EXPECT_EQ(ens.max_load(), 2u);
  EXPECT_EQ(ens.mean(9), 0.0);
  const auto law = ens.mean_law();
  EXPECT_NEAR(law[0] + law[1] + law[2], 1.0, 1e-15);
}

}  // namespace
}  // namespace nbrw
