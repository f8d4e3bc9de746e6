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

#include <algorithm>

#include "nbrw/io.hpp"

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

TEST(Io, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3, 1e-300, 2.0, 0.70710678118654757, 123456789.125})
    EXPECT_EQ(std::strtod(io::format_double(x).c_str(), nullptr), x);
  EXPECT_EQ(io::format_double(0.5), "0.5");
  EXPECT_EQ(io::format_double(0.1), "0.1");
}

TEST(Io, MixingReportJson) {
  MixingReport rep;
  rep.rho = 0.5;
  rep.tau = 7;
  rep.dev = {0.9, 0.1};
  auto j = io::to_json(rep);
  EXPECT_EQ(j.size(), 3u);
  EXPECT_EQ(j["tau"], 7);
  auto back = io::mixing_report_from_json(j);
  EXPECT_EQ(back.rho, 0.5);
  EXPECT_EQ(back.tau, std::optional<std::uint32_t>(7));
  EXPECT_EQ(back.dev, rep.dev);
  rep.tau.reset();
  EXPECT_TRUE(io::to_json(rep)["tau"].is_null());
  EXPECT_FALSE(io::mixing_report_from_json(io::to_json(rep)).tau.has_value());
}

TEST(Io, Csv) {
  MixingReport rep;
  rep.dev = {0.75, 0.25};
  EXPECT_EQ(io::dev_csv(rep), "k,dev\n0,0.75\n1,0.25\n");
  VisitCounts c;
  c.counts = {2, 0, 1};
  EXPECT_EQ(io::counts_csv(c), "vertex,count\n0,2\n1,0\n2,1\n");
  std::vector<std::uint32_t> loads{0, 1, 1, 2};
  auto h = histogram_of_loads(loads, 4);
  const auto csv = io::histogram_csv(h, 1.0, 3);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,count,fraction,poisson_reference");
  EXPECT_NE(csv.find("\n1,2,0.5,0.36787944117144"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST(Io, MomentTableRoundTrip) {
  std::vector<std::vector<std::uint64_t>> ens{{0, 1}, {2, 1}, {1, 3}};
  auto t = factorial_moments_mc(ens, 3);
  auto back = io::moment_table_from_json(io::to_json(t));
  EXPECT_EQ(back.r(), 2u);
  EXPECT_EQ(back.tmax(), 3u);
  for (std::size_t f = 0; f < t.size(); ++f) {
    EXPECT_EQ(back.values()[f], t.values()[f]);
    EXPECT_EQ(back.stderrs()[f], t.stderrs()[f]);
  }
}

TEST(Io, MissingEntriesShrinkTable) {
  auto t = poisson_moment_table(PoissonParams({1.0}), 6);
  auto j = io::to_json(t);
  j["entries"].erase(4);  // drop S(4)
  auto cut = io::moment_table_from_json(j);
  EXPECT_EQ(cut.tmax(), 3u);
  EXPECT_EQ(code_of([&] { bonferroni_bounds(cut, {0}, 4); }), ErrorCode::TableTooSmall);
  EXPECT_NO_THROW(bonferroni_bounds(cut, {0}, 3));
  j["entries"].erase(0);
  EXPECT_EQ(code_of([&] { io::moment_table_from_json(j); }), ErrorCode::TableTooSmall);
}

TEST(Io, MalformedTable) {
  EXPECT_EQ(code_of([] { io::moment_table_from_json(io::json{{"r", 1}}); }), ErrorCode::ParseError);
  io::json bad{{"r", 1}, {"tmax", 1}, {"entries", {{{"idx", {5}}, {"value", 1.0}}}}};
  EXPECT_EQ(code_of([&] { io::moment_table_from_json(bad); }), ErrorCode::ParseError);
}

TEST(Io, BoundsAndCheckJson) {
  SieveBounds b;
  b.m = {0};
  b.lambda = {1.0, 0.5};
  b.lower = 0.5;
  b.upper = 1.0;
  auto j = io::to_json(b);
  EXPECT_EQ(j["lower"], 0.5);
  EXPECT_EQ(j["lambda"].size(), 2u);
  BrunCheck c;
  c.hypothesis_ok = true;
  EXPECT_TRUE(io::to_json(c)["hypothesis_ok"].get<bool>());
}

}  // namespace
}  // namespace nbrw
