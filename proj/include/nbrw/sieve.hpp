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

// Multivariate Brun's sieve, numerically.
//
// For counting variables X_1..X_r the joint binomial moments
//
//   S(i_1..i_r) = E[ prod_j C(X_j, i_j) ]
//
// determine the point probabilities through the alternating partial sums
//
//   Lambda(k) = sum_{t=M}^{M+k} (-1)^{t-M} sum_{|i|=t} prod_j C(i_j, m_j) S(i)
//
// with M = m_1 + ... + m_r. Odd k bound Pr[X = m] from below, even k from
// above. When every moment is within a factor (1 +- eps) of the Poisson
// moments prod mu_j^{i_j} / i_j!, the point probabilities are within a
// factor (1 +- eps') of the Poisson product, eps' = 2 exp(2 sum mu) eps + sqrt(eps).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbrw/error.hpp"

namespace nbrw {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double log_factorial(std::uint64_t t) { return std::lgamma(static_cast<double>(t) + 1.0); }

/// log C(x, i) via log-gamma; -inf when i > x.
inline double log_binomial(std::uint64_t x, std::uint64_t i) {
  if (i > x) return -std::numeric_limits<double>::infinity();
  return log_factorial(x) - log_factorial(i) - log_factorial(x - i);
}

/// C(x, i) by the multiplicative recurrence; exact while the values fit in
/// 53 bits, a few ulps otherwise.
inline double binomial(std::uint64_t x, std::uint64_t i) {
  if (i > x) return 0.0;
  i = std::min(i, x - i);
  double c = 1.0;
  for (std::uint64_t j = 0; j < i; ++j) c = c * static_cast<double>(x - j) / static_cast<double>(j + 1);
  return c;
}

/// e^{-mu} mu^t / t!, evaluated in log space.
inline double poisson_pmf(double mu, std::uint64_t t) {
  if (!(mu >= 0.0)) fail(ErrorCode::NegativeMean, "Poisson mean must be non-negative, got " + std::to_string(mu));
  if (mu == 0.0) return t == 0 ? 1.0 : 0.0;
  return std::exp(-mu + static_cast<double>(t) * std::log(mu) - log_factorial(t));
}

struct PoissonParams {
  std::vector<double> mus;

  explicit PoissonParams(std::vector<double> means) : mus(std::move(means)) {
    if (mus.empty()) fail(ErrorCode::InvalidArgument, "need at least one mean");
    for (double mu : mus)
      if (!(mu > 0.0)) fail(ErrorCode::NegativeMean, "Poisson means must be positive, got " + std::to_string(mu));
  }

  std::size_t r() const noexcept { return mus.size(); }
  double max_mu() const { return *std::max_element(mus.begin(), mus.end()); }
  double sum_mu() const { return std::accumulate(mus.begin(), mus.end(), 0.0); }
};

/// prod_i Pr[Po(mu_i) = t_i].
inline double joint_poisson_pmf(const PoissonParams& params, std::span<const std::uint64_t> ts) {
  if (ts.size() != params.r())
    fail(ErrorCode::DimensionMismatch, "tuple of size " + std::to_string(ts.size()) + " for r = " +
                                           std::to_string(params.r()));
  double log_p = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    log_p += -params.mus[i] + static_cast<double>(ts[i]) * std::log(params.mus[i]) - log_factorial(ts[i]);
  return std::exp(log_p);
}

inline double joint_poisson_pmf(const PoissonParams& params, std::initializer_list<std::uint64_t> ts) {
  return joint_poisson_pmf(params, std::span<const std::uint64_t>(ts.begin(), ts.size()));
}

/// Explicit joint pmf on the grid prod_j {0..extent_j - 1}, row-major.
struct JointPmf {
  std::vector<std::uint32_t> extents;
  std::vector<double> probs;

  std::size_t r() const noexcept { return extents.size(); }

  std::size_t flat(std::span<const std::uint64_t> x) const {
    std::size_t idx = 0;
    for (std::size_t j = 0; j < extents.size(); ++j) idx = idx * extents[j] + x[j];
    return idx;
  }

  /// Pr[X = x]; zero outside the grid.
  double at(std::span<const std::uint64_t> x) const {
    if (x.size() != r()) fail(ErrorCode::DimensionMismatch, "tuple size does not match pmf dimension");
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j] >= extents[j]) return 0.0;
    return probs[flat(x)];
  }
};

/// Calls fn(tuple) for every tuple in prod_j [lo_j, hi_j], lexicographically.
inline void for_each_in_box(std::span<const std::uint64_t> lo, std::span<const std::uint64_t> hi,
                            const std::function<void(std::span<const std::uint64_t>)>& fn) {
  const std::size_t r = lo.size();
  for (std::size_t j = 0; j < r; ++j)
    if (lo[j] > hi[j]) return;
  std::vector<std::uint64_t> x(lo.begin(), lo.end());
  for (;;) {
    fn(x);
    std::size_t j = r;
    for (;;) {
      if (j == 0) return;
      --j;
      if (x[j] < hi[j]) {
        ++x[j];
        for (std::size_t q = j + 1; q < r; ++q) x[q] = lo[q];
        break;
      }
    }
  }
}

/// Default ceiling on the per-coordinate index of a moment table.
inline constexpr std::uint32_t kMaxTableIndex = 64;

/// S(i_1..i_r) for 0 <= i_j <= tmax, dense row-major.
class FactorialMomentTable {
 public:
  FactorialMomentTable(std::uint32_t r, std::uint32_t tmax, bool allow_large = false) : r_(r), tmax_(tmax) {
    if (r == 0) fail(ErrorCode::InvalidArgument, "moment table needs r >= 1");
    if (tmax > kMaxTableIndex && !allow_large)
      fail(ErrorCode::OverflowRisk, "tmax " + std::to_string(tmax) + " above " + std::to_string(kMaxTableIndex) +
                                        " needs allow_large");
    std::size_t size = 1;
    for (std::uint32_t j = 0; j < r; ++j) {
      if (size > (std::size_t{1} << 28) / (tmax + 1)) fail(ErrorCode::OverflowRisk, "moment table too large");
      size *= tmax + 1;
    }
    values_.assign(size, 0.0);
  }

  std::uint32_t r() const noexcept { return r_; }
  std::uint32_t tmax() const noexcept { return tmax_; }
  std::size_t size() const noexcept { return values_.size(); }

  bool contains(std::span<const std::uint64_t> idx) const noexcept {
    if (idx.size() != r_) return false;
    return std::all_of(idx.begin(), idx.end(), [&](std::uint64_t i) { return i <= tmax_; });
  }

  std::size_t flat(std::span<const std::uint64_t> idx) const {
    if (!contains(idx)) fail(ErrorCode::TableTooSmall, "index outside moment table");
    std::size_t f = 0;
    for (auto i : idx) f = f * (tmax_ + 1) + i;
    return f;
  }

  double at(std::span<const std::uint64_t> idx) const { return values_[flat(idx)]; }
  double at(std::initializer_list<std::uint64_t> idx) const {
    return at(std::span<const std::uint64_t>(idx.begin(), idx.size()));
  }
  void set(std::span<const std::uint64_t> idx, double value) { values_[flat(idx)] = value; }

  bool has_stderr() const noexcept { return !stderr_.empty(); }
  double stderr_at(std::span<const std::uint64_t> idx) const {
    return stderr_.empty() ? 0.0 : stderr_[flat(idx)];
  }
  void set_stderr(std::span<const std::uint64_t> idx, double value) {
    if (stderr_.empty()) stderr_.assign(values_.size(), 0.0);
    stderr_[flat(idx)] = value;
  }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> mutable_values() noexcept { return values_; }
  std::span<const double> stderrs() const noexcept { return stderr_; }
  std::span<double> mutable_stderrs() {
    if (stderr_.empty()) stderr_.assign(values_.size(), 0.0);
    return stderr_;
  }

  /// Row-major index tuple of flat position f.
  std::vector<std::uint64_t> unflatten(std::size_t f) const {
    std::vector<std::uint64_t> idx(r_);
    for (std::size_t j = r_; j-- > 0;) {
      idx[j] = f % (tmax_ + 1);
      f /= tmax_ + 1;
    }
    return idx;
  }

 private:
  std::uint32_t r_;
  std::uint32_t tmax_;
  std::vector<double> values_;
  std::vector<double> stderr_;
};

/// Exact S(i) of an explicit joint pmf.
inline FactorialMomentTable factorial_moments_exact(const JointPmf& pmf, std::uint32_t tmax) {
  std::size_t expected = 1;
  for (auto e : pmf.extents) expected *= e;
  if (pmf.extents.empty() || expected != pmf.probs.size())
    fail(ErrorCode::DimensionMismatch, "pmf grid does not match its probability vector");
  CompensatedSum mass;
  for (double p : pmf.probs) {
    if (!(p >= 0.0)) fail(ErrorCode::NotAPmf, "negative or NaN probability");
    mass.add(p);
  }
  if (std::abs(mass.value() - 1.0) > 1e-9)
    fail(ErrorCode::NotAPmf, "probabilities sum to " + std::to_string(mass.value()));

  const auto r = static_cast<std::uint32_t>(pmf.r());
  FactorialMomentTable table(r, tmax);
  // binom[j][x * (tmax+1) + i] = C(x, i)
  std::vector<std::vector<double>> binom(r);
  for (std::uint32_t j = 0; j < r; ++j) {
    binom[j].resize(static_cast<std::size_t>(pmf.extents[j]) * (tmax + 1));
    for (std::uint64_t x = 0; x < pmf.extents[j]; ++x)
      for (std::uint64_t i = 0; i <= tmax; ++i) binom[j][x * (tmax + 1) + i] = binomial(x, i);
  }
  std::vector<CompensatedSum> acc(table.size());
  std::vector<std::uint64_t> lo(r, 0), hi(r), ihi(r);
  for (std::uint32_t j = 0; j < r; ++j) hi[j] = pmf.extents[j] - 1;
  for_each_in_box(lo, hi, [&](std::span<const std::uint64_t> x) {
    const double p = pmf.probs[pmf.flat(x)];
    if (p == 0.0) return;
    for (std::uint32_t j = 0; j < r; ++j) ihi[j] = std::min<std::uint64_t>(x[j], tmax);
    for_each_in_box(lo, ihi, [&](std::span<const std::uint64_t> i) {
      double w = p;
      for (std::uint32_t j = 0; j < r; ++j) w *= binom[j][x[j] * (tmax + 1) + i[j]];
      acc[table.flat(i)].add(w);
    });
  });
  auto values = table.mutable_values();
  for (std::size_t f = 0; f < values.size(); ++f) values[f] = acc[f].value();
  return table;
}

/// Largest count accepted by factorial_moments_mc.
inline constexpr std::uint64_t kMaxMcCount = 1'000'000;

/// Sample mean of prod_j C(x_j, i_j) over an ensemble of count tuples, with
/// standard errors (sample standard deviation / sqrt(N)).
inline FactorialMomentTable factorial_moments_mc(std::span<const std::vector<std::uint64_t>> ensemble,
                                                 std::uint32_t tmax) {
  if (ensemble.empty()) fail(ErrorCode::EmptyEnsemble, "no observations");
  const auto r = static_cast<std::uint32_t>(ensemble.front().size());
  if (r == 0) fail(ErrorCode::DimensionMismatch, "empty tuples");
  FactorialMomentTable table(r, tmax);
  // Overflow guard in log space: every product must stay below DBL_MAX.
  const double log_cap = std::log(std::numeric_limits<double>::max()) - 1.0;
  std::vector<double> sum(table.size(), 0.0), sum_sq(table.size(), 0.0);
  std::vector<std::vector<double>> rows(r, std::vector<double>(tmax + 1));
  std::vector<std::uint64_t> lo(r, 0), hi(r);
  for (const auto& x : ensemble) {
    if (x.size() != r) fail(ErrorCode::DimensionMismatch, "ragged ensemble");
    double log_worst = 0.0;
    for (std::uint32_t j = 0; j < r; ++j) {
      if (x[j] > kMaxMcCount)
        fail(ErrorCode::OverflowRisk, "count " + std::to_string(x[j]) + " above " + std::to_string(kMaxMcCount));
      hi[j] = std::min<std::uint64_t>(x[j], tmax);
      double log_row_max = 0.0;
      for (std::uint64_t i = 0; i <= hi[j]; ++i) {
        rows[j][i] = binomial(x[j], i);
        log_row_max = std::max(log_row_max, log_binomial(x[j], i));
      }
      log_worst += log_row_max;
    }
    if (log_worst > log_cap) fail(ErrorCode::OverflowRisk, "binomial product would overflow");
    for_each_in_box(lo, hi, [&](std::span<const std::uint64_t> i) {
      double w = 1.0;
      for (std::uint32_t j = 0; j < r; ++j) w *= rows[j][i[j]];
      const std::size_t f = table.flat(i);
      sum[f] += w;
      sum_sq[f] += w * w;
    });
  }
  const auto count = static_cast<double>(ensemble.size());
  auto values = table.mutable_values();
  auto errs = table.mutable_stderrs();
  for (std::size_t f = 0; f < values.size(); ++f) {
    const double mean = sum[f] / count;
    values[f] = mean;
    const double var = count > 1 ? std::max(0.0, (sum_sq[f] - count * mean * mean) / (count - 1)) : 0.0;
    errs[f] = std::sqrt(var / count);
  }
  return table;
}

struct SieveBounds {
  std::vector<std::uint64_t> m;
  /// Lambda(0), ..., Lambda(kmax).
  std::vector<double> lambda;
  double lower = 0.0;
  double upper = 0.0;
  /// Largest per-coordinate table index consumed: max_j m_j + kmax.
  std::uint64_t table_depth_used = 0;
};

namespace detail {

// Lambda(0..kmax) with one compensated accumulator; terms are added by
// increasing t and, within a level, by lexicographic index tuple.
inline std::vector<double> lambda_sequence(const FactorialMomentTable& table, std::span<const std::uint64_t> m,
                                           std::uint64_t kmax) {
  const std::size_t r = table.r();
  if (m.size() != r)
    fail(ErrorCode::DimensionMismatch, "target of size " + std::to_string(m.size()) + " for r = " + std::to_string(r));
  const std::uint64_t deepest = *std::max_element(m.begin(), m.end()) + kmax;
  if (deepest > table.tmax())
    fail(ErrorCode::TableTooSmall, "Lambda(" + std::to_string(kmax) + ") needs index " + std::to_string(deepest) +
                                       " but table stops at " + std::to_string(table.tmax()));
  std::vector<double> coeff_m(r);
  CompensatedSum acc;
  std::vector<double> out;
  out.reserve(kmax + 1);
  std::vector<std::uint64_t> idx(r);
  // Distribute `excess` over coordinates q..r-1 in lexicographic order.
  std::function<void(std::size_t, std::uint64_t, double)> walk = [&](std::size_t q, std::uint64_t excess,
                                                                     double sign) {
    if (q + 1 == r) {
      idx[q] = m[q] + excess;
      double term = sign * table.at(idx);
      for (std::size_t j = 0; j < r; ++j) term *= binomial(idx[j], m[j]);
      acc.add(term);
      return;
    }
    for (std::uint64_t e = 0; e <= excess; ++e) {
      idx[q] = m[q] + e;
      walk(q + 1, excess - e, sign);
    }
  };
  for (std::uint64_t k = 0; k <= kmax; ++k) {
    walk(0, k, (k % 2 == 0) ? 1.0 : -1.0);
    out.push_back(acc.value());
  }
  return out;
}

}  // namespace detail

/// Lambda(k) for target m.
inline double bonferroni_lambda(const FactorialMomentTable& table, std::span<const std::uint64_t> m,
                                std::uint64_t k) {
  return detail::lambda_sequence(table, m, k).back();
}

inline double bonferroni_lambda(const FactorialMomentTable& table, std::initializer_list<std::uint64_t> m,
                                std::uint64_t k) {
  return bonferroni_lambda(table, std::span<const std::uint64_t>(m.begin(), m.size()), k);
}

/// Best sandwich from Lambda(0..kmax): lower = max over odd k, upper = min over even k.
inline SieveBounds bonferroni_bounds(const FactorialMomentTable& table, std::span<const std::uint64_t> m,
                                     std::uint64_t kmax) {
  if (kmax < 1) fail(ErrorCode::InvalidArgument, "kmax must be at least 1");
  SieveBounds out;
  out.m.assign(m.begin(), m.end());
  out.lambda = detail::lambda_sequence(table, m, kmax);
  out.lower = -std::numeric_limits<double>::infinity();
  out.upper = std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k <= kmax; ++k) {
    if (k % 2 == 1)
      out.lower = std::max(out.lower, out.lambda[k]);
    else
      out.upper = std::min(out.upper, out.lambda[k]);
  }
  out.table_depth_used = *std::max_element(m.begin(), m.end()) + kmax;
  return out;
}

inline SieveBounds bonferroni_bounds(const FactorialMomentTable& table, std::initializer_list<std::uint64_t> m,
                                     std::uint64_t kmax) {
  return bonferroni_bounds(table, std::span<const std::uint64_t>(m.begin(), m.size()), kmax);
}

/// eps' = 2 exp(2 sum mu_i) eps + sqrt(eps).
inline double brun_error(double epsilon, const PoissonParams& params) {
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    fail(ErrorCode::OutOfRange, "epsilon must lie in [0, 1), got " + std::to_string(epsilon));
  return 2.0 * std::exp(2.0 * params.sum_mu()) * epsilon + std::sqrt(epsilon);
}

/// Parameters of one application of the sieve.
struct BrunRegime {
  double epsilon = 0.0;
  std::uint64_t s = 0;
  std::uint64_t T = 0;
  PoissonParams mus;

  double epsilon_prime() const { return brun_error(epsilon, mus); }

  /// Moment indices that must be checked run over {0..r(T+2s)}.
  std::uint64_t required_depth() const { return mus.r() * (T + 2 * s); }

  /// Instantiation for a walk of length mu*n on an n-vertex graph of girth
  /// at least c log_{d-1} log n: T = s = floor(log n), epsilon = h = (log n)^{3 - c/2}.
  static BrunRegime high_girth(double n, double c, std::size_t r, double mu) {
    const auto T = static_cast<std::uint64_t>(std::floor(std::log(n)));
    return BrunRegime{regime_h(n, c), T, T, PoissonParams(std::vector<double>(r, mu))};
  }

  static double regime_h(double n, double c) { return std::pow(std::log(n), 3.0 - c / 2.0); }

  /// h' = 2 e^{2 r mu} h + sqrt(h).
  static double regime_h_prime(double n, double c, std::size_t r, double mu) {
    const double h = regime_h(n, c);
    return 2.0 * std::exp(2.0 * static_cast<double>(r) * mu) * h + std::sqrt(h);
  }
};

struct BrunCheck {
  bool s_above_mu = false;        // s > mu
  bool epsilon_above_tail = false;  // 2 mu^s / s! < eps
  bool epsilon_below_cap = false;   // eps < (2 r e^mu)^-2
  bool moments_within_epsilon = false;
  bool hypothesis_ok = false;
  double max_moment_deviation = 0.0;
  double epsilon_prime = 0.0;
  std::uint64_t required_depth = 0;
};

/// Checks the sieve's side conditions and the moment condition
/// |S(t) / prod mu_j^{t_j}/t_j! - 1| <= eps on the box {0..r(T+2s)}^r.
/// All inequalities are strict except the moment bound.
inline BrunCheck brun_hypothesis_check(const FactorialMomentTable& table, const BrunRegime& regime) {
  const std::size_t r = regime.mus.r();
  if (table.r() != r) fail(ErrorCode::DimensionMismatch, "table dimension differs from number of means");
  BrunCheck out;
  out.required_depth = regime.required_depth();
  if (out.required_depth > table.tmax())
    fail(ErrorCode::TableTooSmall, "check needs moments up to " + std::to_string(out.required_depth) +
                                       ", table stops at " + std::to_string(table.tmax()));
  const double mu = regime.mus.max_mu();
  const double eps = regime.epsilon;
  const double log_tail = std::log(2.0) + static_cast<double>(regime.s) * std::log(mu) - log_factorial(regime.s);
  out.s_above_mu = static_cast<double>(regime.s) > mu;
  out.epsilon_above_tail = eps > 0.0 && log_tail < std::log(eps);
  const double cap = 1.0 / std::pow(2.0 * static_cast<double>(r) * std::exp(mu), 2.0);
  out.epsilon_below_cap = eps < cap;

  std::vector<std::uint64_t> lo(r, 0), hi(r, out.required_depth);
  double worst = 0.0;
  for_each_in_box(lo, hi, [&](std::span<const std::uint64_t> t) {
    double log_ref = 0.0;
    for (std::size_t j = 0; j < r; ++j)
      log_ref += static_cast<double>(t[j]) * std::log(regime.mus.mus[j]) - log_factorial(t[j]);
    worst = std::max(worst, std::abs(table.at(t) / std::exp(log_ref) - 1.0));
  });
  out.max_moment_deviation = worst;
  out.moments_within_epsilon = worst <= eps;
  out.hypothesis_ok = out.s_above_mu && out.epsilon_above_tail && out.epsilon_below_cap && out.moments_within_epsilon;
  out.epsilon_prime = eps < 1.0 ? brun_error(std::max(eps, 0.0), regime.mus) : std::numeric_limits<double>::infinity();
  return out;
}

/// Exact table S(i) = prod_j mu_j^{i_j} / i_j! of independent Poisson variables.
inline FactorialMomentTable poisson_moment_table(const PoissonParams& params, std::uint32_t tmax) {
  FactorialMomentTable table(static_cast<std::uint32_t>(params.r()), tmax);
  auto values = table.mutable_values();
  for (std::size_t f = 0; f < values.size(); ++f) {
    const auto idx = table.unflatten(f);
    double log_v = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j)
      log_v += static_cast<double>(idx[j]) * std::log(params.mus[j]) - log_factorial(idx[j]);
    values[f] = std::exp(log_v);
  }
  return table;
}

}  // namespace nbrw
