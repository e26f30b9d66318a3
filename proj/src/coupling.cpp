// Copyright 2026 The phylocsp Authors
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

#include "phylocsp/coupling.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>

#include "phylocsp/error.hpp"

namespace phylocsp {

namespace {

constexpr double kMassTolerance = 1e-9;

std::uint64_t ipow(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

std::uint64_t checked_leaves(int M, int dprime) {
  if (M < 2) throw ArgumentError("M must be >= 2");
  if (dprime < 1) throw ArgumentError("dprime must be >= 1");
  double n = std::pow(static_cast<double>(M), dprime);
  if (n > static_cast<double>(kShortcutLeafCap)) {
    throw ResourceError("N = M^dprime exceeds the cap of " + std::to_string(kShortcutLeafCap));
  }
  return ipow(M, dprime);
}

void check_distribution(std::span<const double> p, const char* what) {
  double s = 0.0;
  for (double x : p) {
    if (!(x >= 0.0)) throw ArgumentError(std::string(what) + " has a negative or NaN entry");
    s += x;
  }
  if (std::fabs(s - 1.0) > kMassTolerance) {
    throw ArgumentError(std::string(what) + " does not sum to 1");
  }
}

}  // namespace

std::vector<double> lmn_pmf(int M, int dprime, int j) {
  const std::uint64_t N = checked_leaves(M, dprime);
  if (j < 0 || j >= M) throw ArgumentError("source index outside [0, M)");
  std::vector<double> p(N);
  const double scale = static_cast<double>(M) / static_cast<double>(N) / dprime;
  for (std::uint64_t v = 0; v < N; ++v) {
    int b = 0;
    for (std::uint64_t x = v, i = 0; i < static_cast<std::uint64_t>(dprime); ++i, x /= M) {
      b += static_cast<int>(x % M) == j;
    }
    p[v] = scale * b;
  }
  return p;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ArgumentError("distributions differ in support size");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return s / 2.0;
}

std::vector<JointEntry> optimal_coupling(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ArgumentError("distributions differ in support size");
  check_distribution(p, "first distribution");
  check_distribution(q, "second distribution");
  const std::size_t n = p.size();
  std::vector<JointEntry> out;
  std::vector<double> rp(n), rq(n);
  for (std::size_t i = 0; i < n; ++i) {
    double m = std::min(p[i], q[i]);
    if (m > 0.0) out.push_back({i, i, m});
    rp[i] = p[i] - m;
    rq[i] = q[i] - m;
  }
  std::size_t i = 0, j = 0;
  while (i < n && j < n) {
    if (rp[i] <= 0.0) {
      ++i;
      continue;
    }
    if (rq[j] <= 0.0) {
      ++j;
      continue;
    }
    double m = std::min(rp[i], rq[j]);
    out.push_back({i, j, m});
    rp[i] -= m;
    rq[j] -= m;
  }
  std::sort(out.begin(), out.end(), [](const JointEntry& a, const JointEntry& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  return out;
}

std::vector<double> first_marginal(std::span<const JointEntry> joint, std::size_t n) {
  std::vector<double> m(n, 0.0);
  for (const auto& e : joint) m.at(e.x) += e.mass;
  return m;
}

std::vector<double> second_marginal(std::span<const JointEntry> joint, std::size_t n) {
  std::vector<double> m(n, 0.0);
  for (const auto& e : joint) m.at(e.y) += e.mass;
  return m;
}

CoupledMap::CoupledMap(int M, int dprime, double eta)
    : M_(M), dprime_(dprime), N_(checked_leaves(M, dprime)), eta_(eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ArgumentError("eta must lie in [0, 1]");
  const std::vector<double> uniform(N_, 1.0 / static_cast<double>(N_));
  for (int j = 0; j < M; ++j) {
    std::vector<double> p = lmn_pmf(M, dprime, j);
    tv_.push_back(total_variation(p, uniform));
    joint_.push_back(optimal_coupling(p, uniform));
    std::vector<std::vector<std::pair<std::uint64_t, double>>> rows(N_);
    for (const auto& e : joint_.back()) rows[e.x].emplace_back(e.y, e.mass);
    for (std::uint64_t x = 0; x < N_; ++x) {
      double acc = 0.0;
      for (auto& [y, mass] : rows[x]) {
        acc += mass / p[x];
        mass = acc;
      }
      if (!rows[x].empty()) rows[x].back().second = 1.0;
    }
    rows_.push_back(std::move(rows));
  }
}

double CoupledMap::max_tv() const { return *std::max_element(tv_.begin(), tv_.end()); }

std::vector<double> CoupledMap::marginal(int j) const {
  std::vector<double> m = second_marginal(joint_.at(j), N_);
  for (double& x : m) x = (1.0 - eta_) * x + eta_ / static_cast<double>(N_);
  return m;
}

void CoupledMap::sample(std::mt19937_64& rng, std::vector<std::uint64_t>& shortcut,
                        std::vector<std::uint64_t>& coupled) const {
  std::uniform_int_distribution<int> level(0, dprime_ - 1);
  std::uniform_int_distribution<int> digit(0, M_ - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int t = level(rng);
  std::uint64_t prefix = 0;
  for (int i = 0; i < t; ++i) prefix = prefix * M_ + digit(rng);
  shortcut.assign(M_, 0);
  coupled.assign(M_, 0);
  for (int u = 0; u < M_; ++u) {
    std::uint64_t x = prefix * M_ + u;
    for (int i = t + 1; i < dprime_; ++i) x = x * M_ + digit(rng);
    shortcut[u] = x;
    const auto& row = rows_[u][x];
    const double r = unit(rng);
    auto it = std::find_if(row.begin(), row.end(), [&](const auto& e) { return r < e.second; });
    coupled[u] = it == row.end() ? row.back().first : it->first;
  }
  if (eta_ > 0.0 && unit(rng) < eta_) {
    std::uniform_int_distribution<std::uint64_t> leaf(0, N_ - 1);
    for (auto& y : coupled) y = leaf(rng);
  }
}

bool cousins_index(std::span<const std::uint64_t> leaves, int k, int depth) {
  if (k < 2 || depth < 1) throw ArgumentError("cousins_index needs k >= 2 and depth >= 1");
  if (leaves.size() < 2) throw ArgumentError("cousins_index needs at least two leaves");
  const std::uint64_t n = ipow(k, depth);
  for (auto l : leaves) {
    if (l >= n) throw ArgumentError("leaf index out of range");
  }
  auto digit = [&](std::uint64_t x, int level) {
    return static_cast<std::size_t>((x / ipow(k, depth - level - 1)) % k);
  };
  int level = 0;
  while (level < depth && std::all_of(leaves.begin(), leaves.end(), [&](std::uint64_t l) {
           return digit(l, level) == digit(leaves[0], level);
         })) {
    ++level;
  }
  if (level == depth) return false;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (digit(leaves[i], level) != i) return false;
  }
  return true;
}

std::vector<std::vector<std::uint64_t>> cousin_tuples(int k, int depth) {
  if (k < 2 || depth < 1) throw ArgumentError("cousin_tuples needs k >= 2 and depth >= 1");
  double count = 0.0;
  for (int i = 0; i < depth; ++i) count += std::pow(k, i) * std::pow(std::pow(k, depth - i - 1), k);
  if (count > 1e6) throw ResourceError("too many cousin tuples");
  std::vector<std::vector<std::uint64_t>> out;
  for (int i = 0; i < depth; ++i) {
    const std::uint64_t sub = ipow(k, depth - i - 1);
    for (std::uint64_t node = 0; node < ipow(k, i); ++node) {
      std::vector<std::uint64_t> suffix(k, 0);
      while (true) {
        std::vector<std::uint64_t> t(k);
        for (int j = 0; j < k; ++j) t[j] = (node * k + j) * sub + suffix[j];
        out.push_back(std::move(t));
        int j = k - 1;
        while (j >= 0 && ++suffix[j] == sub) suffix[j--] = 0;
        if (j < 0) break;
      }
    }
  }
  return out;
}

CouplingExperiment coupling_experiment(int M, int dprime, int k, std::uint64_t trials,
                                       std::uint64_t seed, double eta) {
  if (k < 2) throw ArgumentError("k must be >= 2");
  if (trials < 1) throw ArgumentError("trials must be >= 1");
  int depth_m = 0;
  for (std::uint64_t x = 1; x < static_cast<std::uint64_t>(M); x *= k) ++depth_m;
  if (ipow(k, depth_m) != static_cast<std::uint64_t>(M)) {
    throw ArgumentError("M must be a power of k");
  }
  CoupledMap map(M, dprime, eta);
  CouplingExperiment out;
  out.M = M;
  out.dprime = dprime;
  out.k = k;
  out.N = map.N();
  out.trials = trials;
  const int depth_n = depth_m * dprime;
  for (int j = 0; j < M; ++j) {
    out.tv.push_back(map.tv(j));
    for (double x : map.marginal(j)) {
      out.marginal_error = std::max(out.marginal_error, std::fabs(x - 1.0 / static_cast<double>(out.N)));
    }
  }
  out.max_tv = map.max_tv();
  out.bound = 1.0 - k * out.max_tv;

  const auto tuples = cousin_tuples(k, depth_m);
  std::vector<std::uint64_t> kept(tuples.size(), 0), hist(static_cast<std::size_t>(M) * out.N, 0);
  std::uint64_t shortcut_kept = 0;
  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> x, y, buf(k);
  for (std::uint64_t t = 0; t < trials; ++t) {
    map.sample(rng, x, y);
    for (int u = 0; u < M; ++u) ++hist[u * out.N + y[u]];
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      for (int j = 0; j < k; ++j) buf[j] = x[tuples[i][j]];
      shortcut_kept += cousins_index(buf, k, depth_n);
      for (int j = 0; j < k; ++j) buf[j] = y[tuples[i][j]];
      kept[i] += cousins_index(buf, k, depth_n);
    }
  }
  const double n = static_cast<double>(trials);
  out.shortcut_rate = static_cast<double>(shortcut_kept) / (n * static_cast<double>(tuples.size()));
  out.coupled_min_rate = 1.0;
  for (auto c : kept) {
    out.tuple_rates.push_back(static_cast<double>(c) / n);
    out.coupled_min_rate = std::min(out.coupled_min_rate, out.tuple_rates.back());
  }
  out.preservation_pass = out.coupled_min_rate >= out.bound;
  boost::math::chi_squared_distribution<double> dist(static_cast<double>(out.N - 1));
  out.chi2_pass = true;
  const double expected = n / static_cast<double>(out.N);
  for (int u = 0; u < M; ++u) {
    double stat = 0.0;
    for (std::uint64_t v = 0; v < out.N; ++v) {
      double diff = static_cast<double>(hist[u * out.N + v]) - expected;
      stat += diff * diff / expected;
    }
    out.chi2.push_back(stat);
    out.chi2_p.push_back(boost::math::cdf(boost::math::complement(dist, stat)));
    out.chi2_pass = out.chi2_pass && out.chi2_p.back() >= kChi2Alpha;
  }
  return out;
}

}  // namespace phylocsp
