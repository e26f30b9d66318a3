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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "phylocsp/coupling.hpp"
#include "phylocsp/error.hpp"
#include "phylocsp/tree.hpp"

namespace phylocsp {
namespace {

// Counts base-M digits of v equal to j.
int digits_equal(std::uint64_t v, int M, int dprime, int j) {
  int c = 0;
  for (int i = 0; i < dprime; ++i, v /= M) c += static_cast<int>(v % M) == j;
  return c;
}

TEST(Lmn, PointMassAtDepthOne) {
  auto p = lmn_pmf(4, 1, 2);
  ASSERT_EQ(p.size(), 4u);
  EXPECT_EQ(p[2], 1.0);
  EXPECT_EQ(p[0] + p[1] + p[3], 0.0);
}

TEST(Lmn, FormulaAndNormalization) {
  for (int M : {2, 3, 4}) {
    for (int dp = 1; dp <= 4; ++dp) {
      for (int j = 0; j < M; ++j) {
        auto p = lmn_pmf(M, dp, j);
        const double N = static_cast<double>(p.size());
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
        for (std::size_t v = 0; v < p.size(); ++v) {
          ASSERT_NEAR(p[v], M / N * digits_equal(v, M, dp, j) / dp, 1e-15);
        }
      }
    }
  }
  EXPECT_THROW(lmn_pmf(4, 11, 0), ResourceError);
}

TEST(Coupling, Examples) {
  std::vector<double> p{0.25, 0.25, 0.5};
  auto same = optimal_coupling(p, p);
  double off = 0.0;
  for (const auto& e : same) off += e.x != e.y ? e.mass : 0.0;
  EXPECT_EQ(off, 0.0);
  std::vector<double> a{1.0, 0.0}, b{0.5, 0.5};
  auto j = optimal_coupling(a, b);
  off = 0.0;
  for (const auto& e : j) off += e.x != e.y ? e.mass : 0.0;
  EXPECT_NEAR(off, 0.5, 1e-15);
  std::vector<double> bad{0.5, 0.4};
  EXPECT_THROW(optimal_coupling(bad, b), ArgumentError);
}

TEST(Coupling, LmnAgainstUniform) {
  for (int j = 0; j < 4; ++j) {
    auto p = lmn_pmf(4, 2, j);
    std::vector<double> u(p.size(), 1.0 / p.size());
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::fabs(p[i] - u[i]) / 2;
    EXPECT_NEAR(total_variation(p, u), tv, 1e-15);
    auto joint = optimal_coupling(p, u);
    double off = 0.0, diag = 0.0;
    for (const auto& e : joint) {
      if (e.x != e.y) {
        off += e.mass;
      } else {
        diag += e.mass;
        EXPECT_NEAR(e.mass, std::min(p[e.x], u[e.x]), 1e-15);
      }
    }
    EXPECT_NEAR(off, tv, 1e-12);
    auto m1 = first_marginal(joint, p.size()), m2 = second_marginal(joint, p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      EXPECT_NEAR(m1[i], p[i], 1e-15);
      EXPECT_NEAR(m2[i], u[i], 1e-15);
    }
  }
}

TEST(CoupledMap, ExactUniformMarginals) {
  for (double eta : {0.0, 0.1}) {
    CoupledMap L(4, 3, eta);
    EXPECT_EQ(L.N(), 64u);
    for (int j = 0; j < 4; ++j) {
      for (double x : L.marginal(j)) EXPECT_NEAR(x, 1.0 / 64, 1e-12);
    }
  }
}

TEST(CoupledMap, PointMassAtDepthOne) {
  CoupledMap L(4, 1);
  std::mt19937_64 rng(1);
  std::vector<std::uint64_t> s, c;
  for (int r = 0; r < 100; ++r) {
    L.sample(rng, s, c);
    for (int u = 0; u < 4; ++u) {
      EXPECT_EQ(s[u], static_cast<std::uint64_t>(u));
      EXPECT_EQ(s[u] == c[u], c[u] == static_cast<std::uint64_t>(u));
    }
  }
  EXPECT_DOUBLE_EQ(L.max_tv(), 0.75);
}

TEST(CoupledMap, DisagreementRateIsTv) {
  CoupledMap L(4, 2);
  std::mt19937_64 rng(2);
  std::vector<std::uint64_t> s, c;
  const int n = 200000;
  std::vector<int> differ(4, 0);
  for (int r = 0; r < n; ++r) {
    L.sample(rng, s, c);
    for (int u = 0; u < 4; ++u) differ[u] += s[u] != c[u];
  }
  for (int u = 0; u < 4; ++u) {
    double p = L.tv(u), se = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(static_cast<double>(differ[u]) / n, p, 4 * se + 1e-12);
  }
}

TEST(Cousins, IndexMatchesTree) {
  Tree t = build_perfect(2, 3);
  for (std::uint64_t a = 0; a < 8; ++a) {
    for (std::uint64_t b = 0; b < 8; ++b) {
      std::vector<std::uint64_t> ab{a, b};
      bool expect = false;
      if (a != b) {
        NodeId u = t.lca(t.leaves()[a], t.leaves()[b]);
        expect = t.child_index_toward(u, t.leaves()[a]) == 0 &&
                 t.child_index_toward(u, t.leaves()[b]) == 1;
      }
      EXPECT_EQ(cousins_index(ab, 2, 3), expect);
    }
  }
  EXPECT_EQ(cousin_tuples(2, 3).size(), 4u * 1 + 2u * 4 + 1u * 16);
}

TEST(Experiment, SmallDepthReportsRates) {
  CouplingExperiment e = coupling_experiment(4, 3, 2, 100000, 5);
  EXPECT_EQ(e.N, 64u);
  EXPECT_LE(e.marginal_error, 1e-12);
  EXPECT_TRUE(e.chi2_pass);
  EXPECT_GE(e.coupled_min_rate, e.bound);
  EXPECT_TRUE(e.preservation_pass);
  EXPECT_EQ(e.shortcut_rate, 1.0);
  EXPECT_THROW(coupling_experiment(6, 2, 4, 10, 1), ArgumentError);
}

}  // namespace
}  // namespace phylocsp
