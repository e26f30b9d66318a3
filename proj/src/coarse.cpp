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

#include "phylocsp/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "phylocsp/error.hpp"

namespace phylocsp {

namespace {

constexpr double kTol = 1e-12;

std::mt19937_64 order_rng(std::uint64_t seed, std::uint64_t t) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
  return std::mt19937_64(seq);
}

int class_cap(double eps, int m) {
  return static_cast<int>(std::floor(eps * m + 1e-9));
}

void check_permutation(std::span<const int> pi, std::size_t n) {
  if (pi.size() != n) {
    throw ArgumentError("ordering has " + std::to_string(pi.size()) + " entries for " +
                        std::to_string(n) + " variables");
  }
  std::vector<char> seen(n, 0);
  for (int v : pi) {
    if (v < 0 || static_cast<std::size_t>(v) >= n || seen[v]) {
      throw ArgumentError("ordering is not a permutation of the variables");
    }
    seen[v] = 1;
  }
}

void check_coarse(const CoarseSolution& xi) {
  if (xi.color.size() != xi.small_tree.num_nodes()) {
    throw ArgumentError("coarse solution needs one color entry per small-tree node");
  }
  for (NodeId l : xi.leaf_of) {
    if (l >= xi.small_tree.num_nodes() || !xi.small_tree.is_leaf(l)) {
      throw ArgumentError("coarse solution maps a variable to a non-leaf");
    }
    if (xi.color[l] < 0) throw ArgumentError("coarse solution leaf without a color");
  }
}

// Symmetric matrix prefix sums for block weights between position runs.
class BlockSums {
 public:
  explicit BlockSums(const std::vector<std::vector<double>>& w) : n_(w.size()) {
    s_.assign((n_ + 1) * (n_ + 1), 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        at(i + 1, j + 1) = w[i][j] + at(i, j + 1) + at(i + 1, j) - at(i, j);
      }
    }
  }
  double cross(std::size_t a1, std::size_t a2, std::size_t b1, std::size_t b2) const {
    return get(a2, b2) - get(a1, b2) - get(a2, b1) + get(a1, b1);
  }
  double within(std::size_t a, std::size_t b) const { return cross(a, b, a, b) / 2.0; }

 private:
  double& at(std::size_t i, std::size_t j) { return s_[i * (n_ + 1) + j]; }
  double get(std::size_t i, std::size_t j) const { return s_[i * (n_ + 1) + j]; }
  std::size_t n_;
  std::vector<double> s_;
};

struct Best {
  double value = -1.0;
  std::vector<int> chi;
};

void exact_search(const BlockSums& bs, int m, int q, int cap, Best& best) {
  for (int g = 1; g <= std::min(q, m); ++g) {
    if (static_cast<long long>(g) * cap < m) continue;
    std::vector<int> cuts(g + 1);
    cuts[0] = 0;
    cuts[g] = m;
    std::function<void(int)> place = [&](int i) {
      if (i == g) {
        std::vector<double> within(g);
        std::vector<std::vector<double>> cross(g, std::vector<double>(g, 0.0));
        for (int a = 0; a < g; ++a) {
          within[a] = bs.within(cuts[a], cuts[a + 1]);
          for (int b = 0; b < a; ++b) cross[b][a] = bs.cross(cuts[b], cuts[b + 1], cuts[a], cuts[a + 1]);
        }
        std::vector<int> col(g), size(g, 0);
        std::function<void(int, int, double)> assign = [&](int a, int used, double acc) {
          if (a == g) {
            if (acc > best.value + kTol) {
              best.value = acc;
              best.chi.assign(m, 0);
              for (int x = 0; x < g; ++x) {
                std::fill(best.chi.begin() + cuts[x], best.chi.begin() + cuts[x + 1], col[x]);
              }
            }
            return;
          }
          const int len = cuts[a + 1] - cuts[a];
          for (int c = 0; c <= std::min(used, g - 1); ++c) {
            if (size[c] + len > cap) continue;
            double add = within[a];
            for (int b = 0; b < a; ++b) {
              if (col[b] == c) add += cross[b][a];
            }
            col[a] = c;
            size[c] += len;
            assign(a + 1, std::max(used, c + 1), acc + add);
            size[c] -= len;
          }
        };
        assign(0, 0, 0.0);
        return;
      }
      for (int c = cuts[i - 1] + 1; c <= m - (g - i); ++c) {
        if (c - cuts[i - 1] > cap) break;
        cuts[i] = c;
        if (i == g - 1 && m - c > cap) continue;
        place(i + 1);
      }
    };
    place(1);
  }
}

void greedy_search(const BlockSums& bs, int m, int q, int cap, Best& best) {
  // dp over runs with pairwise distinct colors, then greedy class merging
  const double kNeg = -1.0;
  std::vector<std::vector<double>> dp(q + 1, std::vector<double>(m + 1, kNeg));
  std::vector<std::vector<int>> from(q + 1, std::vector<int>(m + 1, -1));
  dp[0][0] = 0.0;
  for (int g = 1; g <= q; ++g) {
    for (int i = 1; i <= m; ++i) {
      for (int j = std::max(0, i - cap); j < i; ++j) {
        if (dp[g - 1][j] < 0.0) continue;
        double v = dp[g - 1][j] + bs.within(j, i);
        if (v > dp[g][i]) {
          dp[g][i] = v;
          from[g][i] = j;
        }
      }
    }
  }
  int g_best = -1;
  for (int g = 1; g <= q; ++g) {
    if (dp[g][m] >= 0.0 && (g_best < 0 || dp[g][m] > dp[g_best][m])) g_best = g;
  }
  if (g_best < 0) return;
  std::vector<int> cuts{m};
  for (int g = g_best, i = m; g > 0; i = from[g][i], --g) cuts.push_back(from[g][i]);
  std::reverse(cuts.begin(), cuts.end());
  const int g = g_best;
  std::vector<int> col(g), size(g);
  std::iota(col.begin(), col.end(), 0);
  for (int a = 0; a < g; ++a) size[a] = cuts[a + 1] - cuts[a];
  auto class_cross = [&](int c1, int c2) {
    double s = 0.0;
    for (int a = 0; a < g; ++a) {
      for (int b = 0; b < g; ++b) {
        if (col[a] == c1 && col[b] == c2) s += bs.cross(cuts[a], cuts[a + 1], cuts[b], cuts[b + 1]);
      }
    }
    return s;
  };
  while (true) {
    double gain = kTol;
    int m1 = -1, m2 = -1;
    for (int c1 = 0; c1 < g; ++c1) {
      for (int c2 = c1 + 1; c2 < g; ++c2) {
        if (size[c1] == 0 || size[c2] == 0 || size[c1] + size[c2] > cap) continue;
        double x = class_cross(c1, c2);
        if (x > gain) {
          gain = x;
          m1 = c1;
          m2 = c2;
        }
      }
    }
    if (m1 < 0) break;
    for (int& c : col) {
      if (c == m2) c = m1;
    }
    size[m1] += size[m2];
    size[m2] = 0;
  }
  double value = 0.0;
  for (int a = 0; a < g; ++a) {
    value += bs.within(cuts[a], cuts[a + 1]);
    for (int b = 0; b < a; ++b) {
      if (col[a] == col[b]) value += bs.cross(cuts[b], cuts[b + 1], cuts[a], cuts[a + 1]);
    }
  }
  best.value = value;
  best.chi.assign(m, 0);
  for (int a = 0; a < g; ++a) std::fill(best.chi.begin() + cuts[a], best.chi.begin() + cuts[a + 1], col[a]);
}

// Coarse solution on a left caterpillar with one leaf per run of chi.
CoarseSolution runs_solution(std::span<const int> chi, std::span<const int> pi) {
  std::vector<int> run_of(chi.size());
  int runs = 0;
  for (std::size_t p = 0; p < chi.size(); ++p) {
    if (p > 0 && chi[p] != chi[p - 1]) ++runs;
    run_of[p] = runs;
  }
  ++runs;
  CoarseSolution xi{build_caterpillar(runs, Side::kLeft), {}, {}};
  xi.color.assign(xi.small_tree.num_nodes(), -1);
  xi.leaf_of.assign(chi.size(), kNoNode);
  const auto& leaves = xi.small_tree.leaves();
  for (std::size_t p = 0; p < chi.size(); ++p) {
    NodeId leaf = leaves[run_of[p]];
    xi.leaf_of[pi[p]] = leaf;
    xi.color[leaf] = chi[p];
  }
  return xi;
}

std::vector<std::vector<double>> position_weights(const GaifmanGraph& h, std::span<const int> pi) {
  const std::size_t m = pi.size();
  std::vector<int> pos(m);
  for (std::size_t p = 0; p < m; ++p) pos[pi[p]] = static_cast<int>(p);
  std::vector<std::vector<double>> w(m, std::vector<double>(m, 0.0));
  for (const auto& [e, x] : h.weights) {
    w[pos[e.first]][pos[e.second]] += x;
    w[pos[e.second]][pos[e.first]] += x;
  }
  return w;
}

template <typename F>
void parallel_for(int n, int threads, F&& f) {
  unsigned hw = threads > 0 ? static_cast<unsigned>(threads)
                            : std::max(1u, std::thread::hardware_concurrency());
  unsigned workers = static_cast<unsigned>(std::min<long long>(hw, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = static_cast<int>(t); i < n; i += static_cast<int>(workers)) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

bool is_in_class(const CoarseSolution& xi, double eps, int q, std::span<const int> pi, int r) {
  check_coarse(xi);
  check_permutation(pi, xi.leaf_of.size());
  if (r < 2) throw ArgumentError("arity r must be >= 2");
  const double n = static_cast<double>(pi.size());
  if (static_cast<long long>(xi.small_tree.num_leaves()) > q) return false;
  std::map<int, int> per_color;
  for (std::size_t v = 0; v < xi.leaf_of.size(); ++v) ++per_color[xi.color_of_var(static_cast<int>(v))];
  for (const auto& [c, cnt] : per_color) {
    if (cnt > eps * n + 1e-9) return false;
  }
  if (r == 2) {
    std::set<NodeId> closed;
    for (std::size_t p = 0; p < pi.size(); ++p) {
      NodeId l = xi.leaf_of[pi[p]];
      if (p > 0 && xi.leaf_of[pi[p - 1]] == l) continue;
      if (!closed.insert(l).second) return false;
    }
    return true;
  }
  std::map<int, int> runs;
  for (std::size_t p = 0; p < pi.size(); ++p) {
    int c = xi.color_of_var(pi[p]);
    if (p == 0 || xi.color_of_var(pi[p - 1]) != c) ++runs[c];
  }
  for (const auto& [c, cnt] : runs) {
    if (cnt > 2 * r) return false;
  }
  return true;
}

ValPm val_pm(const CoarseSolution& xi, const Instance& inst) {
  check_coarse(xi);
  if (static_cast<int>(xi.leaf_of.size()) != inst.num_vars()) {
    throw ArgumentError("coarse solution does not cover the instance variables");
  }
  ValPm out;
  std::vector<NodeId> leaves;
  std::vector<int> colors;
  for (const auto& c : inst.constraints()) {
    leaves.clear();
    colors.clear();
    for (int v : c.vars) {
      leaves.push_back(xi.leaf_of[v]);
      colors.push_back(xi.color[xi.leaf_of[v]]);
    }
    std::sort(colors.begin(), colors.end());
    if (std::adjacent_find(colors.begin(), colors.end()) != colors.end()) {
      out.plus += c.w;
      continue;
    }
    double f = c.payoff->evaluate(xi.small_tree, leaves);
    out.minus += c.w * f;
    out.plus += c.w * f;
  }
  return out;
}

CoarsenResult coarsen(const Solution& phi, double eps) {
  const int n = static_cast<int>(phi.leaf_of.size());
  validate_solution(phi, n);
  if (!(eps > 1.0 / n)) {
    throw ArgumentError("coarsening needs eps > 1/|V| = " + std::to_string(1.0 / n));
  }
  const Tree& t = phi.tree;
  const std::size_t nodes = t.num_nodes();
  std::vector<int> unlabeled(nodes, 0);
  std::vector<NodeId> top(nodes, kNoNode);
  std::vector<int> label(nodes, -1);  // per leaf
  std::vector<std::string> label_names;
  std::vector<int> label_color;
  CoarsenResult res;
  const double threshold = eps * n / 2.0;
  static const char* kSide[2] = {"L", "R"};
  for (NodeId u : t.post_order()) {
    if (t.is_leaf(u)) {
      unlabeled[u] = 1;
      continue;
    }
    const auto& ch = t.children(u);
    int total = 0;
    for (NodeId c : ch) total += unlabeled[c];
    bool both = top[ch[0]] != kNoNode && top[ch[1]] != kNoNode;
    if (u == t.root() || both || total > threshold) {
      const int color = static_cast<int>(res.processed.size());
      res.processed.push_back(u);
      for (int s = 0; s < 2; ++s) {
        const NodeId c = ch[s];
        const int base = static_cast<int>(label_names.size());
        for (const char* half : {"L", "R"}) {
          label_names.push_back(std::string(kSide[s]) + half + "_" + std::to_string(u));
          label_color.push_back(color);
        }
        std::size_t lo = 0;
        if (top[c] != kNoNode) lo = t.leaf_position(t.subtree_leaves(top[c]).front());
        for (NodeId l : t.subtree_leaves(c)) {
          if (label[l] >= 0) continue;
          bool right = top[c] != kNoNode && t.leaf_position(l) > lo;
          label[l] = base + (right ? 1 : 0);
        }
      }
      unlabeled[u] = 0;
      top[u] = u;
    } else {
      unlabeled[u] = total;
      top[u] = top[ch[0]] != kNoNode ? top[ch[0]] : top[ch[1]];
    }
  }
  res.labels_created = static_cast<int>(label_names.size());
  res.colors = static_cast<int>(res.processed.size());
  std::vector<NodeId> rep(label_names.size(), kNoNode);
  for (NodeId l : t.leaves()) {
    if (rep[label[l]] == kNoNode) rep[label[l]] = l;
  }
  std::vector<NodeId> keep;
  for (NodeId r : rep) {
    if (r != kNoNode) keep.push_back(r);
  }
  res.labels_used = static_cast<int>(keep.size());
  CoarseSolution& xi = res.xi;
  xi.small_tree = restrict(t, keep);
  xi.color.assign(xi.small_tree.num_nodes(), -1);
  std::vector<NodeId> small_of_label(label_names.size(), kNoNode);
  for (std::size_t i = 0; i < rep.size(); ++i) {
    if (rep[i] == kNoNode) continue;
    small_of_label[i] = xi.small_tree.leaf(t.label(rep[i]));
    xi.color[small_of_label[i]] = label_color[i];
  }
  xi.leaf_of.resize(n);
  res.label_of_var.resize(n);
  for (int v = 0; v < n; ++v) {
    int lab = label[phi.leaf_of[v]];
    xi.leaf_of[v] = small_of_label[lab];
    res.label_of_var[v] = label_names[lab];
  }
  return res;
}

double mc_weight(std::span<const int> var_colors, const GaifmanGraph& h) {
  if (static_cast<int>(var_colors.size()) != h.num_vertices) {
    throw ArgumentError("coloring does not cover the graph vertices");
  }
  double s = 0.0;
  for (const auto& [e, x] : h.weights) {
    if (var_colors[e.first] == var_colors[e.second]) s += x;
  }
  return s;
}

double mc_weight(const CoarseSolution& xi, const GaifmanGraph& h) {
  check_coarse(xi);
  std::vector<int> colors(xi.leaf_of.size());
  for (std::size_t v = 0; v < colors.size(); ++v) colors[v] = xi.color_of_var(static_cast<int>(v));
  return mc_weight(colors, h);
}

std::uint64_t m_star(int q, double eps, double c) {
  if (q < 1 || !(eps > 0.0 && eps <= 1.0) || !(c > 0.0)) {
    throw ArgumentError("m* needs q >= 1, eps in (0,1], C > 0");
  }
  double v = c * q * std::log(q / eps) / (eps * eps);
  return static_cast<std::uint64_t>(std::ceil(std::max(v, 0.0)));
}

std::pair<double, std::vector<int>> max_monochrome(const std::vector<std::vector<double>>& w,
                                                   double eps, int q, bool* exact) {
  const int m = static_cast<int>(w.size());
  if (m == 0) throw ArgumentError("empty weight matrix");
  if (q < 1) throw ArgumentError("q must be >= 1");
  const int cap = class_cap(eps, m);
  BlockSums bs(w);
  Best best;
  const bool ex = q <= 5;
  if (ex) {
    exact_search(bs, m, q, cap, best);
  } else {
    greedy_search(bs, m, q, cap, best);
  }
  if (exact) *exact = ex;
  if (best.value < 0.0) {
    throw ArgumentError("no coloring with at most " + std::to_string(q) +
                        " runs and color classes of size <= " + std::to_string(cap));
  }
  return {best.value, std::move(best.chi)};
}

MonochromeReport monochrome_experiment(const Instance& inst, const MonochromeOptions& opt) {
  if (opt.num_orders < 1) throw ArgumentError("num_orders must be >= 1");
  if (!(opt.eps > 0.0 && opt.eps <= 1.0)) throw ArgumentError("eps must lie in (0, 1]");
  const int m = inst.num_vars();
  if (m < 1) throw ArgumentError("instance has no variables");
  const GaifmanGraph h = gaifman(inst);
  MonochromeReport rep;
  rep.weight = h.total_weight();
  rep.bound = 3.0 * opt.eps * rep.weight;
  rep.regular = is_regular(inst);
  rep.m_star = m_star(opt.q, opt.eps, opt.m_star_constant);
  rep.bound_applies = static_cast<std::uint64_t>(m) >= rep.m_star;
  rep.per_order_max.assign(opt.num_orders, 0.0);
  std::vector<char> violation(opt.num_orders, 0), exact(opt.num_orders, 0);
  parallel_for(opt.num_orders, opt.threads, [&](int t) {
    auto rng = order_rng(opt.seed, static_cast<std::uint64_t>(t));
    std::vector<int> pi(m);
    std::iota(pi.begin(), pi.end(), 0);
    std::shuffle(pi.begin(), pi.end(), rng);
    bool ex = false;
    auto [value, chi] = max_monochrome(position_weights(h, pi), opt.eps, opt.q, &ex);
    rep.per_order_max[t] = value;
    exact[t] = ex;
    CoarseSolution xi = runs_solution(chi, pi);
    ValPm v = val_pm(xi, inst);
    violation[t] = v.plus - v.minus > mc_weight(xi, h) + kTol;
  });
  rep.mean = std::accumulate(rep.per_order_max.begin(), rep.per_order_max.end(), 0.0) /
             opt.num_orders;
  rep.bound_holds = rep.mean <= rep.bound + kTol;
  rep.exact = std::all_of(exact.begin(), exact.end(), [](char c) { return c != 0; });
  rep.pointwise_checks = static_cast<std::uint64_t>(opt.num_orders);
  rep.pointwise_violations = static_cast<std::uint64_t>(std::count(violation.begin(), violation.end(), 1));
  return rep;
}

FixedColoringReport fixed_coloring_experiment(const Instance& inst, std::span<const int> chi,
                                              int num_orders, std::uint64_t seed) {
  const int m = inst.num_vars();
  if (static_cast<int>(chi.size()) != m) throw ArgumentError("coloring needs one color per position");
  if (num_orders < 2) throw ArgumentError("num_orders must be >= 2");
  std::map<int, int> sizes;
  for (int c : chi) {
    if (c < 0) throw ArgumentError("negative color");
    ++sizes[c];
  }
  const GaifmanGraph h = gaifman(inst);
  FixedColoringReport rep;
  rep.weight = h.total_weight();
  for (const auto& [c, s] : sizes) rep.eps = std::max(rep.eps, static_cast<double>(s) / m);
  std::vector<int> pos(m), colors(m);
  for (int t = 0; t < num_orders; ++t) {
    auto rng = order_rng(seed, static_cast<std::uint64_t>(t));
    std::iota(pos.begin(), pos.end(), 0);
    std::shuffle(pos.begin(), pos.end(), rng);
    for (int v = 0; v < m; ++v) colors[v] = chi[pos[v]];
    rep.values.push_back(mc_weight(colors, h));
  }
  const double n = num_orders;
  rep.mean = std::accumulate(rep.values.begin(), rep.values.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : rep.values) ss += (x - rep.mean) * (x - rep.mean);
  rep.sd = std::sqrt(ss / (n - 1));
  rep.stderr_ = rep.sd / std::sqrt(n);
  return rep;
}

}  // namespace phylocsp
