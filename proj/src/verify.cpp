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

#include "phylocsp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "phylocsp/coarse.hpp"
#include "phylocsp/coupling.hpp"
#include "phylocsp/error.hpp"
#include "phylocsp/gap_instance.hpp"
#include "phylocsp/instance.hpp"
#include "phylocsp/pattern.hpp"
#include "phylocsp/phylo_problems.hpp"
#include "phylocsp/random_assignment.hpp"
#include "phylocsp/tree.hpp"

namespace phylocsp {

namespace {

struct Outcome {
  bool ok;
  std::string detail;
};

using CheckFn = std::function<Outcome(Rng&)>;

struct Check {
  const char* module;
  const char* name;
  CheckFn fn;
};

std::vector<std::string> labels(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back("v" + std::to_string(i + 1));
  return out;
}

Tree random_tree(int n, Rng& rng) {
  auto l = labels(n);
  return sample_tree(uniform_measure(), l, rng);
}

std::vector<NodeId> random_assignment_of(const Tree& t, int k, Rng& rng) {
  std::vector<NodeId> leaves = t.leaves();
  std::shuffle(leaves.begin(), leaves.end(), rng);
  leaves.resize(k);
  return leaves;
}

Outcome fail(const std::string& why) { return {false, why}; }
Outcome pass(const std::string& what = {}) { return {true, what}; }

const PayoffRegistry& builtins() {
  static const PayoffRegistry reg;
  return reg;
}

std::vector<Check> all_checks() {
  std::vector<Check> c;

  c.push_back({"tree_core", "newick round trip", [](Rng& rng) {
    for (int i = 0; i < 200; ++i) {
      Tree t = random_tree(2 + i % 12, rng);
      if (Tree::parse_newick(t.to_newick()).canonical() != t.canonical()) {
        return fail("round trip changed " + t.to_newick());
      }
    }
    return pass("200 trees");
  }});
  c.push_back({"tree_core", "restriction keeps lca order", [](Rng& rng) {
    for (int i = 0; i < 200; ++i) {
      Tree t = random_tree(6 + i % 8, rng);
      auto keep = random_assignment_of(t, 4, rng);
      std::vector<std::string> names;
      for (NodeId l : keep) names.push_back(t.label(l));
      Tree r = restrict(t, keep);
      for (std::size_t a = 0; a < keep.size(); ++a) {
        for (std::size_t b = 0; b < keep.size(); ++b) {
          for (std::size_t x = 0; x < keep.size(); ++x) {
            bool in_t = t.depth(t.lca(keep[a], keep[b])) > t.depth(t.lca(keep[a], keep[x]));
            bool in_r = r.depth(r.lca(r.leaf(names[a]), r.leaf(names[b]))) >
                        r.depth(r.lca(r.leaf(names[a]), r.leaf(names[x])));
            if (in_t != in_r) return fail("restriction of " + t.to_newick());
          }
        }
      }
    }
    return pass("200 restrictions");
  }});
  c.push_back({"tree_core", "builder leaf counts", [](Rng&) {
    for (int n = 1; n <= 20; ++n) {
      if (build_caterpillar(n, Side::kLeft).num_leaves() != static_cast<std::size_t>(n) ||
          build_caterpillar(n, Side::kRight).num_leaves() != static_cast<std::size_t>(n)) {
        return fail("caterpillar " + std::to_string(n));
      }
    }
    for (int k = 2; k <= 4; ++k) {
      for (int d = 0; d <= 4; ++d) {
        Tree t = build_perfect(k, d);
        if (t.num_leaves() != static_cast<std::size_t>(std::pow(k, d)) || t.height() != d) {
          return fail("perfect tree k=" + std::to_string(k) + " d=" + std::to_string(d));
        }
      }
    }
    return pass();
  }});

  c.push_back({"patterns", "code and canonical routes agree", [](Rng& rng) {
    const auto& reg = builtins();
    std::vector<std::shared_ptr<const PayoffFunction>> fs{
        reg.get("triplet"), reg.get("quartet"), reg.get("fstar-0.1"), reg.get("split-right-4")};
    for (int i = 0; i < 400; ++i) {
      const auto& f = fs[i % fs.size()];
      Tree t = random_tree(f->arity() + i % 6, rng);
      auto a = random_assignment_of(t, f->arity(), rng);
      Pattern p = match_pattern(t, a);
      if (pattern_code(t, a) != p.code()) return fail("code mismatch on " + p.canonical());
      if (f->evaluate(t, a) != evaluate_payoff(*f, t, a)) return fail("payoff mismatch");
    }
    return pass("400 assignments");
  }});
  c.push_back({"patterns", "pattern counts", [](Rng&) {
    const std::size_t want[] = {0, 1, 2, 12, 120, 1680};
    for (int k = 1; k <= 5; ++k) {
      if (enumerate_patterns(k, 2).size() != want[k]) {
        return fail("k=" + std::to_string(k));
      }
    }
    return pass();
  }});
  c.push_back({"patterns", "bracket compiler equivalence", [](Rng&) {
    auto pats = enumerate_patterns(3, 2);
    std::size_t checked = 0;
    for (int n = 3; n <= 5; ++n) {
      for (const auto& host : enumerate_patterns(n, 2)) {
        const Tree& t = host.tree();
        std::vector<NodeId> a(3);
        for (int x = 1; x <= n; ++x) {
          for (int y = 1; y <= n; ++y) {
            for (int z = 1; z <= n; ++z) {
              if (x == y || y == z || x == z) continue;
              a = {host.leaf_of_slot(x), host.leaf_of_slot(y), host.leaf_of_slot(z)};
              Pattern m = match_pattern(t, a);
              for (const auto& p : pats) {
                bool direct = m == p;
                bool via = eval_brackets(compile_to_brackets(p), t, a);
                ++checked;
                if (direct != via) return fail(p.canonical() + " on " + t.canonical());
              }
            }
          }
        }
      }
    }
    return pass(std::to_string(checked) + " evaluations");
  }});

  c.push_back({"csp_core", "weights normalized", [](Rng& rng) {
    for (int i = 0; i < 20; ++i) {
      Instance inst = random_instance(builtins().get("triplet"), 5 + i % 4, 3 + i, rng());
      Rational s = 0;
      for (const auto& con : inst.constraints()) s += con.weight;
      if (s != 1) return fail("weights do not sum to 1");
    }
    return pass();
  }});
  c.push_back({"csp_core", "optimum bounds sampled solutions", [](Rng& rng) {
    for (int i = 0; i < 10; ++i) {
      Instance inst = random_instance(builtins().get("triplet"), 6, 8, rng());
      OptResult opt = brute_force_opt(inst);
      if (std::fabs(value(opt.solution, inst) - opt.value) > 1e-12) return fail("argmax value");
      for (int t = 0; t < 50; ++t) {
        if (value(sample_solution(uniform_measure(), inst, rng), inst) > opt.value + 1e-12) {
          return fail("sampled solution beats optimum");
        }
      }
    }
    return pass();
  }});
  c.push_back({"csp_core", "best order equals optimum", [](Rng& rng) {
    for (int i = 0; i < 5; ++i) {
      Instance inst = random_instance(builtins().get("fstar-0.2"), 5, 6, rng());
      double opt = brute_force_opt(inst).value;
      std::vector<int> pi(5);
      std::iota(pi.begin(), pi.end(), 0);
      double best = 0.0;
      do {
        double v = opt_given_order(inst, pi).value;
        if (v > opt + 1e-12) return fail("order optimum above global optimum");
        best = std::max(best, v);
      } while (std::next_permutation(pi.begin(), pi.end()));
      if (std::fabs(best - opt) > 1e-12) return fail("max over orders differs");
    }
    return pass();
  }});
  c.push_back({"csp_core", "gap instances are regular", [](Rng&) {
    for (int d = 1; d <= 3; ++d) {
      if (!is_regular(build_gap(GapSpec{builtins().get("triplet"), d}))) {
        return fail("d=" + std::to_string(d));
      }
    }
    return pass();
  }});

  c.push_back({"random_assignment", "uniform triplet threshold", [](Rng&) {
    double a = alpha_exact(uniform_measure(), *builtins().get("triplet"));
    if (std::fabs(a - 1.0 / 3.0) > 1e-12) return fail(std::to_string(a));
    return pass();
  }});
  c.push_back({"random_assignment", "exact value inside Monte-Carlo interval", [](Rng& rng) {
    auto f = builtins().get("split-right-4");
    BiasedMeasure m = biased_caterpillar(0.2, 30);
    double exact = alpha_exact(m, *f);
    McEstimate mc = alpha_mc(m, *f, 200000, rng());
    if (std::fabs(mc.mean - exact) > 2.0 * mc.half_width) {
      return fail("exact " + std::to_string(exact) + " mc " + std::to_string(mc.mean));
    }
    return pass();
  }});
  c.push_back({"random_assignment", "pattern distribution sums to one", [](Rng&) {
    for (int k = 2; k <= 5; ++k) {
      double s = 0.0;
      for (const auto& [p, pr] : uniform_split_pattern_dist(k)) s += pr;
      if (std::fabs(s - 1.0) > 1e-12) return fail("k=" + std::to_string(k));
    }
    return pass();
  }});

  c.push_back({"gap_instance", "satisfying solution has value 1", [](Rng&) {
    for (const char* name : {"triplet", "fstar-0.1", "split-right-4"}) {
      for (int d = 1; d <= 2; ++d) {
        GapSpec s{builtins().get(name), d};
        if (value(satisfying_solution(s), build_gap(s)) != 1.0) {
          return fail(std::string(name) + " d=" + std::to_string(d));
        }
      }
    }
    return pass();
  }});
  c.push_back({"gap_instance", "constraint count formula", [](Rng&) {
    for (int d = 1; d <= 3; ++d) {
      GapSpec s{builtins().get("triplet"), d};
      if (build_gap(s).constraints().size() != gap_constraint_count(3, d)) {
        return fail("d=" + std::to_string(d));
      }
    }
    return pass();
  }});
  c.push_back({"gap_instance", "coupled map marginals uniform", [](Rng&) {
    CoupledMap map(4, 3);
    for (int j = 0; j < 4; ++j) {
      auto p = lmn_pmf(4, 3, j);
      const auto& joint = map.coupling(j);
      auto first = first_marginal(joint, map.N());
      double off = 0.0;
      for (const auto& e : joint) off += e.x == e.y ? 0.0 : e.mass;
      if (std::fabs(off - map.tv(j)) > 1e-12) return fail("off-diagonal mass differs from tv");
      for (std::size_t v = 0; v < map.N(); ++v) {
        if (std::fabs(first[v] - p[v]) > 1e-12 || std::fabs(map.marginal(j)[v] - 1.0 / map.N()) > 1e-12) {
          return fail("marginal mismatch");
        }
      }
    }
    return pass();
  }});

  c.push_back({"coarse", "coarsening keeps value and class", [](Rng& rng) {
    for (int i = 0; i < 30; ++i) {
      int n = 4 + i % 9;
      Instance inst = random_instance(builtins().get("triplet"), n, 3 * n, rng());
      Solution phi = sample_solution(uniform_measure(), inst, rng);
      CoarsenResult r = coarsen(phi, 0.5);
      ValPm v = val_pm(r.xi, inst);
      if (v.plus + 1e-12 < value(phi, inst)) return fail("val+ below value");
      if (v.minus > v.plus + 1e-12) return fail("val- above val+");
      if (!is_in_class(r.xi, 0.5, 32, solution_order(phi))) return fail("not in class");
      if (r.labels_used > 32 || r.colors > 8) return fail("too many labels or colors");
    }
    return pass("30 solutions");
  }});
  c.push_back({"coarse", "collisions bounded by monochrome weight", [](Rng& rng) {
    Instance inst = build_gap(GapSpec{builtins().get("triplet"), 2});
    GaifmanGraph h = gaifman(inst);
    for (int i = 0; i < 50; ++i) {
      Solution phi = sample_solution(uniform_measure(), inst, rng);
      CoarsenResult r = coarsen(phi, 0.5);
      ValPm v = val_pm(r.xi, inst);
      if (v.plus - v.minus > mc_weight(r.xi, h) + 1e-12) return fail("val+ - val- above mc");
    }
    return pass();
  }});

  c.push_back({"phylo_problems", "BUILD satisfies induced triplets", [](Rng& rng) {
    for (int i = 0; i < 30; ++i) {
      Tree t = random_tree(8, rng);
      auto ts = induced_triplets(t);
      auto built = aho_build(ts, t.leaf_labels());
      if (!built) return fail("reported inconsistent");
      for (const auto& x : ts) {
        if (!triplet_satisfied(*built, x)) return fail("unsatisfied triplet");
      }
    }
    std::vector<TripletConstraint> bad{{"a", "b", "c"}, {"a", "c", "b"}};
    std::vector<std::string> abc{"a", "b", "c"};
    if (aho_build(bad, abc)) return fail("ab|c, ac|b accepted");
    return pass();
  }});
  c.push_back({"phylo_problems", "quartet reduction preserves counts", [](Rng& rng) {
    for (int i = 0; i < 20; ++i) {
      Instance inst = random_instance(builtins().get("triplet"), 6, 10, rng());
      QuartetReduction red = triplets_to_quartets(inst);
      Solution phi = sample_solution(uniform_measure(), inst, rng);
      Tree sur = attach_root_leaf(phi.tree, red.gamma);
      if (std::fabs(value(phi, inst) - value(solution_from_tree(sur, red.instance), red.instance)) > 1e-12) {
        return fail("values differ");
      }
      if (root_at_leaf(sur, red.gamma).canonical() != phi.tree.canonical()) {
        return fail("re-rooting is not inverse");
      }
    }
    return pass();
  }});
  return c;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerifyCheck& c) { return c.passed; });
}

std::vector<std::string> verify_modules() {
  return {"tree_core", "patterns", "csp_core", "random_assignment",
          "gap_instance", "coarse", "phylo_problems"};
}

VerifyReport run_verify(std::string_view filter, std::uint64_t seed) {
  std::vector<std::string> wanted;
  std::stringstream ss{std::string(filter)};
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    auto mods = verify_modules();
    if (std::find(mods.begin(), mods.end(), item) == mods.end()) {
      throw ArgumentError("unknown module '" + item + "' in verify filter");
    }
    wanted.push_back(item);
  }
  VerifyReport rep;
  std::uint64_t index = 0;
  for (const auto& check : all_checks()) {
    ++index;
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), check.module) == wanted.end()) {
      continue;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    Rng rng(seq);
    VerifyCheck out{check.module, check.name, false, {}};
    try {
      Outcome o = check.fn(rng);
      out.passed = o.ok;
      out.detail = o.detail;
    } catch (const std::exception& e) {
      out.detail = std::string("exception: ") + e.what();
    }
    rep.checks.push_back(std::move(out));
  }
  return rep;
}

VerifyReport verify_instance_text(std::string_view text, const PayoffRegistry& registry) {
  Instance inst = parse_instance(text, registry);
  VerifyReport rep;
  Rational total = 0;
  bool arity_ok = true;
  for (const auto& c : inst.constraints()) {
    total += c.weight;
    arity_ok = arity_ok && static_cast<int>(c.vars.size()) == c.payoff->arity();
  }
  rep.checks.push_back({"instance", "weights sum to one", total == 1 || inst.constraints().empty(), {}});
  rep.checks.push_back({"instance", "arity matches payoff", arity_ok, {}});
  rep.checks.push_back({"instance", "round trip", format_instance(parse_instance(format_instance(inst), registry)) ==
                                                      format_instance(inst), {}});
  rep.checks.push_back({"instance", "regular", true, is_regular(inst) ? "regular" : "not regular"});
  return rep;
}

}  // namespace phylocsp
