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

#include "phylocsp/instance.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "phylocsp/error.hpp"
#include "phylocsp/registry.hpp"

namespace phylocsp {

using boost::multiprecision::cpp_int;

// cpp_int treats a leading 0 as an octal prefix.
static cpp_int decimal(const std::string& digits) {
  std::size_t i = digits.find_first_not_of('0');
  return i == std::string::npos ? cpp_int(0) : cpp_int(digits.substr(i));
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&]() { return ArgumentError("invalid number '" + s + "'"); };
  if (s.empty()) throw bad();
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      std::string num = s.substr(0, slash), den = s.substr(slash + 1);
      auto digits = [](const std::string& t, bool allow_sign) {
        std::size_t i = (allow_sign && !t.empty() && t[0] == '-') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i) {
          if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
        }
        return true;
      };
      if (!digits(num, true) || !digits(den, false)) throw bad();
      cpp_int d = decimal(den);
      if (d == 0) throw ArgumentError("zero denominator in '" + s + "'");
      bool minus = num[0] == '-';
      cpp_int n = decimal(num.substr(minus ? 1 : 0));
      return Rational(minus ? cpp_int(-n) : n, d);
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    std::string mant;
    int frac_digits = 0;
    bool dot = false;
    for (; i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) ||
                            s[i] == '.');
         ++i) {
      if (s[i] == '.') {
        if (dot) throw bad();
        dot = true;
        continue;
      }
      mant += s[i];
      if (dot) ++frac_digits;
    }
    if (mant.empty()) throw bad();
    long exp = 0;
    if (i < s.size()) {
      if (s[i] != 'e' && s[i] != 'E') throw bad();
      std::size_t used = 0;
      exp = std::stol(s.substr(i + 1), &used);
      if (i + 1 + used != s.size()) throw bad();
    }
    exp -= frac_digits;
    if (std::labs(exp) > 400) throw bad();
    cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::labs(exp)));
    Rational r = exp >= 0 ? Rational(decimal(mant) * scale)
                          : Rational(decimal(mant), scale);
    return neg ? Rational(-r) : r;
  } catch (const std::logic_error&) {
    throw bad();
  } catch (const std::runtime_error&) {
    throw bad();
  }
}

std::string format_rational(const Rational& r) {
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

Instance::Instance(std::vector<std::string> variables,
                   std::vector<Constraint> constraints)
    : variables_(std::move(variables)), constraints_(std::move(constraints)) {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (v.empty() || std::any_of(v.begin(), v.end(), [](char c) {
          return std::isspace(static_cast<unsigned char>(c)) || c == '(' ||
                 c == ')' || c == ',' || c == ';' || c == ':';
        })) {
      throw ArgumentError("invalid variable name '" + v + "'");
    }
    if (!index_.emplace(v, static_cast<int>(i)).second) {
      throw ArgumentError("duplicate variable '" + v + "'");
    }
  }
  Rational total = 0;
  for (const auto& c : constraints_) {
    if (!c.payoff) throw ArgumentError("constraint without payoff");
    if (static_cast<int>(c.vars.size()) != c.payoff->arity()) {
      throw ArgumentError("payoff '" + c.payoff->name() + "' expects " +
                          std::to_string(c.payoff->arity()) + " variables, got " +
                          std::to_string(c.vars.size()));
    }
    std::set<int> seen;
    for (int v : c.vars) {
      if (v < 0 || v >= num_vars()) throw ArgumentError("variable index out of range");
      if (!seen.insert(v).second) {
        throw ArgumentError("repeated variable '" + variables_[v] +
                            "' in a constraint");
      }
    }
    if (c.weight < 0) throw ArgumentError("negative constraint weight");
    total += c.weight;
  }
  if (!constraints_.empty() && total == 0) {
    throw ArgumentError("constraint weights sum to zero");
  }
  using boost::multiprecision::cpp_int;
  cpp_int den = 1;
  for (auto& c : constraints_) {
    c.weight /= total;
    c.w = c.weight.convert_to<double>();
    den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(c.weight));
  }
  if (den < (cpp_int(1) << 62)) {
    unit_den_ = den.convert_to<std::uint64_t>();
    for (auto& c : constraints_) {
      c.units = (boost::multiprecision::numerator(c.weight) * (den / boost::multiprecision::denominator(c.weight)))
                    .convert_to<std::uint64_t>();
    }
  }
}

int Instance::var_index(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) {
    throw NotFoundError("unknown variable '" + std::string(name) + "'");
  }
  return it->second;
}

Solution solution_from_tree(Tree tree, const Instance& inst) {
  Solution sol{std::move(tree), {}};
  if (static_cast<int>(sol.tree.num_leaves()) != inst.num_vars()) {
    throw ArgumentError("solution tree has " +
                        std::to_string(sol.tree.num_leaves()) + " leaves for " +
                        std::to_string(inst.num_vars()) + " variables");
  }
  sol.leaf_of.reserve(inst.num_vars());
  for (const auto& v : inst.variables()) sol.leaf_of.push_back(sol.tree.leaf(v));
  validate_solution(sol, inst.num_vars());
  return sol;
}

void validate_solution(const Solution& sol, int num_vars) {
  if (static_cast<int>(sol.leaf_of.size()) != num_vars) {
    throw ArgumentError("solution maps " + std::to_string(sol.leaf_of.size()) +
                        " variables, expected " + std::to_string(num_vars));
  }
  if (static_cast<int>(sol.tree.num_leaves()) != num_vars) {
    throw ArgumentError("solution tree leaf count differs from variable count");
  }
  if (!sol.tree.is_full_binary()) throw ArgumentError("solution tree is not binary");
  std::vector<char> used(sol.tree.num_nodes(), 0);
  for (NodeId l : sol.leaf_of) {
    if (l >= sol.tree.num_nodes() || !sol.tree.is_leaf(l) || used[l]) {
      throw ArgumentError("solution mapping is not a bijection onto leaves");
    }
    used[l] = 1;
  }
}

std::vector<int> solution_order(const Solution& sol) {
  std::vector<int> var_at(sol.tree.num_nodes(), -1);
  for (std::size_t v = 0; v < sol.leaf_of.size(); ++v) {
    var_at[sol.leaf_of[v]] = static_cast<int>(v);
  }
  std::vector<int> out;
  for (NodeId l : sol.tree.leaves()) out.push_back(var_at[l]);
  return out;
}

double value(const Solution& sol, const Instance& inst) {
  if (static_cast<int>(sol.leaf_of.size()) < inst.num_vars()) {
    throw ArgumentError("solution does not cover every variable");
  }
  double total = 0.0;
  std::uint64_t units = 0;
  const bool exact = inst.unit_denominator() != 0;
  std::array<NodeId, kMaxPatternArity> args{};
  for (const auto& c : inst.constraints()) {
    for (std::size_t i = 0; i < c.vars.size(); ++i) args[i] = sol.leaf_of[c.vars[i]];
    double f = c.payoff->evaluate(sol.tree, std::span<const NodeId>(args.data(), c.vars.size()));
    if (exact && f == 1.0) {
      units += c.units;
    } else {
      total += c.w * f;
    }
  }
  if (exact) total += static_cast<double>(units) / static_cast<double>(inst.unit_denominator());
  return total;
}

double GaifmanGraph::weight(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = weights.find({a, b});
  return it == weights.end() ? 0.0 : it->second;
}

double GaifmanGraph::total_weight() const {
  double t = 0.0;
  for (const auto& [e, w] : weights) t += w;
  return t;
}

std::vector<double> GaifmanGraph::weighted_degrees() const {
  std::vector<double> deg(num_vertices, 0.0);
  for (const auto& [e, w] : weights) {
    deg[e.first] += w;
    deg[e.second] += w;
  }
  return deg;
}

GaifmanGraph gaifman(const Instance& inst) {
  GaifmanGraph g;
  g.num_vertices = inst.num_vars();
  for (const auto& c : inst.constraints()) {
    for (std::size_t i = 0; i < c.vars.size(); ++i) {
      for (std::size_t j = i + 1; j < c.vars.size(); ++j) {
        int a = std::min(c.vars[i], c.vars[j]), b = std::max(c.vars[i], c.vars[j]);
        g.weights[{a, b}] += c.w;
      }
    }
  }
  return g;
}

std::vector<double> incident_weights(const Instance& inst) {
  std::vector<double> w(inst.num_vars(), 0.0);
  for (const auto& c : inst.constraints()) {
    for (int v : c.vars) w[v] += c.w;
  }
  return w;
}

bool is_regular(const Instance& inst) {
  auto w = incident_weights(inst);
  if (w.empty()) return true;
  auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  return *hi - *lo <= 1e-12;
}

Instance parse_instance(std::string_view text, const PayoffRegistry& registry) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::vector<std::string> vars;
  bool have_vars = false;
  std::map<std::string, int, std::less<>> index;
  std::vector<Constraint> constraints;
  auto fail = [&](const std::string& msg) {
    return ArgumentError("instance line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "vars") {
      if (have_vars) throw fail("duplicate 'vars' header");
      have_vars = true;
      std::string v;
      while (ls >> v) {
        if (!index.emplace(v, static_cast<int>(vars.size())).second) {
          throw fail("duplicate variable '" + v + "'");
        }
        vars.push_back(v);
      }
      continue;
    }
    if (!have_vars) throw fail("constraint before 'vars' header");
    Constraint c;
    try {
      c.weight = parse_rational(head);
    } catch (const ArgumentError& e) {
      throw fail(e.what());
    }
    std::string name;
    if (!(ls >> name)) throw fail("missing payoff name");
    c.payoff = registry.get(name);
    std::string v;
    while (ls >> v) {
      auto it = index.find(v);
      if (it == index.end()) throw fail("unknown variable '" + v + "'");
      c.vars.push_back(it->second);
    }
    if (static_cast<int>(c.vars.size()) != c.payoff->arity()) {
      throw fail("payoff '" + name + "' expects " +
                 std::to_string(c.payoff->arity()) + " variables");
    }
    constraints.push_back(std::move(c));
  }
  if (!have_vars) throw ArgumentError("instance has no 'vars' header");
  Rational total = 0;
  for (const auto& c : constraints) total += c.weight;
  if (!constraints.empty() &&
      std::fabs(total.convert_to<double>() - 1.0) > 1e-9) {
    throw ArgumentError("constraint weights sum to " +
                        std::to_string(total.convert_to<double>()) +
                        ", expected 1");
  }
  return Instance(std::move(vars), std::move(constraints));
}

std::string format_instance(const Instance& inst) {
  std::string out = "vars";
  for (const auto& v : inst.variables()) out += " " + v;
  out += "\n";
  for (const auto& c : inst.constraints()) {
    out += format_rational(c.weight) + " " + c.payoff->name();
    for (int v : c.vars) out += " " + inst.variables()[v];
    out += "\n";
  }
  return out;
}

Instance random_instance(std::shared_ptr<const PayoffFunction> f, int n, int m,
                         std::uint64_t seed) {
  if (!f) throw ArgumentError("random instance needs a payoff");
  if (n < f->arity()) {
    throw ArgumentError("need at least " + std::to_string(f->arity()) + " variables");
  }
  if (m < 1) throw ArgumentError("need at least one constraint");
  std::vector<std::string> vars;
  for (int i = 1; i <= n; ++i) vars.push_back("v" + std::to_string(i));
  std::mt19937_64 rng(seed);
  std::vector<int> pool(n);
  std::vector<Constraint> cons;
  for (int c = 0; c < m; ++c) {
    std::iota(pool.begin(), pool.end(), 0);
    Constraint con;
    con.payoff = f;
    con.weight = Rational(1, m);
    for (int j = 0; j < f->arity(); ++j) {
      std::uniform_int_distribution<int> pick(j, n - 1);
      std::swap(pool[j], pool[pick(rng)]);
      con.vars.push_back(pool[j]);
    }
    cons.push_back(std::move(con));
  }
  return Instance(std::move(vars), std::move(cons));
}

}  // namespace phylocsp
