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

#include "phylocsp/registry.hpp"

#include <charconv>
#include <optional>
#include <sstream>

#include "phylocsp/error.hpp"
#include "phylocsp/phylo_problems.hpp"

namespace phylocsp {

namespace {

std::optional<int> suffix_int(std::string_view name, std::string_view prefix) {
  if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
  std::string_view rest = name.substr(prefix.size());
  int v = 0;
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
  if (ec != std::errc() || ptr != rest.data() + rest.size() || rest.empty()) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

std::shared_ptr<const PayoffFunction> make_builtin_payoff(std::string_view name) {
  auto wrap = [](PayoffFunction f) {
    return std::make_shared<const PayoffFunction>(std::move(f));
  };
  if (name == "triplet") return wrap(triplet_payoff());
  if (name == "quartet") return wrap(quartet_payoff());
  if (name.substr(0, 6) == "fstar-") {
    std::string text(name.substr(6));
    std::size_t used = 0;
    double delta = 0.0;
    try {
      delta = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size()) return nullptr;
    PayoffFunction f = fstar_payoff(delta);
    // Keep the caller's spelling so instance files round-trip.
    return wrap(PayoffFunction(std::string(name), f.arity(), f.table(),
                               f.default_payoff()));
  }
  if (auto k = suffix_int(name, "split-right-")) return wrap(split_right_payoff(*k));
  if (auto k = suffix_int(name, "split-left-")) return wrap(split_left_payoff(*k));
  if (auto k = suffix_int(name, "one-")) {
    if (*k < 1 || *k > 6) throw ArgumentError("one-<k>: arity must be in 1..6");
    return wrap(PayoffFunction(std::string(name), *k, {}, 1.0));
  }
  return nullptr;
}

PayoffRegistry::PayoffRegistry(const PayoffRegistry& other) {
  std::lock_guard lock(other.mu_);
  named_ = other.named_;
  builtin_cache_ = other.builtin_cache_;
}

PayoffRegistry& PayoffRegistry::operator=(const PayoffRegistry& other) {
  if (this == &other) return *this;
  std::scoped_lock lock(mu_, other.mu_);
  named_ = other.named_;
  builtin_cache_ = other.builtin_cache_;
  return *this;
}

void PayoffRegistry::add(std::shared_ptr<const PayoffFunction> f) {
  if (!f) throw ArgumentError("null payoff");
  std::lock_guard lock(mu_);
  named_[f->name()] = std::move(f);
}

std::shared_ptr<const PayoffFunction> PayoffRegistry::get(std::string_view name) const {
  std::lock_guard lock(mu_);
  if (auto it = named_.find(name); it != named_.end()) return it->second;
  if (auto it = builtin_cache_.find(name); it != builtin_cache_.end()) return it->second;
  auto f = make_builtin_payoff(name);
  if (!f) throw NotFoundError("unknown payoff '" + std::string(name) + "'");
  builtin_cache_.emplace(std::string(name), f);
  return f;
}

bool PayoffRegistry::contains(std::string_view name) const {
  try {
    get(name);
    return true;
  } catch (const NotFoundError&) {
    return false;
  }
}

std::vector<std::string> PayoffRegistry::names() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [n, f] : named_) out.push_back(n);
  return out;
}

void PayoffRegistry::load(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    return ArgumentError("registry line " + std::to_string(lineno) + ": " + msg);
  };
  std::string name;
  int arity = 0;
  double def = 0.0;
  bool unordered = false, open = false;
  std::string body;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "payoff") {
      if (open) throw fail("missing 'end' before new payoff");
      if (!(ls >> name >> arity)) throw fail("expected 'payoff <name> <arity>'");
      def = 0.0;
      unordered = false;
      body.clear();
      std::string opt;
      while (ls >> opt) {
        if (opt == "default") {
          if (!(ls >> def)) throw fail("missing default value");
        } else if (opt == "unordered") {
          unordered = true;
        } else {
          throw fail("unknown option '" + opt + "'");
        }
      }
      open = true;
      continue;
    }
    if (head == "end") {
      if (!open) throw fail("'end' without 'payoff'");
      auto table = parse_pattern_table(body);
      if (unordered) table = close_under_swaps(table);
      add(std::make_shared<const PayoffFunction>(name, arity, std::move(table), def));
      open = false;
      continue;
    }
    if (!open) throw fail("pattern line outside a payoff block");
    body += line + "\n";
  }
  if (open) throw fail("unterminated payoff block '" + name + "'");
}

}  // namespace phylocsp
