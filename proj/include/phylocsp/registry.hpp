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

#ifndef PHYLOCSP_REGISTRY_HPP_
#define PHYLOCSP_REGISTRY_HPP_

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "phylocsp/pattern.hpp"

namespace phylocsp {

// Named payoff functions. Besides explicitly added tables it resolves the
// built-in families: triplet, quartet, fstar-<delta>, split-right-<k>,
// split-left-<k> and one (the constant 1 on k slots, written one-<k>).
class PayoffRegistry {
 public:
  PayoffRegistry() = default;
  PayoffRegistry(const PayoffRegistry& other);
  PayoffRegistry& operator=(const PayoffRegistry& other);

  void add(std::shared_ptr<const PayoffFunction> f);
  // Throws NotFoundError for names that are neither added nor built in.
  std::shared_ptr<const PayoffFunction> get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

  // Registry file format:
  //   payoff <name> <arity> [default <x>] [unordered]
  //   ((x1,x2),x3) 1.0
  //   ...
  //   end
  void load(std::string_view text);

 private:
  std::map<std::string, std::shared_ptr<const PayoffFunction>, std::less<>> named_;
  mutable std::map<std::string, std::shared_ptr<const PayoffFunction>, std::less<>>
      builtin_cache_;
  mutable std::mutex mu_;
};

std::shared_ptr<const PayoffFunction> make_builtin_payoff(std::string_view name);

}  // namespace phylocsp

#endif  // PHYLOCSP_REGISTRY_HPP_
