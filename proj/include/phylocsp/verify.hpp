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

#ifndef PHYLOCSP_VERIFY_HPP_
#define PHYLOCSP_VERIFY_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "phylocsp/registry.hpp"

namespace phylocsp {

struct VerifyCheck {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool passed() const;
};

std::vector<std::string> verify_modules();

// Invariant suite. `filter` is empty or a comma-separated list of module
// names; unknown names raise ArgumentError.
VerifyReport run_verify(std::string_view filter, std::uint64_t seed);

// Parses an instance file and checks its invariants. Parse failures raise.
VerifyReport verify_instance_text(std::string_view text, const PayoffRegistry& registry);

}  // namespace phylocsp

#endif  // PHYLOCSP_VERIFY_HPP_
