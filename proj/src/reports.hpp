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

#ifndef PHYLOCSP_SRC_REPORTS_HPP_
#define PHYLOCSP_SRC_REPORTS_HPP_

#include <cstdint>
#include <span>
#include <string>

#include "json.hpp"
#include "phylocsp/coarse.hpp"
#include "phylocsp/gap_instance.hpp"
#include "phylocsp/instance.hpp"
#include "phylocsp/random_assignment.hpp"
#include "phylocsp/verify.hpp"

namespace phylocsp::reports {

using nlohmann::json;

json header(const std::string& command, std::uint64_t seed, json caps);

json solve_brute(const Instance& inst, int cap, std::uint64_t seed);
json solve_order(const Instance& inst, std::span<const int> order, int cap,
                 std::uint64_t seed);
json solve_random(const Instance& inst, std::uint64_t trials, std::uint64_t seed);
json solve_random(const PayoffFunction& f, std::uint64_t trials, std::uint64_t seed);
json alpha_search(const PayoffFunction& f, const SearchOptions& opts, std::uint64_t seed);
json gap_order(const GapSpec& spec, int num_orders, bool exhaustive, std::uint64_t seed);
json monochrome(const Instance& inst, const std::string& source, const MonochromeOptions& opt);
json divergence(int k, int d, int q, const std::string& labeling, int trials, std::uint64_t seed);
json coupling(int M, int dprime, int k, std::uint64_t trials, double eta, std::uint64_t seed);
json verify(const VerifyReport& rep, const std::string& filter, std::uint64_t seed);

}  // namespace phylocsp::reports

#endif  // PHYLOCSP_SRC_REPORTS_HPP_
