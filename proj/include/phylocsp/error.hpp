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

#ifndef PHYLOCSP_ERROR_HPP_
#define PHYLOCSP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace phylocsp {

// Bad input values, malformed files, violated preconditions.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// A leaf label, variable or payoff name that does not exist.
class NotFoundError : public std::out_of_range {
 public:
  explicit NotFoundError(const std::string& what) : std::out_of_range(what) {}
};

// An enumeration would exceed a configured size cap.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace phylocsp

#endif  // PHYLOCSP_ERROR_HPP_
