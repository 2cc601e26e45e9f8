// Copyright 2026 The FunGrasp Lab Authors
//
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

#ifndef FUNGRASP_ERROR_H_
#define FUNGRASP_ERROR_H_

#include <stdexcept>
#include <string>

namespace fungrasp {

// Raised for problems with user-supplied inputs: malformed files, schema
// violations, invalid configuration. The CLI maps it to exit status 1; any
// other exception is treated as an internal error.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fungrasp

#endif  // FUNGRASP_ERROR_H_
