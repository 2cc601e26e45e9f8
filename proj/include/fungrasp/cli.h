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

#ifndef FUNGRASP_CLI_H_
#define FUNGRASP_CLI_H_

namespace fungrasp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

// Parses argv and runs one subcommand. Never throws.
int RunCli(int argc, const char* const* argv);

}  // namespace fungrasp

#endif  // FUNGRASP_CLI_H_
