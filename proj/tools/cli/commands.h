// Copyright 2026 The mgre Authors.
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

// Subcommand dispatch for the mgre command-line tool.

#ifndef MGRE_TOOLS_CLI_COMMANDS_H_
#define MGRE_TOOLS_CLI_COMMANDS_H_

#include <ostream>

namespace mgre::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Parses the arguments and runs one subcommand (prepare, train, eval,
// predict, stats, sweep). Primary results go to `out`, diagnostics to `err`.
int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace mgre::cli

#endif  // MGRE_TOOLS_CLI_COMMANDS_H_
