// Copyright 2026 The MTEAD Authors. All Rights Reserved.
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

#ifndef MTEAD_CLI_H_
#define MTEAD_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace mtead {

// Exit codes of RunCli.
constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Runs one `mtead` invocation. `args` excludes the program name, e.g.
// {"score", "--ref", "a.rttm", "--hyp", "b.rttm"}.
int RunCli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace mtead

#endif  // MTEAD_CLI_H_
