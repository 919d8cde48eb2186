// Copyright 2026 The QUDeval Toolkit Authors.
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


// The qudeval command-line tool.

#ifndef QUDEVAL_CLI_APP_H_
#define QUDEVAL_CLI_APP_H_

#include <ostream>
#include <string>
#include <vector>

namespace qudeval::cli {

inline constexpr char kVersion[] = "0.1.0";

// Runs one command line; `args` excludes the program name. Reports go to
// `out`, diagnostics to `err`. Returns 0 on success, 1 on a validation
// error, 2 on an I/O or provider error and 64 on a usage error.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qudeval::cli

#endif  // QUDEVAL_CLI_APP_H_
