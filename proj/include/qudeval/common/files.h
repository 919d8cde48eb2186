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

#ifndef QUDEVAL_COMMON_FILES_H_
#define QUDEVAL_COMMON_FILES_H_

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace qudeval {

std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temp file, flushes, then renames over `path`.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view data);

// Calls `fn(record, line_number)` for every non-blank line of a JSON-lines
// file. Parse errors are reported as SchemaViolation naming file and line.
void ForEachJsonLine(
    const std::filesystem::path& path,
    const std::function<void(const nlohmann::json&, int)>& fn);

// Serializes one record per line with a trailing newline.
std::string DumpJsonLine(const nlohmann::ordered_json& record);

}  // namespace qudeval

#endif  // QUDEVAL_COMMON_FILES_H_
