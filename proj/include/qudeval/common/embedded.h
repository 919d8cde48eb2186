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

#ifndef QUDEVAL_COMMON_EMBEDDED_H_
#define QUDEVAL_COMMON_EMBEDDED_H_

#include <span>
#include <string_view>

namespace qudeval {

// A data file compiled into the binary (see cmake/EmbedFiles.cmake).
struct EmbeddedFile {
  std::string_view name;
  std::string_view content;
};

// data/lexicons/*
std::span<const EmbeddedFile> EmbeddedLexiconFiles();
// data/prompts/*
std::span<const EmbeddedFile> EmbeddedPromptFiles();

}  // namespace qudeval

#endif  // QUDEVAL_COMMON_EMBEDDED_H_
