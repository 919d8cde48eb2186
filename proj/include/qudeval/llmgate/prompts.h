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


// Prompt templates with {{slot}} placeholders. The built-in set is compiled
// in from data/prompts; template ids are the file names without ".txt".

#ifndef QUDEVAL_LLMGATE_PROMPTS_H_
#define QUDEVAL_LLMGATE_PROMPTS_H_

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qudeval/common/embedded.h"

namespace qudeval::llmgate {

// Ids of the built-in templates.
inline constexpr char kQuestionGenTemplate[] = "qgen-fs";
inline constexpr char kAnchorTemplate[] = "anchor-fs";
inline constexpr char kCompScoreTemplate[] = "gpt-scr-comp";
inline constexpr char kRelvScoreTemplate[] = "gpt-scr-relv";
inline constexpr char kGptAnsAnswerTemplate[] = "gpt-ans-answer";
inline constexpr char kGptAnsClosestTemplate[] = "gpt-ans-closest";
inline constexpr char kSimilarityTemplate[] = "llm-sim";
inline constexpr char kGivnZeroShotTemplate[] = "gpt-cls-zs-givn";
inline constexpr char kGivnFewShotTemplate[] = "gpt-cls-fs-givn";
inline constexpr char kRelvZeroShotTemplate[] = "gpt-cls-zs-relv";
inline constexpr char kRelvFewShotTemplate[] = "gpt-cls-fs-relv";
inline constexpr char kRepromptTemplate[] = "reprompt-option";

using Slots = std::map<std::string, std::string, std::less<>>;

struct PromptTemplate {
  std::string template_id;
  std::string body;
  std::set<std::string> required_slots;  // every {{name}} in the body
  std::string source;                    // file the body was read from
};

// Parses a body, collecting its placeholders. A "{{" without a closing
// "}}" or with an empty or non-identifier name throws InvariantViolation.
PromptTemplate ParseTemplate(std::string template_id, std::string body, std::string source);

// Single-pass substitution: slot values are inserted verbatim and never
// re-scanned. Extra slots are ignored. Throws MissingSlot naming the first
// absent slot.
std::string RenderTemplate(const PromptTemplate& tmpl, const Slots& slots);

class PromptLibrary {
 public:
  // The templates compiled into the binary.
  static const PromptLibrary& Default();
  // Every *.txt file in `dir`.
  static PromptLibrary FromDirectory(const std::filesystem::path& dir);
  static PromptLibrary FromFiles(std::span<const EmbeddedFile> files);

  // Throws UnknownTemplate.
  const PromptTemplate& Get(std::string_view template_id) const;
  std::string Render(std::string_view template_id, const Slots& slots) const;
  std::vector<std::string> ids() const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace qudeval::llmgate

#endif  // QUDEVAL_LLMGATE_PROMPTS_H_
