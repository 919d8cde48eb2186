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


#include "qudeval/llmgate/prompts.h"

#include <algorithm>
#include <cctype>

#include "qudeval/common/error.h"
#include "qudeval/common/files.h"

namespace qudeval::llmgate {

namespace {

constexpr std::string_view kOpen = "{{";
constexpr std::string_view kClose = "}}";

bool IsSlotName(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

std::string StripTxt(std::string_view file_name) {
  std::string id(file_name);
  if (id.size() > 4 && id.ends_with(".txt")) id.resize(id.size() - 4);
  return id;
}

// Files end with a newline; the prompt itself does not.
std::string TrimFinalNewline(std::string_view body) {
  if (body.ends_with('\n')) body.remove_suffix(1);
  return std::string(body);
}

}  // namespace

PromptTemplate ParseTemplate(std::string template_id, std::string body, std::string source) {
  PromptTemplate t{std::move(template_id), std::move(body), {}, std::move(source)};
  size_t pos = 0;
  while ((pos = t.body.find(kOpen, pos)) != std::string::npos) {
    size_t end = t.body.find(kClose, pos + kOpen.size());
    std::string_view name =
        end == std::string::npos
            ? std::string_view()
            : std::string_view(t.body).substr(pos + kOpen.size(), end - pos - kOpen.size());
    if (!IsSlotName(name)) {
      throw Error(ErrorCode::kInvariantViolation,
                  "template " + t.template_id + ": malformed placeholder at offset " +
                      std::to_string(pos));
    }
    t.required_slots.emplace(name);
    pos = end + kClose.size();
  }
  return t;
}

std::string RenderTemplate(const PromptTemplate& tmpl, const Slots& slots) {
  for (const auto& name : tmpl.required_slots) {
    if (!slots.contains(name)) {
      throw Error(ErrorCode::kMissingSlot,
                  "template " + tmpl.template_id + " needs slot \"" + name + "\"");
    }
  }
  std::string out;
  out.reserve(tmpl.body.size());
  size_t pos = 0;
  while (true) {
    size_t open = tmpl.body.find(kOpen, pos);
    if (open == std::string::npos) break;
    size_t close = tmpl.body.find(kClose, open + kOpen.size());
    out.append(tmpl.body, pos, open - pos);
    auto name = std::string_view(tmpl.body).substr(open + kOpen.size(),
                                                   close - open - kOpen.size());
    out += slots.find(name)->second;
    pos = close + kClose.size();
  }
  out.append(tmpl.body, pos);
  return out;
}

const PromptLibrary& PromptLibrary::Default() {
  static const PromptLibrary* library = new PromptLibrary(FromFiles(EmbeddedPromptFiles()));
  return *library;
}

PromptLibrary PromptLibrary::FromDirectory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kIo, "prompt directory not found: " + dir.string());
  }
  PromptLibrary library;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::string id = StripTxt(entry.path().filename().string());
    library.templates_[id] =
        ParseTemplate(id, TrimFinalNewline(ReadFile(entry.path())), entry.path().string());
  }
  return library;
}

PromptLibrary PromptLibrary::FromFiles(std::span<const EmbeddedFile> files) {
  PromptLibrary library;
  for (const auto& f : files) {
    if (!f.name.ends_with(".txt")) continue;
    std::string id = StripTxt(f.name);
    library.templates_[id] =
        ParseTemplate(id, TrimFinalNewline(f.content), "data/prompts/" + std::string(f.name));
  }
  return library;
}

const PromptTemplate& PromptLibrary::Get(std::string_view template_id) const {
  auto it = templates_.find(template_id);
  if (it == templates_.end()) {
    throw Error(ErrorCode::kUnknownTemplate,
                "unknown prompt template \"" + std::string(template_id) + "\"");
  }
  return it->second;
}

std::string PromptLibrary::Render(std::string_view template_id, const Slots& slots) const {
  return RenderTemplate(Get(template_id), slots);
}

std::vector<std::string> PromptLibrary::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, t] : templates_) out.push_back(id);
  return out;
}

}  // namespace qudeval::llmgate
