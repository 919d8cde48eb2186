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

#include "qudeval/textkit/lexicons.h"

#include <algorithm>
#include <map>
#include <sstream>

#include "qudeval/common/error.h"
#include "qudeval/common/files.h"
#include "qudeval/common/hash.h"

namespace qudeval::textkit {

namespace {

constexpr std::string_view kWordLists[] = {
    "stopwords.txt", "wh_words.txt", "pronouns.txt",  "determiners.txt",
    "closed_class.txt", "verbs.txt", "adjectives.txt", "nouns.txt"};
constexpr std::string_view kIrregular = "irregular_lemmas.tsv";
constexpr std::string_view kNounRules = "noun_suffixes.tsv";
constexpr std::string_view kVerbRules = "verb_suffixes.tsv";

std::string Trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Non-comment, non-blank lines with the trailing CR removed.
std::vector<std::string> DataLines(std::string_view content) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = Trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::vector<SuffixRule> ParseRules(std::string_view name, std::string_view content) {
  std::vector<SuffixRule> rules;
  for (const auto& line : DataLines(content)) {
    auto fields = SplitTabs(line);
    if (fields.size() != 4) {
      throw Error(ErrorCode::kSchemaViolation,
                  std::string(name) + ": expected 4 tab-separated fields: " + line);
    }
    SuffixRule rule;
    rule.suffix = Trim(fields[0]);
    rule.replacement = Trim(fields[1]);
    rule.min_stem = std::stoi(fields[2]);
    std::string flags = Trim(fields[3]);
    if (flags != "-") {
      std::istringstream fs(flags);
      std::string flag;
      while (std::getline(fs, flag, ',')) {
        if (flag == "vowel") {
          rule.needs_vowel = true;
        } else if (flag == "restore") {
          rule.restore = true;
        } else if (flag.starts_with("no-after=")) {
          rule.no_after = flag.substr(9);
        } else {
          throw Error(ErrorCode::kSchemaViolation,
                      std::string(name) + ": unknown flag " + flag);
        }
      }
    }
    if (rule.suffix.empty()) {
      throw Error(ErrorCode::kSchemaViolation, std::string(name) + ": empty suffix");
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

}  // namespace

const Lexicons& Lexicons::Default() {
  static const Lexicons kDefault = FromFiles(EmbeddedLexiconFiles());
  return kDefault;
}

Lexicons Lexicons::FromDirectory(const std::filesystem::path& dir) {
  std::vector<std::string> contents;
  std::vector<std::string> names;
  for (auto n : kWordLists) names.emplace_back(n);
  names.emplace_back(kIrregular);
  names.emplace_back(kNounRules);
  names.emplace_back(kVerbRules);
  for (const auto& n : names) contents.push_back(ReadFile(dir / n));
  std::vector<EmbeddedFile> files;
  for (size_t i = 0; i < names.size(); ++i) files.push_back({names[i], contents[i]});
  return FromFiles(files);
}

Lexicons Lexicons::FromFiles(std::span<const EmbeddedFile> files) {
  std::map<std::string_view, std::string_view> by_name;
  for (const auto& f : files) by_name[f.name] = f.content;
  auto get = [&](std::string_view name) {
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw Error(ErrorCode::kIo, "lexicon file missing: " + std::string(name));
    }
    return it->second;
  };

  Lexicons lex;
  std::unordered_set<std::string>* sets[] = {
      &lex.stopwords_, &lex.wh_,    &lex.pronouns_,   &lex.determiners_,
      &lex.closed_class_, &lex.verbs_, &lex.adjectives_, &lex.nouns_};
  for (size_t i = 0; i < std::size(kWordLists); ++i) {
    for (const auto& line : DataLines(get(kWordLists[i]))) sets[i]->insert(Trim(line));
  }
  for (const auto& line : DataLines(get(kIrregular))) {
    auto fields = SplitTabs(line);
    if (fields.size() != 2) {
      throw Error(ErrorCode::kSchemaViolation,
                  std::string(kIrregular) + ": expected surface<TAB>lemma: " + line);
    }
    lex.irregular_[Trim(fields[0])] = Trim(fields[1]);
    lex.irregular_targets_.insert(Trim(fields[1]));
  }
  lex.noun_rules_ = ParseRules(kNounRules, get(kNounRules));
  lex.verb_rules_ = ParseRules(kVerbRules, get(kVerbRules));

  Sha256Builder hasher;
  for (const auto& [name, content] : by_name) {
    hasher.Update(name);
    hasher.Update(std::string_view("\0", 1));
    hasher.Update(content);
    hasher.Update(std::string_view("\0", 1));
  }
  lex.hash_ = hasher.FinishHex();
  return lex;
}

bool Lexicons::IsKnownWord(std::string_view w) const {
  std::string key(w);
  return verbs_.count(key) || nouns_.count(key) || adjectives_.count(key) ||
         irregular_targets_.count(key);
}

std::optional<std::string_view> Lexicons::Irregular(std::string_view w) const {
  auto it = irregular_.find(std::string(w));
  if (it == irregular_.end()) return std::nullopt;
  return it->second;
}

}  // namespace qudeval::textkit
