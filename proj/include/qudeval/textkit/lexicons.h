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

#ifndef QUDEVAL_TEXTKIT_LEXICONS_H_
#define QUDEVAL_TEXTKIT_LEXICONS_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qudeval/common/embedded.h"

namespace qudeval::textkit {

// One inflectional rewrite: strip `suffix`, append `replacement`.
struct SuffixRule {
  std::string suffix;
  std::string replacement;
  int min_stem = 1;         // characters that must remain before the suffix
  std::string no_after;     // rule blocked if the stem ends in one of these
  bool needs_vowel = false;  // stem must contain a vowel
  bool restore = false;      // run e-restoration / undoubling on the stem
};

// Word lists and rewrite rules shared by the tokenizer, lemmatizer and
// chunker. Files follow the data/lexicons layout: one entry per line, '#'
// comments, irregular lemmas and suffix rules tab-separated.
class Lexicons {
 public:
  // The lexicons compiled into the binary.
  static const Lexicons& Default();
  static Lexicons FromDirectory(const std::filesystem::path& dir);
  static Lexicons FromFiles(std::span<const EmbeddedFile> files);

  // SHA-256 over every file (name and content, sorted by name).
  const std::string& hash() const { return hash_; }

  bool IsStopword(std::string_view w) const { return stopwords_.count(std::string(w)) > 0; }
  bool IsWh(std::string_view w) const { return wh_.count(std::string(w)) > 0; }
  bool IsPronoun(std::string_view w) const { return pronouns_.count(std::string(w)) > 0; }
  bool IsDeterminer(std::string_view w) const { return determiners_.count(std::string(w)) > 0; }
  bool IsClosedClass(std::string_view w) const { return closed_class_.count(std::string(w)) > 0; }
  bool IsVerb(std::string_view w) const { return verbs_.count(std::string(w)) > 0; }
  bool IsAdjective(std::string_view w) const { return adjectives_.count(std::string(w)) > 0; }
  bool IsNoun(std::string_view w) const { return nouns_.count(std::string(w)) > 0; }
  // Any open-class entry or irregular lemma.
  bool IsKnownWord(std::string_view w) const;
  // Function word in the stopword, wh or pronoun lists.
  bool IsFunctionWord(std::string_view w) const {
    return IsStopword(w) || IsWh(w) || IsPronoun(w);
  }

  std::optional<std::string_view> Irregular(std::string_view w) const;
  std::span<const SuffixRule> noun_rules() const { return noun_rules_; }
  std::span<const SuffixRule> verb_rules() const { return verb_rules_; }

 private:
  std::string hash_;
  std::unordered_set<std::string> stopwords_, wh_, pronouns_, determiners_,
      closed_class_, verbs_, adjectives_, nouns_, irregular_targets_;
  std::unordered_map<std::string, std::string> irregular_;
  std::vector<SuffixRule> noun_rules_, verb_rules_;
};

}  // namespace qudeval::textkit

#endif  // QUDEVAL_TEXTKIT_LEXICONS_H_
