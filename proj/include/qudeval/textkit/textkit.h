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

// Deterministic text processing: tokenization, rule-based lemmatization,
// content-word extraction and a small noun-phrase chunker.

#ifndef QUDEVAL_TEXTKIT_TEXTKIT_H_
#define QUDEVAL_TEXTKIT_TEXTKIT_H_

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qudeval/textkit/lexicons.h"

namespace qudeval::textkit {

enum class Tag : uint8_t {
  kContent = 1 << 0,
  kStopword = 1 << 1,
  kWh = 1 << 2,
  kPronoun = 1 << 3,
  kName = 1 << 4,
  kPunct = 1 << 5,
  kNumber = 1 << 6,
};

struct Token {
  std::string surface;
  std::string lower;
  std::string lemma;  // empty for punctuation
  size_t begin = 0;   // byte offsets into the source, [begin, end)
  size_t end = 0;
  uint8_t tags = 0;
  bool sentence_initial = false;

  bool Has(Tag t) const { return (tags & static_cast<uint8_t>(t)) != 0; }
  void Add(Tag t) { tags |= static_cast<uint8_t>(t); }
  void Remove(Tag t) { tags &= ~static_cast<uint8_t>(t); }
};

struct TokenizeOptions {
  // Whether the first word of the text starts a sentence. Questions and
  // document sentences do; fragments spliced from the middle of a sentence
  // should pass false so a leading capitalized word can be a name.
  bool starts_sentence = true;
};

// Whitespace split with leading/trailing punctuation peeled into separate
// tokens. Internal hyphens and apostrophes stay. Dotted abbreviations
// ("U.S.") and single initials keep their final period.
std::vector<Token> Tokenize(std::string_view text,
                            const Lexicons& lex = Lexicons::Default(),
                            TokenizeOptions options = {});

// Irregular table first, then the longest applicable suffix rule, repeated
// to a fixed point so the result is idempotent. Input is lowercased and a
// possessive "'s" is dropped.
std::string Lemmatize(std::string_view word,
                      const Lexicons& lex = Lexicons::Default());

// Lemmas of content tokens that are not names, in text order (a multiset).
std::vector<std::string> ContentLemmas(std::string_view text,
                                       const Lexicons& lex = Lexicons::Default(),
                                       TokenizeOptions options = {});
std::vector<std::string> ContentLemmas(const std::vector<Token>& tokens);
std::set<std::string> ContentLemmaSet(std::string_view text,
                                      const Lexicons& lex = Lexicons::Default());

// Lemma of every non-punctuation token.
std::vector<std::string> AllLemmas(const std::vector<Token>& tokens);

enum class Pos : uint8_t { kDet, kAdj, kNoun, kVerb, kOther };

std::string_view PosName(Pos pos);
std::vector<Pos> TagPos(const std::vector<Token>& tokens,
                        const Lexicons& lex = Lexicons::Default());

struct TokenSpan {
  size_t first = 0;  // token indices, [first, last)
  size_t last = 0;
  std::string text;  // the source substring covered by the span
  std::vector<Token> tokens;
};

// Longest DET? ADJ* NOUN+ chunk, the rightmost on ties. Throws NoNounPhrase.
TokenSpan MaxNounPhrase(std::string_view question,
                        const Lexicons& lex = Lexicons::Default());

// Matching free text returned by a model against article sentences.
// Lowercased word tokens joined by single spaces; punctuation and quote
// marks dropped.
std::string NormalizeForMatch(std::string_view text,
                              const Lexicons& lex = Lexicons::Default());
// Number of distinct lowercased word tokens shared by `a` and `b`.
int UnigramOverlap(std::string_view a, std::string_view b,
                   const Lexicons& lex = Lexicons::Default());

}  // namespace qudeval::textkit

#endif  // QUDEVAL_TEXTKIT_TEXTKIT_H_
