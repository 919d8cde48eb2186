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

#include "qudeval/textkit/textkit.h"

#include <algorithm>
#include <array>

#include "qudeval/common/error.h"

namespace qudeval::textkit {

namespace {

// Multi-byte punctuation recognized when peeling: curly quotes, dashes,
// ellipsis and guillemets.
constexpr std::array<std::string_view, 10> kUnicodePunct = {
    "‘", "’", "“", "”", "–",
    "\u2014", "…", "«", "»", "•"};

constexpr std::array<std::string_view, 8> kTitles = {
    "mr", "mrs", "ms", "dr", "st", "jr", "sr", "prof"};

bool IsSpace(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool IsAsciiPunct(unsigned char c) { return c < 0x80 && std::ispunct(c); }
bool IsAlpha(unsigned char c) { return c < 0x80 && std::isalpha(c); }
bool IsDigit(unsigned char c) { return c >= '0' && c <= '9'; }

// Length of the punctuation character starting at s[i], or 0.
size_t PunctAt(std::string_view s, size_t i) {
  if (IsAsciiPunct(s[i])) return 1;
  for (auto p : kUnicodePunct) {
    if (s.substr(i).starts_with(p)) return p.size();
  }
  return 0;
}

// Length of the punctuation character ending at s[end - 1], or 0.
size_t PunctBefore(std::string_view s, size_t end) {
  if (end == 0) return 0;
  if (IsAsciiPunct(s[end - 1])) return 1;
  for (auto p : kUnicodePunct) {
    if (end >= p.size() && s.substr(end - p.size(), p.size()) == p) return p.size();
  }
  return 0;
}

std::string Lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    // Fold the typographic apostrophe so lexicon lookups see one form.
    if (s.substr(i).starts_with("’")) {
      out.push_back('\'');
      i += 2;
      continue;
    }
    unsigned char c = s[i];
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
  }
  return out;
}

// Keeps the final period of "U.S." style abbreviations, single initials and
// common titles, so they do not read as sentence ends.
bool KeepsPeriod(std::string_view core) {
  if (core.empty()) return false;
  if (core.find('.') != std::string_view::npos) {
    return std::all_of(core.begin(), core.end(),
                       [](unsigned char c) { return IsAlpha(c) || c == '.'; });
  }
  if (core.size() == 1 && std::isupper(static_cast<unsigned char>(core[0]))) return true;
  std::string lower = Lower(core);
  return std::find(kTitles.begin(), kTitles.end(), lower) != kTitles.end();
}

bool IsVowel(const std::string& w, size_t i) {
  switch (w[i]) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return true;
    case 'y': return i > 0 && !IsVowel(w, i - 1);
    default: return false;
  }
}

bool HasVowel(const std::string& w) {
  for (size_t i = 0; i < w.size(); ++i) {
    if (IsVowel(w, i)) return true;
  }
  return false;
}

// Porter's measure: the number of vowel-consonant sequences.
int Measure(const std::string& w) {
  int m = 0;
  bool prev_vowel = false;
  for (size_t i = 0; i < w.size(); ++i) {
    bool v = IsVowel(w, i);
    if (!v && prev_vowel) ++m;
    prev_vowel = v;
  }
  return m;
}

bool EndsCvc(const std::string& w) {
  size_t n = w.size();
  if (n < 3) return false;
  char last = w[n - 1];
  return !IsVowel(w, n - 1) && IsVowel(w, n - 2) && !IsVowel(w, n - 3) &&
         last != 'w' && last != 'x' && last != 'y';
}

bool EndsDoubleConsonant(const std::string& w) {
  size_t n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && !IsVowel(w, n - 1);
}

std::string RestoreStem(const std::string& stem, const Lexicons& lex) {
  bool doubled = EndsDoubleConsonant(stem) && std::string_view("lsz").find(stem.back()) ==
                                                  std::string_view::npos;
  if (doubled) {
    std::string undoubled = stem.substr(0, stem.size() - 1);
    if (lex.IsKnownWord(undoubled)) return undoubled;
  }
  if (lex.IsKnownWord(stem + "e")) return stem + "e";
  if (lex.IsKnownWord(stem)) return stem;
  if (stem.ends_with("at") || stem.ends_with("bl") || stem.ends_with("iz")) {
    return stem + "e";
  }
  if (doubled) return stem.substr(0, stem.size() - 1);
  if (Measure(stem) == 1 && EndsCvc(stem)) return stem + "e";
  return stem;
}

bool RuleApplies(const SuffixRule& rule, const std::string& w) {
  if (!w.ends_with(rule.suffix)) return false;
  std::string stem = w.substr(0, w.size() - rule.suffix.size());
  if (static_cast<int>(stem.size()) < rule.min_stem) return false;
  if (!rule.no_after.empty() && !stem.empty() &&
      rule.no_after.find(stem.back()) != std::string::npos) {
    return false;
  }
  if (rule.needs_vowel && !HasVowel(stem)) return false;
  return true;
}

std::string LemmaStep(const std::string& w, const Lexicons& lex) {
  if (auto irregular = lex.Irregular(w)) return std::string(*irregular);
  const SuffixRule* best = nullptr;
  for (auto rules : {lex.noun_rules(), lex.verb_rules()}) {
    for (const auto& rule : rules) {
      if ((!best || rule.suffix.size() > best->suffix.size()) && RuleApplies(rule, w)) {
        best = &rule;
      }
    }
  }
  if (!best) return w;
  std::string stem = w.substr(0, w.size() - best->suffix.size());
  if (best->restore) return RestoreStem(stem, lex);
  return stem + best->replacement;
}

std::string NormalizeWord(std::string_view word) {
  std::string w = Lower(word);
  if (w.ends_with("'s")) {
    w.resize(w.size() - 2);
  } else if (w.size() > 1 && w.back() == '\'') {
    w.pop_back();
  }
  return w;
}

bool IsSentenceEnd(const Token& t) {
  return t.Has(Tag::kPunct) && (t.surface == "." || t.surface == "!" ||
                                t.surface == "?" || t.surface == "…");
}

bool StartsUpper(std::string_view s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

void AddWordToken(std::string_view text, size_t begin, size_t end,
                  const Lexicons& lex, std::vector<Token>* out) {
  Token t;
  t.surface = std::string(text.substr(begin, end - begin));
  t.lower = Lower(t.surface);
  t.begin = begin;
  t.end = end;
  bool has_digit = std::any_of(t.surface.begin(), t.surface.end(),
                               [](unsigned char c) { return IsDigit(c); });
  bool has_alpha = std::any_of(t.surface.begin(), t.surface.end(),
                               [](unsigned char c) { return IsAlpha(c) || c >= 0x80; });
  std::string bare = NormalizeWord(t.surface);
  if (has_digit && !has_alpha) {
    t.Add(Tag::kNumber);
  } else {
    if (lex.IsStopword(t.lower) || lex.IsStopword(bare)) t.Add(Tag::kStopword);
    if (lex.IsWh(t.lower) || lex.IsWh(bare)) t.Add(Tag::kWh);
    if (lex.IsPronoun(t.lower) || lex.IsPronoun(bare)) t.Add(Tag::kPronoun);
    if (!t.Has(Tag::kStopword) && !t.Has(Tag::kWh) && !t.Has(Tag::kPronoun)) {
      t.Add(Tag::kContent);
    }
  }
  t.lemma = Lemmatize(t.surface, lex);
  out->push_back(std::move(t));
}

void AddPunctToken(std::string_view text, size_t begin, size_t end,
                   std::vector<Token>* out) {
  Token t;
  t.surface = std::string(text.substr(begin, end - begin));
  t.lower = Lower(t.surface);
  t.begin = begin;
  t.end = end;
  t.Add(Tag::kPunct);
  out->push_back(std::move(t));
}

void SplitChunk(std::string_view text, size_t begin, size_t end,
                const Lexicons& lex, std::vector<Token>* out) {
  size_t lo = begin;
  size_t hi = end;
  std::vector<std::pair<size_t, size_t>> leading;
  while (lo < hi) {
    size_t n = PunctAt(text, lo);
    if (n == 0) break;
    leading.emplace_back(lo, lo + n);
    lo += n;
  }
  std::vector<std::pair<size_t, size_t>> trailing;
  while (hi > lo) {
    size_t n = PunctBefore(text.substr(0, hi), hi);
    if (n == 0) break;
    if (n == 1 && text[hi - 1] == '.' && KeepsPeriod(text.substr(lo, hi - 1 - lo))) break;
    trailing.emplace_back(hi - n, hi);
    hi -= n;
  }
  for (auto [b, e] : leading) AddPunctToken(text, b, e, out);
  if (lo < hi) AddWordToken(text, lo, hi, lex, out);
  for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) {
    AddPunctToken(text, it->first, it->second, out);
  }
}

bool IsHyphenated(const std::string& w) {
  size_t dash = w.find('-');
  return dash != std::string::npos && dash > 0 && dash + 1 < w.size();
}

enum class Candidate { kNone, kVerb, kParticiple };

bool IsAuxiliaryContext(const Token& prev) {
  static const std::array<std::string_view, 15> kAux = {
      "to",    "do",     "does",  "did",  "will", "would", "can", "could",
      "shall", "should", "may",   "might", "must", "not",  "n't"};
  return std::find(kAux.begin(), kAux.end(), prev.lower) != kAux.end();
}

// Tag from the open-class lexicons and suffix shapes alone.
Pos OpenClassPos(const std::string& lower, const std::string& lemma,
                 const Lexicons& lex, Candidate* candidate) {
  *candidate = Candidate::kNone;
  bool verbish = lex.IsVerb(lower) || (lemma != lower && lex.IsVerb(lemma));
  if (lex.IsNoun(lower) || lex.IsNoun(lemma)) {
    if (verbish) *candidate = Candidate::kVerb;
    return Pos::kNoun;
  }
  if (lex.IsAdjective(lower)) return Pos::kAdj;
  if (verbish) {
    bool participle = lower.ends_with("ed") || lower.ends_with("ing") ||
                      lex.Irregular(lower).has_value();
    *candidate = participle ? Candidate::kParticiple : Candidate::kVerb;
    return Pos::kVerb;
  }
  auto has = [&](std::string_view suffix) {
    return lower.size() >= suffix.size() + 3 && lower.ends_with(suffix);
  };
  for (auto s : {"tion", "sion", "ment", "ness", "ity", "ship", "ance", "ence",
                 "ism", "ist", "ure", "age"}) {
    if (has(s)) return Pos::kNoun;
  }
  for (auto s : {"ous", "ive", "al", "ful", "less", "able", "ible", "ic", "ish"}) {
    if (has(s)) return Pos::kAdj;
  }
  if (has("ly")) return Pos::kOther;
  return Pos::kNoun;
}

}  // namespace

std::vector<Token> Tokenize(std::string_view text, const Lexicons& lex,
                            TokenizeOptions options) {
  std::vector<Token> tokens;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && IsSpace(text[i])) ++i;
    size_t start = i;
    while (i < text.size() && !IsSpace(text[i])) ++i;
    if (i > start) SplitChunk(text, start, i, lex, &tokens);
  }

  bool at_start = options.starts_sentence;
  for (auto& t : tokens) {
    if (t.Has(Tag::kPunct)) {
      if (IsSentenceEnd(t)) at_start = true;
      continue;
    }
    t.sentence_initial = at_start;
    at_start = false;
  }

  for (auto& t : tokens) {
    if (t.Has(Tag::kContent) && StartsUpper(t.surface) && !t.sentence_initial) {
      t.Add(Tag::kName);
    }
  }
  // A capitalized sentence-initial word directly followed by a name is the
  // first half of a multi-word name ("Marco Flagg offers ...").
  for (size_t k = tokens.size(); k-- > 1;) {
    Token& t = tokens[k - 1];
    if (t.sentence_initial && t.Has(Tag::kContent) && StartsUpper(t.surface) &&
        tokens[k].Has(Tag::kName)) {
      t.Add(Tag::kName);
    }
  }
  return tokens;
}

std::string Lemmatize(std::string_view word, const Lexicons& lex) {
  std::string w = NormalizeWord(word);
  for (int step = 0; step < 16; ++step) {
    std::string next = LemmaStep(w, lex);
    if (next == w) break;
    w = std::move(next);
  }
  return w;
}

std::vector<std::string> ContentLemmas(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (t.Has(Tag::kContent) && !t.Has(Tag::kName) && !t.lemma.empty()) {
      out.push_back(t.lemma);
    }
  }
  return out;
}

std::vector<std::string> ContentLemmas(std::string_view text, const Lexicons& lex,
                                       TokenizeOptions options) {
  return ContentLemmas(Tokenize(text, lex, options));
}

std::set<std::string> ContentLemmaSet(std::string_view text, const Lexicons& lex) {
  auto lemmas = ContentLemmas(text, lex);
  return {lemmas.begin(), lemmas.end()};
}

std::vector<std::string> AllLemmas(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (!t.Has(Tag::kPunct)) out.push_back(t.lemma);
  }
  return out;
}

std::string_view PosName(Pos pos) {
  switch (pos) {
    case Pos::kDet: return "DET";
    case Pos::kAdj: return "ADJ";
    case Pos::kNoun: return "NOUN";
    case Pos::kVerb: return "VERB";
    case Pos::kOther: return "OTHER";
  }
  return "";
}

std::vector<Pos> TagPos(const std::vector<Token>& tokens, const Lexicons& lex) {
  std::vector<Pos> pos(tokens.size(), Pos::kOther);
  std::vector<Candidate> candidate(tokens.size(), Candidate::kNone);
  for (size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    std::string bare = NormalizeWord(t.surface);
    if (t.Has(Tag::kPunct)) {
      pos[i] = Pos::kOther;
    } else if (lex.IsDeterminer(bare)) {
      pos[i] = Pos::kDet;
    } else if (t.Has(Tag::kWh) || t.Has(Tag::kPronoun) || lex.IsClosedClass(bare) ||
               t.Has(Tag::kStopword)) {
      pos[i] = Pos::kOther;
    } else if (t.Has(Tag::kNumber)) {
      pos[i] = Pos::kAdj;
    } else if (t.Has(Tag::kName)) {
      pos[i] = Pos::kNoun;
    } else if (IsHyphenated(bare) && !lex.IsKnownWord(bare)) {
      // Compounds take the category of their head, defaulting to NOUN
      // ("buy-out", "management-labor", "well-known").
      std::string head = bare.substr(bare.rfind('-') + 1);
      Candidate ignored;
      Pos head_pos = OpenClassPos(head, Lemmatize(head, lex), lex, &ignored);
      pos[i] = head_pos == Pos::kAdj ? Pos::kAdj : Pos::kNoun;
    } else {
      pos[i] = OpenClassPos(bare, t.lemma, lex, &candidate[i]);
    }
  }

  // Contextual repairs. A noun/verb homograph after "to" or an auxiliary is a
  // verb; a verb form after a determiner or adjective is nominal, with
  // participles becoming adjectives when a noun follows.
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (candidate[i] == Candidate::kNone) continue;
    Pos prev = i > 0 ? pos[i - 1] : Pos::kOther;
    bool after_modifier = prev == Pos::kDet || prev == Pos::kAdj;
    if (pos[i] == Pos::kNoun) {
      if (i > 0 && (IsAuxiliaryContext(tokens[i - 1]) ||
                    (tokens[i - 1].Has(Tag::kPronoun) && pos[i - 1] != Pos::kDet))) {
        pos[i] = Pos::kVerb;
      }
      continue;
    }
    if (!after_modifier) continue;
    if (candidate[i] == Candidate::kParticiple) {
      bool noun_follows = i + 1 < tokens.size() &&
                          (pos[i + 1] == Pos::kNoun || pos[i + 1] == Pos::kAdj);
      pos[i] = noun_follows ? Pos::kAdj : Pos::kNoun;
    } else {
      pos[i] = Pos::kNoun;
    }
  }
  return pos;
}

TokenSpan MaxNounPhrase(std::string_view question, const Lexicons& lex) {
  auto tokens = Tokenize(question, lex);
  auto pos = TagPos(tokens, lex);
  size_t best_first = 0;
  size_t best_len = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    size_t j = i;
    if (pos[j] == Pos::kDet) ++j;
    while (j < pos.size() && pos[j] == Pos::kAdj) ++j;
    size_t k = j;
    while (k < pos.size() && pos[k] == Pos::kNoun) ++k;
    if (k == j) continue;
    if (k - i >= best_len) {
      best_len = k - i;
      best_first = i;
    }
  }
  if (best_len == 0) {
    throw Error(ErrorCode::kNoNounPhrase,
                "no DET? ADJ* NOUN+ chunk in \"" + std::string(question) + "\"");
  }
  TokenSpan span;
  span.first = best_first;
  span.last = best_first + best_len;
  size_t begin = tokens[span.first].begin;
  size_t end = tokens[span.last - 1].end;
  span.text = std::string(question.substr(begin, end - begin));
  span.tokens.assign(tokens.begin() + span.first, tokens.begin() + span.last);
  return span;
}

namespace {

std::set<std::string> WordSet(std::string_view text, const Lexicons& lex) {
  std::set<std::string> out;
  for (const auto& t : Tokenize(text, lex)) {
    if (!t.Has(Tag::kPunct)) out.insert(t.lower);
  }
  return out;
}

}  // namespace

std::string NormalizeForMatch(std::string_view text, const Lexicons& lex) {
  std::string out;
  for (const auto& t : Tokenize(text, lex)) {
    if (t.Has(Tag::kPunct)) continue;
    if (!out.empty()) out += ' ';
    out += t.lower;
  }
  return out;
}

int UnigramOverlap(std::string_view a, std::string_view b, const Lexicons& lex) {
  auto wa = WordSet(a, lex);
  auto wb = WordSet(b, lex);
  int n = 0;
  for (const auto& w : wa) n += static_cast<int>(wb.count(w));
  return n;
}

}  // namespace qudeval::textkit
