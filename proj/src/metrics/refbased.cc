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

#include "qudeval/metrics/refbased.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"
#include "qudeval/common/error.h"
#include "qudeval/common/url.h"

namespace qudeval::metrics {

namespace {

using textkit::Tag;
using textkit::Token;

std::vector<std::string> LowerTokens(std::string_view text, const Lexicons& lex,
                                     bool keep_punct) {
  std::vector<std::string> out;
  for (const auto& t : textkit::Tokenize(text, lex)) {
    if (!keep_punct && t.Has(Tag::kPunct)) continue;
    out.push_back(t.lower);
  }
  return out;
}

std::unordered_map<std::string, int> Counts(const std::vector<std::string>& tokens) {
  std::unordered_map<std::string, int> counts;
  for (const auto& t : tokens) ++counts[t];
  return counts;
}

int ClippedOverlap(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  auto ref_counts = Counts(ref);
  int overlap = 0;
  for (const auto& [tok, n] : Counts(cand)) {
    auto it = ref_counts.find(tok);
    if (it != ref_counts.end()) overlap += std::min(n, it->second);
  }
  return overlap;
}

uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<double> MeanVector(const std::vector<std::vector<double>>& vs) {
  if (vs.empty()) return {};
  std::vector<double> mean(vs.front().size(), 0.0);
  for (const auto& v : vs) {
    for (size_t i = 0; i < v.size() && i < mean.size(); ++i) mean[i] += v[i];
  }
  for (auto& x : mean) x /= static_cast<double>(vs.size());
  return mean;
}

}  // namespace

double Bleu1(std::string_view candidate, std::string_view reference, const Lexicons& lex) {
  auto cand = LowerTokens(candidate, lex, /*keep_punct=*/true);
  auto ref = LowerTokens(reference, lex, /*keep_punct=*/true);
  if (cand.empty() || ref.empty()) return 0.0;
  double c = static_cast<double>(cand.size());
  double r = static_cast<double>(ref.size());
  double p1 = ClippedOverlap(cand, ref) / c;
  double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return p1 * bp;
}

double Rouge1F1(std::string_view candidate, std::string_view reference, const Lexicons& lex) {
  auto cand = LowerTokens(candidate, lex, /*keep_punct=*/false);
  auto ref = LowerTokens(reference, lex, /*keep_punct=*/false);
  if (cand.empty() || ref.empty()) return 0.0;
  double overlap = ClippedOverlap(cand, ref);
  double p = overlap / static_cast<double>(cand.size());
  double r = overlap / static_cast<double>(ref.size());
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

MeteorDetail MeteorLiteDetail(std::string_view candidate, std::string_view reference,
                              const Lexicons& lex, const SynonymTable* synonyms) {
  auto word_tokens = [&](std::string_view text) {
    std::vector<Token> out;
    for (auto& t : textkit::Tokenize(text, lex)) {
      if (!t.Has(Tag::kPunct)) out.push_back(std::move(t));
    }
    return out;
  };
  auto cand = word_tokens(candidate);
  auto ref = word_tokens(reference);
  MeteorDetail d;
  if (cand.empty() || ref.empty()) return d;

  auto synonymous = [&](const Token& a, const Token& b) {
    if (synonyms == nullptr) return false;
    for (const auto& [x, y] : {std::pair{&a, &b}, std::pair{&b, &a}}) {
      for (const auto& key : {x->lower, x->lemma}) {
        auto it = synonyms->find(key);
        if (it != synonyms->end() && (it->second.count(y->lower) || it->second.count(y->lemma))) {
          return true;
        }
      }
    }
    return false;
  };
  using Matcher = std::function<bool(const Token&, const Token&)>;
  const std::vector<Matcher> stages = {
      [](const Token& a, const Token& b) { return a.lower == b.lower; },
      [](const Token& a, const Token& b) { return a.lemma == b.lemma; },
      synonymous,
  };

  std::vector<int> align(cand.size(), -1);
  std::vector<bool> ref_used(ref.size(), false);
  for (const auto& matches : stages) {
    for (size_t i = 0; i < cand.size(); ++i) {
      if (align[i] >= 0) continue;
      // Prefer continuing the previous token's alignment to keep chunks long.
      int preferred = (i > 0 && align[i - 1] >= 0) ? align[i - 1] + 1 : -1;
      int chosen = -1;
      for (size_t j = 0; j < ref.size(); ++j) {
        if (ref_used[j] || !matches(cand[i], ref[j])) continue;
        if (static_cast<int>(j) == preferred) {
          chosen = static_cast<int>(j);
          break;
        }
        if (chosen < 0) chosen = static_cast<int>(j);
      }
      if (chosen >= 0) {
        align[i] = chosen;
        ref_used[chosen] = true;
      }
    }
  }

  int prev_ref = -2;
  bool prev_matched = false;
  for (size_t i = 0; i < cand.size(); ++i) {
    if (align[i] < 0) {
      prev_matched = false;
      continue;
    }
    ++d.matches;
    if (!prev_matched || align[i] != prev_ref + 1) ++d.chunks;
    prev_ref = align[i];
    prev_matched = true;
  }
  if (d.matches == 0) return d;
  double m = d.matches;
  d.precision = m / static_cast<double>(cand.size());
  d.recall = m / static_cast<double>(ref.size());
  d.fmean = 10.0 * d.precision * d.recall / (d.recall + 9.0 * d.precision);
  d.penalty = 0.5 * std::pow(d.chunks / m, 3.0);
  d.score = d.fmean * (1.0 - d.penalty);
  return d;
}

double MeteorLite(std::string_view candidate, std::string_view reference, const Lexicons& lex,
                  const SynonymTable* synonyms) {
  return MeteorLiteDetail(candidate, reference, lex, synonyms).score;
}

std::string HashedNgramEmbedding::name() const {
  return "hashed-char-trigram-v1/" + std::to_string(dim_);
}

std::vector<std::vector<double>> HashedNgramEmbedding::Embed(
    const std::vector<std::string>& tokens) {
  std::vector<std::vector<double>> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    std::vector<double> v(dim_, 0.0);
    std::string padded = "<" + token + ">";
    for (size_t i = 0; i + 3 <= padded.size(); ++i) {
      uint64_t h = Fnv1a(std::string_view(padded).substr(i, 3));
      v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double& x : v) x /= norm;
    }
    out.push_back(std::move(v));
  }
  return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(std::string base_url, std::string model,
                                                 std::string api_key_env)
    : base_url_(std::move(base_url)), model_(std::move(model)), api_key_env_(std::move(api_key_env)) {}

std::vector<std::vector<double>> RemoteEmbeddingProvider::Embed(
    const std::vector<std::string>& tokens) {
  if (tokens.empty()) return {};
  BaseUrl url = ParseBaseUrl(base_url_);
  httplib::Client client(url.origin);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  httplib::Headers headers;
  if (const char* key = std::getenv(api_key_env_.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  nlohmann::json body = {{"model", model_}, {"input", tokens}};
  auto res = client.Post(url.prefix + "/embeddings", headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::kProviderUnavailable,
                "embedding endpoint " + base_url_ + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProviderUnavailable,
                "embedding endpoint returned HTTP " + std::to_string(res->status));
  }
  try {
    auto j = nlohmann::json::parse(res->body);
    std::vector<std::vector<double>> out(tokens.size());
    for (const auto& item : j.at("data")) {
      size_t index = item.at("index").get<size_t>();
      if (index >= out.size()) throw Error(ErrorCode::kProviderError, "embedding index out of range");
      out[index] = item.at("embedding").get<std::vector<double>>();
    }
    for (const auto& v : out) {
      if (v.empty()) throw Error(ErrorCode::kProviderError, "embedding response is missing a token");
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kProviderError, std::string("embedding response: ") + e.what());
  }
}

double Cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double EmbedF1FromVectors(const std::vector<std::vector<double>>& candidate,
                          const std::vector<std::vector<double>>& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  std::vector<double> best_c(candidate.size(), -1.0);
  std::vector<double> best_r(reference.size(), -1.0);
  for (size_t i = 0; i < candidate.size(); ++i) {
    for (size_t j = 0; j < reference.size(); ++j) {
      double s = Cosine(candidate[i], reference[j]);
      best_c[i] = std::max(best_c[i], s);
      best_r[j] = std::max(best_r[j], s);
    }
  }
  double p = 0.0, r = 0.0;
  for (double s : best_c) p += s;
  for (double s : best_r) r += s;
  p /= static_cast<double>(candidate.size());
  r /= static_cast<double>(reference.size());
  if (p + r <= 0.0) return 0.0;
  return std::clamp(2.0 * p * r / (p + r), 0.0, 1.0);
}

double EmbedF1(std::string_view candidate, std::string_view reference,
               EmbeddingProvider& provider, const Lexicons& lex, EmbedF1Options options) {
  auto cand = LowerTokens(candidate, lex, /*keep_punct=*/false);
  auto ref = LowerTokens(reference, lex, /*keep_punct=*/false);
  double f1 = EmbedF1FromVectors(provider.Embed(cand), provider.Embed(ref));
  if (options.rescale_baseline) {
    double b = *options.rescale_baseline;
    if (b < 1.0) f1 = (f1 - b) / (1.0 - b);
  }
  return f1;
}

std::string_view QuestionClassName(QuestionClass c) {
  switch (c) {
    case QuestionClass::kWho: return "who";
    case QuestionClass::kWhat: return "what";
    case QuestionClass::kWhen: return "when";
    case QuestionClass::kWhere: return "where";
    case QuestionClass::kWhy: return "why";
    case QuestionClass::kHow: return "how";
    case QuestionClass::kWhich: return "which";
    case QuestionClass::kYesNo: return "yesno";
  }
  return "";
}

QuestionClass QuestionClassOf(std::string_view question, const Lexicons& lex) {
  static const std::vector<std::pair<std::string_view, QuestionClass>> kPrefixes = {
      {"who", QuestionClass::kWho},     {"what", QuestionClass::kWhat},
      {"when", QuestionClass::kWhen},   {"where", QuestionClass::kWhere},
      {"why", QuestionClass::kWhy},     {"how", QuestionClass::kHow},
      {"which", QuestionClass::kWhich},
  };
  for (const auto& t : textkit::Tokenize(question, lex)) {
    if (!t.Has(Tag::kWh)) continue;
    for (const auto& [prefix, cls] : kPrefixes) {
      // whom, whose, whoever -> who; whatever -> what; whenever -> when ...
      if (t.lower.starts_with(prefix)) return cls;
    }
  }
  return QuestionClass::kYesNo;
}

QstsDetail QstsArithDetail(std::string_view candidate, std::string_view reference,
                           EmbeddingProvider* provider, const Lexicons& lex) {
  QstsDetail d;
  d.class_agreement =
      QuestionClassOf(candidate, lex) == QuestionClassOf(reference, lex) ? 1.0 : 0.0;

  auto cand_tokens = textkit::Tokenize(candidate, lex);
  auto ref_tokens = textkit::Tokenize(reference, lex);
  auto names = [](const std::vector<Token>& tokens) {
    std::set<std::string> out;
    for (const auto& t : tokens) {
      if (t.Has(Tag::kName)) out.insert(t.lemma);
    }
    return out;
  };
  auto jaccard = [](const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
  };
  d.entity_overlap = jaccard(names(cand_tokens), names(ref_tokens));

  auto cand_lemmas = textkit::ContentLemmas(cand_tokens);
  auto ref_lemmas = textkit::ContentLemmas(ref_tokens);
  std::set<std::string> cand_set(cand_lemmas.begin(), cand_lemmas.end());
  std::set<std::string> ref_set(ref_lemmas.begin(), ref_lemmas.end());
  if (provider != nullptr && !cand_set.empty() && !ref_set.empty()) {
    auto cand_mean = MeanVector(provider->Embed(cand_lemmas));
    auto ref_mean = MeanVector(provider->Embed(ref_lemmas));
    d.content_similarity = std::clamp(Cosine(cand_mean, ref_mean), 0.0, 1.0);
  } else {
    d.content_similarity = jaccard(cand_set, ref_set);
  }
  d.score = (d.class_agreement + d.entity_overlap + d.content_similarity) / 3.0;
  return d;
}

double QstsArith(std::string_view candidate, std::string_view reference,
                 EmbeddingProvider* provider, const Lexicons& lex) {
  return QstsArithDetail(candidate, reference, provider, lex).score;
}

}  // namespace qudeval::metrics
