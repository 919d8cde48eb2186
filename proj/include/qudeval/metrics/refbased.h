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

// Similarity between a generated question and a reference question.

#ifndef QUDEVAL_METRICS_REFBASED_H_
#define QUDEVAL_METRICS_REFBASED_H_

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qudeval/textkit/textkit.h"

namespace qudeval::metrics {

using textkit::Lexicons;

struct QuestionPair {
  std::string edge_id;
  std::string candidate;
  std::string reference;
};

// Unigram precision with clipped counts times the brevity penalty. Tokens
// are lowercased and punctuation marks count as tokens.
double Bleu1(std::string_view candidate, std::string_view reference,
             const Lexicons& lex = Lexicons::Default());

// ROUGE-1 F1 over lowercased word tokens (punctuation dropped, no stemming).
double Rouge1F1(std::string_view candidate, std::string_view reference,
                const Lexicons& lex = Lexicons::Default());

// word -> interchangeable words, consulted after exact and lemma matching.
using SynonymTable = std::map<std::string, std::set<std::string>>;

struct MeteorDetail {
  int matches = 0;
  int chunks = 0;
  double precision = 0.0;
  double recall = 0.0;
  double fmean = 0.0;
  double penalty = 0.0;
  double score = 0.0;
};

// Staged unigram alignment (exact, lemma, optional synonyms) scored as
// Fmean * (1 - 0.5 * (chunks / matches)^3), Fmean = 10PR / (R + 9P).
MeteorDetail MeteorLiteDetail(std::string_view candidate, std::string_view reference,
                              const Lexicons& lex = Lexicons::Default(),
                              const SynonymTable* synonyms = nullptr);
double MeteorLite(std::string_view candidate, std::string_view reference,
                  const Lexicons& lex = Lexicons::Default(),
                  const SynonymTable* synonyms = nullptr);

// Deterministic token -> vector map, identified by name() (name and version).
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  // One vector per token, all of the same dimension. Throws
  // ProviderUnavailable if the backend cannot be reached.
  virtual std::vector<std::vector<double>> Embed(const std::vector<std::string>& tokens) = 0;
};

// Offline default: hashed character trigrams of "<token>", L2-normalized.
// Words sharing spelling share direction; unrelated words are near
// orthogonal.
class HashedNgramEmbedding : public EmbeddingProvider {
 public:
  explicit HashedNgramEmbedding(int dim = 256) : dim_(dim) {}
  std::string name() const override;
  std::vector<std::vector<double>> Embed(const std::vector<std::string>& tokens) override;

 private:
  int dim_;
};

// OpenAI-compatible /v1/embeddings endpoint. The key is read from the named
// environment variable when set.
class RemoteEmbeddingProvider : public EmbeddingProvider {
 public:
  RemoteEmbeddingProvider(std::string base_url, std::string model,
                          std::string api_key_env = "QUDEVAL_LLM_API_KEY");
  std::string name() const override { return "remote:" + model_; }
  std::vector<std::vector<double>> Embed(const std::vector<std::string>& tokens) override;

 private:
  std::string base_url_;
  std::string model_;
  std::string api_key_env_;
};

double Cosine(const std::vector<double>& a, const std::vector<double>& b);

struct EmbedF1Options {
  // Affine rescale (x - b) / (1 - b) with a provider-specific baseline b.
  std::optional<double> rescale_baseline;
};

// Greedy max-cosine matching in both directions: P averages over candidate
// tokens, R over reference tokens. Clamped to [0, 1] before rescaling.
double EmbedF1(std::string_view candidate, std::string_view reference,
               EmbeddingProvider& provider, const Lexicons& lex = Lexicons::Default(),
               EmbedF1Options options = {});
// Same on pre-computed token vectors.
double EmbedF1FromVectors(const std::vector<std::vector<double>>& candidate,
                          const std::vector<std::vector<double>>& reference);

enum class QuestionClass { kWho, kWhat, kWhen, kWhere, kWhy, kHow, kWhich, kYesNo };

std::string_view QuestionClassName(QuestionClass c);
// Class of the first wh-word (whom/whose count as who); yes/no without one.
QuestionClass QuestionClassOf(std::string_view question,
                              const Lexicons& lex = Lexicons::Default());

struct QstsDetail {
  double class_agreement = 0.0;
  double entity_overlap = 0.0;
  double content_similarity = 0.0;
  double score = 0.0;
};

// Arithmetic mean of question-class agreement, name-token Jaccard (1 when
// both sides have none) and content similarity. Content similarity is the
// cosine of mean content-lemma embeddings when `provider` is given, else the
// Jaccard of content-lemma sets (1 when both are empty).
QstsDetail QstsArithDetail(std::string_view candidate, std::string_view reference,
                           EmbeddingProvider* provider = nullptr,
                           const Lexicons& lex = Lexicons::Default());
double QstsArith(std::string_view candidate, std::string_view reference,
                 EmbeddingProvider* provider = nullptr,
                 const Lexicons& lex = Lexicons::Default());

}  // namespace qudeval::metrics

#endif  // QUDEVAL_METRICS_REFBASED_H_
