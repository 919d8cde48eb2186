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


#include "qudeval/llmgate/parse.h"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "qudeval/common/error.h"

namespace qudeval::llmgate {

namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool InRange(long n, size_t count) { return n >= 1 && n <= static_cast<long>(count); }

}  // namespace

int ParseOption(std::string_view response, std::span<const std::string> option_names) {
  if (option_names.empty()) throw Error(ErrorCode::kInvariantViolation, "empty option set");
  const std::string text(response);

  static const std::regex kBracket(R"(\[\s*(\d+)\s*(?::[^\]]*)?\])");
  for (std::sregex_iterator it(text.begin(), text.end(), kBracket), end; it != end; ++it) {
    long n = std::stol((*it)[1].str());
    if (InRange(n, option_names.size())) return static_cast<int>(n);
  }

  std::string_view trimmed = Trim(response);
  size_t digits = 0;
  while (digits < trimmed.size() && std::isdigit(static_cast<unsigned char>(trimmed[digits]))) {
    ++digits;
  }
  if (digits > 0 && digits < 6 &&
      (digits == trimmed.size() || !std::isalnum(static_cast<unsigned char>(trimmed[digits])))) {
    long n = std::stol(std::string(trimmed.substr(0, digits)));
    if (InRange(n, option_names.size())) return static_cast<int>(n);
  }

  std::string lower = Lower(response);
  int named = 0;
  int hits = 0;
  for (size_t i = 0; i < option_names.size(); ++i) {
    if (!option_names[i].empty() && lower.find(Lower(option_names[i])) != std::string::npos) {
      named = static_cast<int>(i) + 1;
      ++hits;
    }
  }
  if (hits == 1) return named;

  static const std::regex kStandalone(R"((^|[^\w.])(\d+)(?![\w.]))");
  std::set<long> numbers;
  for (std::sregex_iterator it(text.begin(), text.end(), kStandalone), end; it != end; ++it) {
    if ((*it)[2].length() > 6) continue;
    long n = std::stol((*it)[2].str());
    if (InRange(n, option_names.size())) numbers.insert(n);
  }
  if (numbers.size() == 1) return static_cast<int>(*numbers.begin());

  throw Error(ErrorCode::kUnparseableResponse,
              "no option found in response \"" + std::string(Trim(response).substr(0, 200)) + "\"");
}

ParsedScore ParseScore(std::string_view response, double lo, double hi) {
  static const std::regex kNumber(R"([-+]?\d+(?:\.\d+)?|[-+]?\.\d+)");
  const std::string text(response);
  std::smatch m;
  if (!std::regex_search(text, m, kNumber)) {
    throw Error(ErrorCode::kNonNumericResponse,
                "no number in response \"" + std::string(Trim(response).substr(0, 200)) + "\"");
  }
  ParsedScore s;
  s.raw = std::stod(m.str());
  s.value = std::clamp(s.raw, lo, hi);
  s.clamped = s.value != s.raw;
  return s;
}

std::string FirstLine(std::string_view response, std::string_view label) {
  while (!response.empty()) {
    size_t nl = response.find('\n');
    std::string_view line = Trim(response.substr(0, nl));
    response = nl == std::string_view::npos ? std::string_view() : response.substr(nl + 1);
    if (line.empty()) continue;
    if (!label.empty() && Lower(line.substr(0, label.size())) == Lower(label)) {
      std::string_view rest = Trim(line.substr(label.size()));
      if (rest.starts_with(':')) line = Trim(rest.substr(1));
    }
    while (line.size() >= 2 && (line.front() == '"' || line.front() == '\'') &&
           line.back() == line.front()) {
      line = Trim(line.substr(1, line.size() - 2));
    }
    if (line.empty()) continue;
    return std::string(line);
  }
  return "";
}

}  // namespace qudeval::llmgate
