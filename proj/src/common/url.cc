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

#include "qudeval/common/url.h"

#include "qudeval/common/error.h"

namespace qudeval {

BaseUrl ParseBaseUrl(std::string_view url) {
  size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos ||
      (url.substr(0, scheme_end) != "http" && url.substr(0, scheme_end) != "https")) {
    throw Error(ErrorCode::kUsage, "expected an http(s) URL, got \"" + std::string(url) + "\"");
  }
  size_t path = url.find('/', scheme_end + 3);
  BaseUrl out;
  out.origin = std::string(url.substr(0, path));
  if (path != std::string_view::npos) out.prefix = std::string(url.substr(path));
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

}  // namespace qudeval
