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

#ifndef QUDEVAL_COMMON_URL_H_
#define QUDEVAL_COMMON_URL_H_

#include <string>
#include <string_view>

namespace qudeval {

// "https://api.example.com/v1" -> origin "https://api.example.com",
// prefix "/v1". The prefix never ends in '/'.
struct BaseUrl {
  std::string origin;
  std::string prefix;
};

// Throws Usage on a URL without an http(s) scheme.
BaseUrl ParseBaseUrl(std::string_view url);

}  // namespace qudeval

#endif  // QUDEVAL_COMMON_URL_H_
