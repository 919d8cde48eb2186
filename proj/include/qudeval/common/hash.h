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

#ifndef QUDEVAL_COMMON_HASH_H_
#define QUDEVAL_COMMON_HASH_H_

#include <string>
#include <string_view>

namespace qudeval {

// Lowercase hex SHA-256 digest.
std::string Sha256Hex(std::string_view data);

// Incremental variant for hashing several pieces without concatenating.
class Sha256Builder {
 public:
  Sha256Builder();
  ~Sha256Builder();
  Sha256Builder(const Sha256Builder&) = delete;
  Sha256Builder& operator=(const Sha256Builder&) = delete;

  void Update(std::string_view data);
  std::string FinishHex();

 private:
  struct State;
  State* state_;
};

}  // namespace qudeval

#endif  // QUDEVAL_COMMON_HASH_H_
