/*
 * Copyright 2026 The GridGraph Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef GRIDGRAPH_HASH_HPP
#define GRIDGRAPH_HASH_HPP

#include <cstdint>
#include <cstring>
#include <string>

namespace gridgraph {

// 64-bit FNV-1a, used for config/map provenance stamps in outputs.
struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ull;

  void update(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      state ^= p[i];
      state *= 0x100000001b3ull;
    }
  }
  template <typename T>
  void update_value(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    update(&v, sizeof(T));
  }
  void update_string(const std::string& s) { update(s.data(), s.size()); }

  std::uint64_t digest() const { return state; }
};

std::string hash_hex(std::uint64_t h);

}  // namespace gridgraph

#endif  // GRIDGRAPH_HASH_HPP
