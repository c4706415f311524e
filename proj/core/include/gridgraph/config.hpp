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

#ifndef GRIDGRAPH_CONFIG_HPP
#define GRIDGRAPH_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

namespace gridgraph {

// TOML subset: [sections], key = value with strings, booleans, integers,
// floats and flat arrays, plus # comments. Keys are addressed as
// "section.key".
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const;

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::vector<double> get_double_list(
      const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_string_list(
      const std::string& key, const std::vector<std::string>& fallback) const;

  void set(const std::string& key, const std::string& raw_value);

  // Canonical "key = value" lines sorted by key; hashing this yields the
  // resolved-config stamp embedded in benchmark outputs.
  std::string canonical() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  // Raw TOML value text per dotted key.
  std::map<std::string, std::string> values_;
};

}  // namespace gridgraph

#endif  // GRIDGRAPH_CONFIG_HPP
