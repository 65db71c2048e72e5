// Copyright (c) 2026 The stamdct authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace stamdct {

/// `key = value` text config. Blank lines and '#' comments are ignored.
/// Readers consume keys; anything left unconsumed is rejected, so typos in
/// config files fail loudly.
class Config {
 public:
  Config() = default;
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  /// Fetch-and-consume accessors.
  std::string get_string(const std::string& key, const std::string& fallback);
  std::string require_string(const std::string& key);
  double get_double(const std::string& key, double fallback);
  int get_int(const std::string& key, int fallback);
  uint64_t get_u64(const std::string& key, uint64_t fallback);
  bool get_bool(const std::string& key, bool fallback);
  std::vector<std::string> get_list(const std::string& key);  // comma-split
  std::vector<double> get_double_list(const std::string& key);

  /// Throws if any key was never consumed.
  void check_consumed() const;

 private:
  std::string take(const std::string& key, bool* found);

  std::map<std::string, std::string> values_;
  std::map<std::string, bool> consumed_;
  std::string source_ = "<config>";
};

}  // namespace stamdct
