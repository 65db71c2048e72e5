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

#include "stamdct/config.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace stamdct {

namespace {

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Config c = parse_string(ss.str());
  c.source_ = path;
  return c;
}

Config Config::parse_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) +
                               " is not a key = value pair: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error("config: empty key at line " +
                               std::to_string(lineno));
    if (c.values_.count(key))
      throw std::runtime_error("config: duplicate key " + key);
    c.values_[key] = value;
    c.consumed_[key] = false;
  }
  return c;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::take(const std::string& key, bool* found) {
  auto it = values_.find(key);
  if (it == values_.end()) {
    *found = false;
    return "";
  }
  consumed_[key] = true;
  *found = true;
  return it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::string& fallback) {
  bool found = false;
  const std::string v = take(key, &found);
  return found ? v : fallback;
}

std::string Config::require_string(const std::string& key) {
  bool found = false;
  const std::string v = take(key, &found);
  if (!found)
    throw std::runtime_error("config: missing required key '" + key + "' in " +
                             source_);
  return v;
}

double Config::get_double(const std::string& key, double fallback) {
  bool found = false;
  const std::string v = take(key, &found);
  if (!found) return fallback;
  size_t pos = 0;
  const double d = std::stod(v, &pos);
  if (pos != v.size())
    throw std::runtime_error("config: bad number for " + key + ": " + v);
  return d;
}

int Config::get_int(const std::string& key, int fallback) {
  bool found = false;
  const std::string v = take(key, &found);
  if (!found) return fallback;
  size_t pos = 0;
  const int i = std::stoi(v, &pos);
  if (pos != v.size())
    throw std::runtime_error("config: bad integer for " + key + ": " + v);
  return i;
}

uint64_t Config::get_u64(const std::string& key, uint64_t fallback) {
  bool found = false;
  const std::string v = take(key, &found);
  if (!found) return fallback;
  size_t pos = 0;
  const unsigned long long u = std::stoull(v, &pos);
  if (pos != v.size())
    throw std::runtime_error("config: bad integer for " + key + ": " + v);
  return static_cast<uint64_t>(u);
}

bool Config::get_bool(const std::string& key, bool fallback) {
  bool found = false;
  const std::string v = take(key, &found);
  if (!found) return fallback;
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::runtime_error("config: bad boolean for " + key + ": " + v);
}

std::vector<std::string> Config::get_list(const std::string& key) {
  bool found = false;
  const std::string v = take(key, &found);
  std::vector<std::string> out;
  if (!found) return out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> Config::get_double_list(const std::string& key) {
  std::vector<double> out;
  bool found = false;
  const std::string v = take(key, &found);
  if (!found) return out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    if (item == "inf" || item == "+inf") {
      out.push_back(std::numeric_limits<double>::infinity());
    } else if (item == "-inf") {
      out.push_back(-std::numeric_limits<double>::infinity());
    } else {
      out.push_back(std::stod(item));
    }
  }
  return out;
}

void Config::check_consumed() const {
  for (const auto& [key, used] : consumed_)
    if (!used)
      throw std::runtime_error("config: unknown key '" + key + "' in " +
                               source_);
}

}  // namespace stamdct
