// Copyright 2026 The docparse Authors.
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

#pragma once

#include <map>
#include <string>

namespace docparse {

/// Flat section.key -> string value view of a config file. TOML (a pragmatic
/// subset: [section] headers, key = value with strings, numbers, booleans)
/// or JSON (one nesting level), auto-detected by extension.
class ConfigFile {
 public:
  static ConfigFile load(const std::string& path);
  static ConfigFile from_toml(const std::string& text);
  static ConfigFile from_json(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_number(const std::string& section, const std::string& key, double fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

 private:
  std::map<std::string, std::string> values_;  // "section.key" -> raw value
};

/// Writes content to path via a temp file and rename, so interrupted runs
/// never leave truncated outputs.
void atomic_write(const std::string& path, const std::string& content);

/// Log verbosity from the DOCPARSE_LOG environment variable
/// (error | warn | info | debug; default warn).
int log_level();
void log_warn(const std::string& msg);
void log_info(const std::string& msg);

}  // namespace docparse
