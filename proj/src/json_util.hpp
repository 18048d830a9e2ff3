/*
 * Copyright (C) 2026 The permreach Authors
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

// Internal helpers for reading JSON documents with a field-path locus in
// every error message.

#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "permreach/error.hpp"

namespace permreach::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path,
                       std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path.string() + ": cannot write file");
  out << text;
}

// Parses text, converting nlohmann's byte offset into a line number.
inline json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    size_t line = 1;
    size_t limit = std::min<size_t>(e.byte, text.size());
    for (size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw ParseError(std::string(source) + ":" + std::to_string(line) +
                     ": malformed JSON (" + e.what() + ")");
  }
}

class Node {
 public:
  Node(const json& value, std::string path, std::string_view source)
      : value_(value), path_(std::move(path)), source_(source) {}

  const json& value() const { return value_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(std::string(source_) + ": at " +
                     (path_.empty() ? "<root>" : path_) + ": " + message);
  }

  void expect_object(std::initializer_list<std::string_view> allowed) const {
    if (!value_.is_object()) fail("expected an object");
    for (const auto& [key, _] : value_.items()) {
      bool ok = false;
      for (auto a : allowed) ok = ok || a == key;
      if (!ok) fail("unknown field '" + key + "'");
    }
  }

  bool has(std::string_view key) const {
    auto it = value_.find(key);
    return it != value_.end() && !it->is_null();
  }

  Node child(std::string_view key) const {
    auto it = value_.find(key);
    if (it == value_.end()) fail("missing field '" + std::string(key) + "'");
    return Node(*it, join(key), source_);
  }

  Node at(size_t i) const {
    return Node(value_.at(i), path_ + "[" + std::to_string(i) + "]", source_);
  }

  std::vector<Node> elements() const {
    if (!value_.is_array()) fail("expected an array");
    std::vector<Node> out;
    for (size_t i = 0; i < value_.size(); ++i) out.push_back(at(i));
    return out;
  }

  std::string str() const {
    if (!value_.is_string()) fail("expected a string");
    return value_.get<std::string>();
  }

  std::string str(std::string_view key) const { return child(key).str(); }

  std::optional<std::string> opt_str(std::string_view key) const {
    if (!has(key)) return std::nullopt;
    return child(key).str();
  }

  bool boolean(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    auto n = child(key);
    if (!n.value_.is_boolean()) n.fail("expected a boolean");
    return n.value_.get<bool>();
  }

  long long integer() const {
    if (!value_.is_number_integer()) fail("expected an integer");
    return value_.get<long long>();
  }

  std::vector<std::string> strings(std::string_view key) const {
    std::vector<std::string> out;
    if (!has(key)) return out;
    for (const auto& e : child(key).elements()) out.push_back(e.str());
    return out;
  }

 private:
  std::string join(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json& value_;
  std::string path_;
  std::string_view source_;
};

}  // namespace permreach::detail
