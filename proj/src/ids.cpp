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

#include "permreach/ids.hpp"

#include <array>
#include <charconv>

#include "permreach/error.hpp"

namespace permreach {

std::string make_subsignature(std::string_view name,
                              const std::vector<std::string>& params) {
  std::string out(name);
  out += '(';
  for (size_t i = 0; i < params.size(); ++i) {
    if (i) out += ',';
    out += params[i];
  }
  out += ')';
  return out;
}

std::string make_method_sig(std::string_view cls, std::string_view subsig) {
  std::string out(cls);
  out += '#';
  out += subsig;
  return out;
}

std::string make_field_id(std::string_view cls, std::string_view name) {
  return make_method_sig(cls, name);
}

std::optional<std::pair<std::string, std::string>> split_member_id(
    std::string_view id) {
  auto hash = id.find('#');
  if (hash == std::string_view::npos) return std::nullopt;
  return std::make_pair(std::string(id.substr(0, hash)),
                        std::string(id.substr(hash + 1)));
}

std::string owner_of(std::string_view member_id) {
  auto hash = member_id.find('#');
  return std::string(member_id.substr(0, hash));
}

std::string MethodRef::subsignature() const {
  return make_subsignature(name, params);
}

std::string MethodRef::to_string() const {
  return make_method_sig(cls, subsignature());
}

std::optional<MethodRef> MethodRef::try_parse(std::string_view sig) {
  auto hash = sig.find('#');
  auto open = sig.find('(', hash == std::string_view::npos ? 0 : hash);
  if (hash == std::string_view::npos || hash == 0 ||
      open == std::string_view::npos || open == hash + 1 ||
      sig.back() != ')') {
    return std::nullopt;
  }
  MethodRef ref;
  ref.cls = std::string(sig.substr(0, hash));
  ref.name = std::string(sig.substr(hash + 1, open - hash - 1));
  auto inner = sig.substr(open + 1, sig.size() - open - 2);
  if (inner.find_first_of("()#") != std::string_view::npos) {
    return std::nullopt;
  }
  while (!inner.empty()) {
    auto comma = inner.find(',');
    auto piece = inner.substr(0, comma);
    if (piece.empty()) return std::nullopt;
    ref.params.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    inner.remove_prefix(comma + 1);
    if (inner.empty()) return std::nullopt;
  }
  return ref;
}

MethodRef MethodRef::parse(std::string_view sig) {
  auto ref = try_parse(sig);
  if (!ref) {
    throw ParseError("malformed method signature '" + std::string(sig) +
                     "' (expected Cls#name(T1,...))");
  }
  return *ref;
}

std::string SiteId::to_string() const {
  return method + "/" + std::to_string(index);
}

SiteId SiteId::parse(std::string_view text) {
  auto slash = text.rfind('/');
  if (slash == std::string_view::npos || slash == 0) {
    throw ParseError("malformed site id '" + std::string(text) + "'");
  }
  SiteId id;
  id.method = std::string(text.substr(0, slash));
  auto digits = text.substr(slash + 1);
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), id.index);
  if (ec != std::errc() || ptr != digits.data() + digits.size() ||
      id.index < 0) {
    throw ParseError("malformed site id '" + std::string(text) + "'");
  }
  return id;
}

bool is_primitive_type(std::string_view type) {
  static constexpr std::array<std::string_view, 9> kPrimitives = {
      "void", "boolean", "byte", "char", "short",
      "int",  "long",    "float", "double"};
  for (auto p : kPrimitives) {
    if (p == type) return true;
  }
  return false;
}

}  // namespace permreach
