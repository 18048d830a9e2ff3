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

// Canonical identifiers shared by every module:
//
//   method   pkg.Cls#name(pkg.T1,pkg.T2)
//   field    pkg.Cls#NAME
//   site     pkg.Cls#name(pkg.T1)/3
//
// Method identity excludes the return type.

#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace permreach {

struct MethodRef {
  std::string cls;
  std::string name;
  std::vector<std::string> params;

  // "name(T1,T2)": the part used for dispatch.
  std::string subsignature() const;
  std::string to_string() const;

  // Throws ParseError on anything that is not Cls#name(T,...).
  static MethodRef parse(std::string_view sig);
  static std::optional<MethodRef> try_parse(std::string_view sig);

  auto operator<=>(const MethodRef&) const = default;
};

std::string make_subsignature(std::string_view name,
                              const std::vector<std::string>& params);
std::string make_method_sig(std::string_view cls, std::string_view subsig);
std::string make_field_id(std::string_view cls, std::string_view name);

// Splits Cls#member; nullopt when there is no '#'.
std::optional<std::pair<std::string, std::string>> split_member_id(
    std::string_view id);

// The class part of a method signature or field id.
std::string owner_of(std::string_view member_id);

// One statement of one method. Doubles as allocation-site id (new,
// const_str) and call-site id (invoke).
struct SiteId {
  std::string method;
  int index = 0;

  std::string to_string() const;
  static SiteId parse(std::string_view text);

  auto operator<=>(const SiteId&) const = default;
};

using SiteSet = std::set<SiteId>;

// Primitive Java type names; never resolved against the class table.
bool is_primitive_type(std::string_view type);

}  // namespace permreach
