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

// Flow-insensitive intraprocedural value chase over local copies. Used for
// parametric sensitives and for callback registration evidence.

#pragma once

#include <compare>
#include <set>
#include <string>
#include <string_view>

#include "permreach/appmodel.hpp"

namespace permreach {

class ClassHierarchy;

struct Value {
  enum class Kind { kAlloc, kLiteral, kStaticField, kUnknown };

  Kind kind = Kind::kUnknown;
  std::string text;  // site id, literal, or field id

  static Value alloc(const SiteId& site) { return {Kind::kAlloc, site.to_string()}; }
  static Value literal(std::string s) { return {Kind::kLiteral, std::move(s)}; }
  static Value static_field(std::string id) { return {Kind::kStaticField, std::move(id)}; }
  static Value unknown() { return {Kind::kUnknown, {}}; }

  std::string to_string() const;
  auto operator<=>(const Value&) const = default;
};

// new -> allocation site, const_str -> literal, load_static -> field id;
// parameters, `this`, instance-field loads and call results -> unknown.
std::set<Value> intraproc_values(std::string_view method_sig,
                                 const MethodDecl& method, std::string_view var);

// Types the value of `var` may have: allocated types where a `new` reaches
// it, otherwise the declared type of the opaque definition (parameter,
// `this`, static field, call result). Instance-field loads contribute
// nothing, since the IR does not record the base type.
std::set<std::string> intraproc_types(const ClassHierarchy& hierarchy,
                                      std::string_view method_sig,
                                      const MethodDecl& method,
                                      std::string_view var);

}  // namespace permreach
