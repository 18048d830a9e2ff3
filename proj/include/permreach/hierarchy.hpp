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

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "permreach/appmodel.hpp"

namespace permreach {

// CHA resolution of one call site, split by whether the target has a body.
struct ChaTargets {
  std::set<std::string> with_body;
  std::set<std::string> stubs;

  size_t size() const { return with_body.size() + stubs.size(); }
  // Exactly one target overall, and it has a body.
  bool unique_with_body() const { return stubs.empty() && with_body.size() == 1; }
  std::set<std::string> all() const;
};

// Subtype closures, per-class dispatch tables and CHA queries over a linked
// program. Immutable after construction.
class ClassHierarchy {
 public:
  // Throws CycleError on an extends/implements cycle.
  explicit ClassHierarchy(LinkedProgram program);

  const LinkedProgram& program() const { return program_; }
  size_t size() const { return supertypes_.size(); }
  bool contains(std::string_view name) const;

  // Reflexive.
  bool is_subtype(std::string_view sub, std::string_view super) const;
  // Reflexive and transitive; empty for unknown names.
  const std::set<std::string>& supertypes(std::string_view name) const;
  const std::set<std::string>& subtypes(std::string_view name) const;
  // The class itself, its superclass chain, then interfaces breadth-first.
  std::vector<std::string> upward_order(std::string_view name) const;

  // Nearest non-abstract declaration of `subsig` on the superclass chain of
  // `runtime_type`, as a method signature.
  std::optional<std::string> dispatch(std::string_view runtime_type,
                                      std::string_view subsig) const;

  // Single target of a static or special invoke.
  std::optional<std::string> direct_target(const InvokeStmt& invoke) const;

  // Throws UnknownTypeError when the declared receiver type is unknown.
  ChaTargets cha_targets(const InvokeStmt& invoke) const;

  // Signature of the declaration found walking upward from the declared
  // receiver type; the lookup key into a PermissionSpec. Throws
  // UnknownTypeError.
  std::string resolve_declaration(const InvokeStmt& invoke) const;

 private:
  LinkedProgram program_;
  std::map<std::string, std::set<std::string>, std::less<>> supertypes_;
  std::map<std::string, std::set<std::string>, std::less<>> subtypes_;
  // class -> subsignature -> implementing method signature
  std::map<std::string, std::map<std::string, std::string, std::less<>>,
           std::less<>>
      vtables_;
};

inline ClassHierarchy build_hierarchy(const LinkedProgram& program) {
  return ClassHierarchy(program);
}

}  // namespace permreach
