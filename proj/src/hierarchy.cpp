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

#include "permreach/hierarchy.hpp"

#include <deque>

#include "permreach/error.hpp"

namespace permreach {

namespace {

const std::set<std::string> kEmpty;

std::vector<std::string> parents_of(const ClassDecl& c) {
  std::vector<std::string> out;
  if (c.super) out.push_back(*c.super);
  out.insert(out.end(), c.interfaces.begin(), c.interfaces.end());
  return out;
}

}  // namespace

std::set<std::string> ChaTargets::all() const {
  auto out = with_body;
  out.insert(stubs.begin(), stubs.end());
  return out;
}

ClassHierarchy::ClassHierarchy(LinkedProgram program)
    : program_(std::move(program)) {
  const auto& classes = program_.classes();

  // Iterative DFS; a grey node seen again closes a cycle.
  enum class Color { kWhite, kGrey, kBlack };
  std::map<std::string, Color, std::less<>> color;
  for (const auto& [name, _] : classes) color[name] = Color::kWhite;

  std::vector<std::string> post_order;
  for (const auto& [root, _] : classes) {
    if (color[root] != Color::kWhite) continue;
    std::vector<std::pair<std::string, size_t>> stack{{root, 0}};
    color[root] = Color::kGrey;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      auto parents = parents_of(classes.find(node)->second);
      if (next < parents.size()) {
        auto parent = parents[next++];
        auto it = color.find(parent);
        if (it == color.end()) continue;  // unresolved; link reports these
        if (it->second == Color::kGrey) {
          throw CycleError("inheritance cycle through '" + parent + "'");
        }
        if (it->second == Color::kWhite) {
          it->second = Color::kGrey;
          stack.emplace_back(parent, 0);
        }
        continue;
      }
      color[node] = Color::kBlack;
      post_order.push_back(node);
      stack.pop_back();
    }
  }

  // Parents precede children in post order.
  for (const auto& name : post_order) {
    const auto& cls = classes.find(name)->second;
    auto& sup = supertypes_[name];
    sup.insert(name);
    for (const auto& p : parents_of(cls)) {
      auto it = supertypes_.find(p);
      if (it != supertypes_.end()) sup.insert(it->second.begin(), it->second.end());
    }
    auto& vt = vtables_[name];
    if (cls.super) {
      auto it = vtables_.find(*cls.super);
      if (it != vtables_.end()) vt = it->second;
    }
    for (const auto& m : cls.methods) {
      if (m.is_abstract) continue;
      vt[m.subsignature()] = make_method_sig(name, m.subsignature());
    }
  }
  for (const auto& [name, sups] : supertypes_) {
    for (const auto& s : sups) subtypes_[s].insert(name);
  }
}

bool ClassHierarchy::contains(std::string_view name) const {
  return supertypes_.count(name) != 0;
}

bool ClassHierarchy::is_subtype(std::string_view sub, std::string_view super) const {
  auto it = supertypes_.find(sub);
  return it != supertypes_.end() && it->second.count(std::string(super));
}

const std::set<std::string>& ClassHierarchy::supertypes(std::string_view name) const {
  auto it = supertypes_.find(name);
  return it == supertypes_.end() ? kEmpty : it->second;
}

const std::set<std::string>& ClassHierarchy::subtypes(std::string_view name) const {
  auto it = subtypes_.find(name);
  return it == subtypes_.end() ? kEmpty : it->second;
}

std::vector<std::string> ClassHierarchy::upward_order(std::string_view name) const {
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::deque<std::string> interfaces;
  for (const ClassDecl* c = program_.find_class(name); c;) {
    if (!seen.insert(c->name).second) break;
    order.push_back(c->name);
    interfaces.insert(interfaces.end(), c->interfaces.begin(), c->interfaces.end());
    c = c->super ? program_.find_class(*c->super) : nullptr;
  }
  while (!interfaces.empty()) {
    auto i = interfaces.front();
    interfaces.pop_front();
    if (!seen.insert(i).second) continue;
    const auto* c = program_.find_class(i);
    if (!c) continue;
    order.push_back(i);
    interfaces.insert(interfaces.end(), c->interfaces.begin(), c->interfaces.end());
  }
  return order;
}

std::optional<std::string> ClassHierarchy::dispatch(std::string_view runtime_type,
                                                    std::string_view subsig) const {
  auto vt = vtables_.find(runtime_type);
  if (vt == vtables_.end()) return std::nullopt;
  auto it = vt->second.find(subsig);
  if (it == vt->second.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> ClassHierarchy::direct_target(const InvokeStmt& invoke) const {
  auto ref = MethodRef::parse(invoke.method);
  auto subsig = ref.subsignature();
  for (const ClassDecl* c = program_.find_class(ref.cls); c;
       c = c->super ? program_.find_class(*c->super) : nullptr) {
    if (c->find_method(subsig)) return make_method_sig(c->name, subsig);
  }
  return std::nullopt;
}

ChaTargets ClassHierarchy::cha_targets(const InvokeStmt& invoke) const {
  auto ref = MethodRef::parse(invoke.method);
  if (!contains(ref.cls)) {
    throw UnknownTypeError("unknown receiver type '" + ref.cls + "' in " +
                           invoke.method);
  }
  ChaTargets out;
  auto add = [&](const std::string& sig) {
    const auto* m = program_.find_method(sig);
    if (!m || m->is_abstract) return;
    (m->has_body() ? out.with_body : out.stubs).insert(sig);
  };
  if (invoke.kind == InvokeKind::kStatic || invoke.kind == InvokeKind::kSpecial) {
    if (auto t = direct_target(invoke)) add(*t);
    return out;
  }
  auto subsig = ref.subsignature();
  for (const auto& t : subtypes(ref.cls)) {
    const auto* cls = program_.find_class(t);
    if (!cls || cls->kind != ClassKind::kClass) continue;
    if (auto target = dispatch(t, subsig)) add(*target);
  }
  return out;
}

std::string ClassHierarchy::resolve_declaration(const InvokeStmt& invoke) const {
  auto ref = MethodRef::parse(invoke.method);
  if (!contains(ref.cls)) {
    throw UnknownTypeError("unknown receiver type '" + ref.cls + "' in " +
                           invoke.method);
  }
  auto subsig = ref.subsignature();
  for (const auto& name : upward_order(ref.cls)) {
    const auto* c = program_.find_class(name);
    if (c && c->find_method(subsig)) return make_method_sig(name, subsig);
  }
  return invoke.method;
}

}  // namespace permreach
