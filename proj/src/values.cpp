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

#include "permreach/values.hpp"

#include <vector>

#include "permreach/hierarchy.hpp"

namespace permreach {

namespace {

bool is_implicit_param(const MethodDecl& method, std::string_view var) {
  if (var == kThisVar) return !method.is_static;
  auto i = param_index(var);
  return i && *i < method.params.size();
}

// Visits every statement defining a variable in the copy-closure of `var`,
// plus the closure variables themselves.
template <class OnVar, class OnDef>
void chase(const MethodDecl& method, std::string_view var, OnVar&& on_var,
           OnDef&& on_def) {
  if (!method.body) {
    on_var(var);
    return;
  }
  const auto& body = *method.body;
  std::set<std::string, std::less<>> seen{std::string(var)};
  std::vector<std::string> work{std::string(var)};
  while (!work.empty()) {
    auto v = std::move(work.back());
    work.pop_back();
    on_var(v);
    for (size_t i = 0; i < body.size(); ++i) {
      const auto* d = defined_var(body[i]);
      if (!d || *d != v) continue;
      if (const auto* a = std::get_if<AssignStmt>(&body[i])) {
        if (seen.insert(a->source).second) work.push_back(a->source);
        continue;
      }
      on_def(i, body[i]);
    }
  }
}

}  // namespace

std::string Value::to_string() const {
  switch (kind) {
    case Kind::kAlloc: return "alloc:" + text;
    case Kind::kLiteral: return "literal:" + text;
    case Kind::kStaticField: return "field:" + text;
    case Kind::kUnknown: return "unknown";
  }
  return "unknown";
}

std::set<Value> intraproc_values(std::string_view method_sig,
                                 const MethodDecl& method, std::string_view var) {
  std::set<Value> out;
  chase(
      method, var,
      [&](std::string_view v) {
        if (is_implicit_param(method, v)) out.insert(Value::unknown());
      },
      [&](size_t i, const Stmt& s) {
        if (std::holds_alternative<NewStmt>(s)) {
          out.insert(Value::alloc({std::string(method_sig), static_cast<int>(i)}));
        } else if (const auto* c = std::get_if<ConstStrStmt>(&s)) {
          out.insert(Value::literal(c->value));
        } else if (const auto* l = std::get_if<LoadStaticStmt>(&s)) {
          out.insert(Value::static_field(l->field));
        } else {
          out.insert(Value::unknown());
        }
      });
  return out;
}

std::set<std::string> intraproc_types(const ClassHierarchy& hierarchy,
                                      std::string_view method_sig,
                                      const MethodDecl& method,
                                      std::string_view var) {
  const auto& program = hierarchy.program();
  std::set<std::string> out;
  chase(
      method, var,
      [&](std::string_view v) {
        if (!is_implicit_param(method, v)) return;
        if (v == kThisVar) {
          out.insert(owner_of(method_sig));
        } else {
          out.insert(method.params[*param_index(v)]);
        }
      },
      [&](size_t, const Stmt& s) {
        if (const auto* n = std::get_if<NewStmt>(&s)) {
          out.insert(n->type);
        } else if (std::holds_alternative<ConstStrStmt>(s)) {
          out.insert("java.lang.String");
        } else if (const auto* l = std::get_if<LoadStaticStmt>(&s)) {
          if (const auto* f = program.find_field(l->field)) out.insert(f->type);
        } else if (const auto* inv = std::get_if<InvokeStmt>(&s)) {
          std::optional<std::string> decl;
          if (inv->kind == InvokeKind::kStatic || inv->kind == InvokeKind::kSpecial) {
            decl = hierarchy.direct_target(*inv);
          } else if (hierarchy.contains(owner_of(inv->method))) {
            decl = hierarchy.resolve_declaration(*inv);
          }
          if (decl) {
            if (const auto* m = program.find_method(*decl)) out.insert(m->return_type);
          }
        }
      });
  return out;
}

}  // namespace permreach
