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

#include "permreach/appmodel.hpp"

#include <charconv>
#include <set>

#include "json_util.hpp"
#include "permreach/error.hpp"

namespace permreach {

using detail::json;
using detail::Node;
using detail::ordered_json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

ClassKind parse_class_kind(const Node& n) {
  auto s = n.str();
  if (s == "class") return ClassKind::kClass;
  if (s == "interface") return ClassKind::kInterface;
  n.fail("unknown class kind '" + s + "'");
}

Origin parse_origin(const Node& n) {
  auto s = n.str();
  if (s == "app") return Origin::kApp;
  if (s == "library") return Origin::kLibrary;
  if (s == "framework") return Origin::kFramework;
  n.fail("unknown origin '" + s + "'");
}

InvokeKind parse_invoke_kind(const Node& n) {
  auto s = n.str();
  if (s == "virtual") return InvokeKind::kVirtual;
  if (s == "interface") return InvokeKind::kInterface;
  if (s == "static") return InvokeKind::kStatic;
  if (s == "special") return InvokeKind::kSpecial;
  n.fail("unknown invoke kind '" + s + "'");
}

Stmt parse_stmt(const Node& n) {
  if (!n.value().is_object()) n.fail("expected a statement object");
  auto op = n.str("op");
  if (op == "new") {
    n.expect_object({"op", "target", "type"});
    return NewStmt{n.str("target"), n.str("type")};
  }
  if (op == "assign") {
    n.expect_object({"op", "target", "source"});
    return AssignStmt{n.str("target"), n.str("source")};
  }
  if (op == "const_str") {
    n.expect_object({"op", "target", "value"});
    return ConstStrStmt{n.str("target"), n.str("value")};
  }
  if (op == "load_static") {
    n.expect_object({"op", "target", "fieldId"});
    return LoadStaticStmt{n.str("target"), n.str("fieldId")};
  }
  if (op == "store_static") {
    n.expect_object({"op", "fieldId", "source"});
    return StoreStaticStmt{n.str("fieldId"), n.str("source")};
  }
  if (op == "load_field") {
    n.expect_object({"op", "target", "base", "fieldName"});
    return LoadFieldStmt{n.str("target"), n.str("base"), n.str("fieldName")};
  }
  if (op == "store_field") {
    n.expect_object({"op", "base", "fieldName", "source"});
    return StoreFieldStmt{n.str("base"), n.str("fieldName"), n.str("source")};
  }
  if (op == "invoke") {
    n.expect_object(
        {"op", "kind", "target", "receiver", "methodSig", "args"});
    InvokeStmt s;
    s.kind = parse_invoke_kind(n.child("kind"));
    s.target = n.opt_str("target");
    s.receiver = n.opt_str("receiver");
    s.method = n.str("methodSig");
    s.args = n.strings("args");
    return s;
  }
  if (op == "return") {
    n.expect_object({"op", "value"});
    return ReturnStmt{n.opt_str("value")};
  }
  n.fail("unknown statement op '" + op + "'");
}

FieldDecl parse_field(const Node& n) {
  n.expect_object({"name", "type", "static", "constValue", "doc"});
  FieldDecl f;
  f.name = n.str("name");
  f.type = n.str("type");
  f.is_static = n.boolean("static", false);
  f.const_value = n.opt_str("constValue");
  f.doc = n.opt_str("doc");
  return f;
}

MethodDecl parse_method(const Node& n) {
  n.expect_object({"name", "params", "returnType", "static", "abstract", "doc",
                   "body"});
  MethodDecl m;
  m.name = n.str("name");
  m.params = n.strings("params");
  m.return_type = n.has("returnType") ? n.str("returnType") : "void";
  m.is_static = n.boolean("static", false);
  m.is_abstract = n.boolean("abstract", false);
  m.doc = n.opt_str("doc");
  if (n.has("body")) {
    std::vector<Stmt> body;
    for (const auto& s : n.child("body").elements()) {
      body.push_back(parse_stmt(s));
    }
    m.body = std::move(body);
  }
  return m;
}

ClassDecl parse_class(const Node& n) {
  n.expect_object({"name", "kind", "origin", "super", "interfaces", "doc",
                   "fields", "methods", "model"});
  ClassDecl c;
  c.name = n.str("name");
  c.kind = n.has("kind") ? parse_class_kind(n.child("kind")) : ClassKind::kClass;
  c.origin = n.has("origin") ? parse_origin(n.child("origin")) : Origin::kApp;
  c.super = n.opt_str("super");
  c.interfaces = n.strings("interfaces");
  c.doc = n.opt_str("doc");
  if (n.has("fields")) {
    for (const auto& f : n.child("fields").elements()) {
      c.fields.push_back(parse_field(f));
    }
  }
  if (n.has("methods")) {
    for (const auto& m : n.child("methods").elements()) {
      c.methods.push_back(parse_method(m));
    }
  }
  c.model = n.boolean("model", false);
  return c;
}

void put_opt(ordered_json& j, const char* key,
             const std::optional<std::string>& v) {
  if (v) j[key] = *v;
}

ordered_json stmt_to_json(const Stmt& stmt) {
  return std::visit(
      Overloaded{
          [](const NewStmt& s) {
            return ordered_json{
                {"op", "new"}, {"target", s.target}, {"type", s.type}};
          },
          [](const AssignStmt& s) {
            return ordered_json{
                {"op", "assign"}, {"target", s.target}, {"source", s.source}};
          },
          [](const ConstStrStmt& s) {
            return ordered_json{
                {"op", "const_str"}, {"target", s.target}, {"value", s.value}};
          },
          [](const LoadStaticStmt& s) {
            return ordered_json{{"op", "load_static"},
                                {"target", s.target},
                                {"fieldId", s.field}};
          },
          [](const StoreStaticStmt& s) {
            return ordered_json{{"op", "store_static"},
                                {"fieldId", s.field},
                                {"source", s.source}};
          },
          [](const LoadFieldStmt& s) {
            return ordered_json{{"op", "load_field"},
                                {"target", s.target},
                                {"base", s.base},
                                {"fieldName", s.field}};
          },
          [](const StoreFieldStmt& s) {
            return ordered_json{{"op", "store_field"},
                                {"base", s.base},
                                {"fieldName", s.field},
                                {"source", s.source}};
          },
          [](const InvokeStmt& s) {
            ordered_json j{{"op", "invoke"}, {"kind", to_string(s.kind)}};
            put_opt(j, "target", s.target);
            put_opt(j, "receiver", s.receiver);
            j["methodSig"] = s.method;
            j["args"] = s.args;
            return j;
          },
          [](const ReturnStmt& s) {
            ordered_json j{{"op", "return"}};
            put_opt(j, "value", s.value);
            return j;
          },
      },
      stmt);
}

bool valid_local(std::string_view v) {
  return !v.empty() && v.find_first_of("#/(), ") == std::string_view::npos;
}

}  // namespace

std::string_view to_string(ClassKind kind) {
  return kind == ClassKind::kClass ? "class" : "interface";
}

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::kApp: return "app";
    case Origin::kLibrary: return "library";
    case Origin::kFramework: return "framework";
    case Origin::kSynthetic: return "synthetic";
  }
  return "app";
}

std::string_view to_string(InvokeKind kind) {
  switch (kind) {
    case InvokeKind::kVirtual: return "virtual";
    case InvokeKind::kInterface: return "interface";
    case InvokeKind::kStatic: return "static";
    case InvokeKind::kSpecial: return "special";
  }
  return "virtual";
}

const std::string* defined_var(const Stmt& stmt) {
  return std::visit(
      Overloaded{
          [](const NewStmt& s) -> const std::string* { return &s.target; },
          [](const AssignStmt& s) -> const std::string* { return &s.target; },
          [](const ConstStrStmt& s) -> const std::string* { return &s.target; },
          [](const LoadStaticStmt& s) -> const std::string* {
            return &s.target;
          },
          [](const LoadFieldStmt& s) -> const std::string* {
            return &s.target;
          },
          [](const InvokeStmt& s) -> const std::string* {
            return s.target ? &*s.target : nullptr;
          },
          [](const auto&) -> const std::string* { return nullptr; },
      },
      stmt);
}

std::vector<std::string> read_vars(const Stmt& stmt) {
  return std::visit(
      Overloaded{
          [](const AssignStmt& s) { return std::vector{s.source}; },
          [](const StoreStaticStmt& s) { return std::vector{s.source}; },
          [](const LoadFieldStmt& s) { return std::vector{s.base}; },
          [](const StoreFieldStmt& s) { return std::vector{s.base, s.source}; },
          [](const InvokeStmt& s) {
            std::vector<std::string> out;
            if (s.receiver) out.push_back(*s.receiver);
            out.insert(out.end(), s.args.begin(), s.args.end());
            return out;
          },
          [](const ReturnStmt& s) {
            return s.value ? std::vector{*s.value} : std::vector<std::string>{};
          },
          [](const auto&) { return std::vector<std::string>{}; },
      },
      stmt);
}

std::string param_var(size_t index) { return "p" + std::to_string(index); }

std::optional<size_t> param_index(std::string_view var) {
  if (var.size() < 2 || var[0] != 'p') return std::nullopt;
  size_t value = 0;
  auto [ptr, ec] = std::from_chars(var.data() + 1, var.data() + var.size(), value);
  if (ec != std::errc() || ptr != var.data() + var.size()) return std::nullopt;
  if (var.size() > 2 && var[1] == '0') return std::nullopt;
  return value;
}

const MethodDecl* ClassDecl::find_method(std::string_view subsig) const {
  for (const auto& m : methods) {
    if (m.subsignature() == subsig) return &m;
  }
  return nullptr;
}

const FieldDecl* ClassDecl::find_field(std::string_view field_name) const {
  for (const auto& f : fields) {
    if (f.name == field_name) return &f;
  }
  return nullptr;
}

AppModel parse_app(std::string_view text, std::string_view source) {
  json root = detail::parse_json(text, source);
  Node n(root, "", source);
  n.expect_object({"name", "manifest", "classes"});
  AppModel app;
  app.name = n.str("name");
  if (n.has("manifest")) {
    auto m = n.child("manifest");
    m.expect_object({"targetApi", "permissions"});
    app.manifest.target_api =
        m.has("targetApi") ? static_cast<int>(m.child("targetApi").integer()) : 0;
    for (auto& p : m.strings("permissions")) {
      app.manifest.permissions.insert(std::move(p));
    }
    if (m.has("permissions")) {
      for (const auto& p : m.child("permissions").elements()) {
        if (p.str().empty()) p.fail("empty permission name");
      }
    }
  }
  if (n.has("classes")) {
    for (const auto& c : n.child("classes").elements()) {
      app.classes.push_back(parse_class(c));
    }
  }
  try {
    validate_app(app);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(source) + ": " + e.what());
  }
  return app;
}

AppModel load_app(const std::filesystem::path& path) {
  return parse_app(detail::read_file(path), path.string());
}

std::string serialize_app(const AppModel& app) {
  ordered_json root;
  root["name"] = app.name;
  root["manifest"] = ordered_json{
      {"targetApi", app.manifest.target_api},
      {"permissions", std::vector<std::string>(app.manifest.permissions.begin(),
                                               app.manifest.permissions.end())}};
  auto classes = ordered_json::array();
  for (const auto& c : app.classes) {
    ordered_json jc;
    jc["name"] = c.name;
    jc["kind"] = to_string(c.kind);
    jc["origin"] = to_string(c.origin);
    put_opt(jc, "super", c.super);
    jc["interfaces"] = c.interfaces;
    put_opt(jc, "doc", c.doc);
    auto fields = ordered_json::array();
    for (const auto& f : c.fields) {
      ordered_json jf{{"name", f.name}, {"type", f.type}, {"static", f.is_static}};
      put_opt(jf, "constValue", f.const_value);
      put_opt(jf, "doc", f.doc);
      fields.push_back(std::move(jf));
    }
    jc["fields"] = std::move(fields);
    auto methods = ordered_json::array();
    for (const auto& m : c.methods) {
      ordered_json jm{{"name", m.name},
                      {"params", m.params},
                      {"returnType", m.return_type},
                      {"static", m.is_static},
                      {"abstract", m.is_abstract}};
      put_opt(jm, "doc", m.doc);
      if (m.body) {
        auto body = ordered_json::array();
        for (const auto& s : *m.body) body.push_back(stmt_to_json(s));
        jm["body"] = std::move(body);
      } else {
        jm["body"] = nullptr;
      }
      methods.push_back(std::move(jm));
    }
    jc["methods"] = std::move(methods);
    jc["model"] = c.model;
    classes.push_back(std::move(jc));
  }
  root["classes"] = std::move(classes);
  return root.dump(2) + "\n";
}

void validate_app(const AppModel& app) {
  std::set<std::string> class_names;
  for (const auto& c : app.classes) {
    if (c.name.empty()) throw ValidationError("class with empty name");
    if (!class_names.insert(c.name).second) {
      throw ValidationError("duplicate class '" + c.name + "'");
    }
    if (c.origin == Origin::kSynthetic) {
      throw ValidationError(c.name + ": origin 'synthetic' is reserved");
    }
    if (c.kind == ClassKind::kInterface && c.super) {
      throw ValidationError(c.name +
                            ": interfaces extend other interfaces through "
                            "'interfaces', not 'super'");
    }
    std::set<std::string> field_names;
    for (const auto& f : c.fields) {
      if (!field_names.insert(f.name).second) {
        throw ValidationError(c.name + ": duplicate field '" + f.name + "'");
      }
      if (f.const_value && !f.is_static) {
        throw ValidationError(c.name + "#" + f.name +
                              ": constValue on a non-static field");
      }
    }
    std::set<std::string> subsigs;
    for (const auto& m : c.methods) {
      auto sig = make_method_sig(c.name, m.subsignature());
      if (m.name.empty()) throw ValidationError(c.name + ": unnamed method");
      if (!subsigs.insert(m.subsignature()).second) {
        throw ValidationError("duplicate method " + sig);
      }
      if (m.is_abstract && m.body) {
        throw ValidationError(sig + ": abstract method with a body");
      }
      if (m.is_abstract && m.is_static) {
        throw ValidationError(sig + ": static method declared abstract");
      }
      if (!m.body) continue;
      for (size_t i = 0; i < m.body->size(); ++i) {
        const auto& stmt = (*m.body)[i];
        auto locus = sig + "/" + std::to_string(i);
        for (const auto& v : read_vars(stmt)) {
          if (!valid_local(v)) {
            throw ValidationError(locus + ": invalid local name '" + v + "'");
          }
          if (m.is_static && v == kThisVar) {
            throw ValidationError(locus + ": 'this' read in a static method");
          }
        }
        if (const auto* d = defined_var(stmt); d && !valid_local(*d)) {
          throw ValidationError(locus + ": invalid local name '" + *d + "'");
        }
        if (const auto* inv = std::get_if<InvokeStmt>(&stmt)) {
          if (inv->has_receiver() && !inv->receiver) {
            throw ValidationError(locus + ": " +
                                  std::string(to_string(inv->kind)) +
                                  " invoke without a receiver");
          }
          if (!inv->has_receiver() && inv->receiver) {
            throw ValidationError(locus + ": static invoke with a receiver");
          }
          auto ref = MethodRef::try_parse(inv->method);
          if (!ref) {
            throw ValidationError(locus + ": malformed method signature '" +
                                  inv->method + "'");
          }
          if (ref->params.size() != inv->args.size()) {
            throw ValidationError(locus + ": " + inv->method + " takes " +
                                  std::to_string(ref->params.size()) +
                                  " arguments, " +
                                  std::to_string(inv->args.size()) + " given");
          }
        }
        if (const auto* ls = std::get_if<LoadStaticStmt>(&stmt);
            ls && !split_member_id(ls->field)) {
          throw ValidationError(locus + ": malformed field id '" + ls->field +
                                "'");
        }
        if (const auto* ss = std::get_if<StoreStaticStmt>(&stmt);
            ss && !split_member_id(ss->field)) {
          throw ValidationError(locus + ": malformed field id '" + ss->field +
                                "'");
        }
      }
    }
  }
}

}  // namespace permreach
