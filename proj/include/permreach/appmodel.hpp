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

// Program IR: one app (or overlay) per JSON file, linked into a single
// LinkedProgram before analysis.
//
// The IR is branch-free. A method body is an ordered list of statements and
// every in-method analysis treats it flow-insensitively; the order only
// matters for reporting insertion points. Inside a body, `this` names the
// receiver and `p0`, `p1`, ... name the formal parameters.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "permreach/ids.hpp"

namespace permreach {

enum class ClassKind { kClass, kInterface };

// kSynthetic is internal: it marks the generated entry class and cannot be
// written in an input file.
enum class Origin { kApp, kLibrary, kFramework, kSynthetic };

enum class InvokeKind { kVirtual, kInterface, kStatic, kSpecial };

std::string_view to_string(ClassKind kind);
std::string_view to_string(Origin origin);
std::string_view to_string(InvokeKind kind);

struct NewStmt {
  std::string target;
  std::string type;
  bool operator==(const NewStmt&) const = default;
};

struct AssignStmt {
  std::string target;
  std::string source;
  bool operator==(const AssignStmt&) const = default;
};

struct ConstStrStmt {
  std::string target;
  std::string value;
  bool operator==(const ConstStrStmt&) const = default;
};

struct LoadStaticStmt {
  std::string target;
  std::string field;  // Cls#NAME
  bool operator==(const LoadStaticStmt&) const = default;
};

struct StoreStaticStmt {
  std::string field;
  std::string source;
  bool operator==(const StoreStaticStmt&) const = default;
};

struct LoadFieldStmt {
  std::string target;
  std::string base;
  std::string field;
  bool operator==(const LoadFieldStmt&) const = default;
};

struct StoreFieldStmt {
  std::string base;
  std::string field;
  std::string source;
  bool operator==(const StoreFieldStmt&) const = default;
};

struct InvokeStmt {
  InvokeKind kind = InvokeKind::kVirtual;
  std::optional<std::string> target;
  std::optional<std::string> receiver;
  std::string method;  // canonical signature on the declared receiver type
  std::vector<std::string> args;

  bool has_receiver() const { return kind != InvokeKind::kStatic; }
  bool operator==(const InvokeStmt&) const = default;
};

struct ReturnStmt {
  std::optional<std::string> value;
  bool operator==(const ReturnStmt&) const = default;
};

using Stmt = std::variant<NewStmt, AssignStmt, ConstStrStmt, LoadStaticStmt,
                          StoreStaticStmt, LoadFieldStmt, StoreFieldStmt,
                          InvokeStmt, ReturnStmt>;

// Local defined by the statement, if any.
const std::string* defined_var(const Stmt& stmt);
// Locals read by the statement, in operand order.
std::vector<std::string> read_vars(const Stmt& stmt);

inline constexpr std::string_view kThisVar = "this";
std::string param_var(size_t index);
// Index of a `pN` name, if it is one.
std::optional<size_t> param_index(std::string_view var);

struct FieldDecl {
  std::string name;
  std::string type;
  bool is_static = false;
  std::optional<std::string> const_value;
  std::optional<std::string> doc;
  bool operator==(const FieldDecl&) const = default;
};

struct MethodDecl {
  std::string name;
  std::vector<std::string> params;
  std::string return_type = "void";
  bool is_static = false;
  bool is_abstract = false;
  std::optional<std::string> doc;
  std::optional<std::vector<Stmt>> body;  // nullopt: stub

  bool has_body() const { return body.has_value(); }
  std::string subsignature() const { return make_subsignature(name, params); }
  bool operator==(const MethodDecl&) const = default;
};

struct ClassDecl {
  std::string name;
  ClassKind kind = ClassKind::kClass;
  Origin origin = Origin::kApp;
  std::optional<std::string> super;
  std::vector<std::string> interfaces;
  std::optional<std::string> doc;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  bool model = false;

  const MethodDecl* find_method(std::string_view subsig) const;
  const FieldDecl* find_field(std::string_view name) const;
  bool operator==(const ClassDecl&) const = default;
};

struct Manifest {
  int target_api = 0;
  std::set<std::string> permissions;
  bool operator==(const Manifest&) const = default;
};

struct AppModel {
  std::string name;
  Manifest manifest;
  std::vector<ClassDecl> classes;
  bool operator==(const AppModel&) const = default;
};

// Throws ParseError (with a line or field locus) and ValidationError.
AppModel load_app(const std::filesystem::path& path);
AppModel parse_app(std::string_view text, std::string_view source = "<input>");
std::string serialize_app(const AppModel& app);
void validate_app(const AppModel& app);

struct LinkConfig {
  std::vector<std::string> framework_prefixes = {"android.",
                                                 "com.google.android."};
  std::vector<std::string> async_excludes = {
      "java.lang.Thread",
      "java.lang.Runnable",
      "java.util.concurrent.Executor",
      "java.util.concurrent.ExecutorService",
      "java.util.concurrent.Callable",
      "android.os.AsyncTask",
      "android.os.Handler"};
  // Class whose static fields are permission-name constants.
  std::string permission_class = "android.Manifest$permission";
};

// A callback invocation in the generated entry method.
struct EntryRoot {
  std::string host;
  std::string callback;  // method signature
  SiteId site;           // invoke in the entry method; root context
  auto operator<=>(const EntryRoot&) const = default;
};

struct EntryPoint {
  std::string main_sig;
  std::vector<EntryRoot> roots;
};

// App + library + framework + model overlays merged into one class table.
// Immutable; copies share the underlying tables.
class LinkedProgram {
 public:
  LinkedProgram();

  const std::string& name() const;
  const Manifest& manifest() const;
  const LinkConfig& config() const;
  const std::map<std::string, ClassDecl, std::less<>>& classes() const;
  // Non-fatal link diagnostics (unresolved parameter/field types).
  const std::vector<std::string>& warnings() const;
  const std::optional<EntryPoint>& entry() const;

  const ClassDecl* find_class(std::string_view name) const;
  // Method declared directly by the class named in `sig`.
  const MethodDecl* find_method(std::string_view sig) const;
  const FieldDecl* find_field(std::string_view field_id) const;
  const Stmt* stmt_at(const SiteId& site) const;

  // Framework-ness: origin flag or a configured package prefix.
  bool is_framework(std::string_view class_name) const;
  // App or library code that the analyses scan for sensitives.
  bool is_app_code(std::string_view class_name) const;
  bool is_async_excluded(std::string_view class_name) const;

  // Every method that has a body, keyed by signature.
  const std::map<std::string, const MethodDecl*>& bodies() const;

  // Copy with `main_class` added and the entry recorded.
  LinkedProgram with_entry(ClassDecl main_class, EntryPoint entry) const;

 private:
  struct Tables;
  explicit LinkedProgram(std::shared_ptr<const Tables> tables);
  std::shared_ptr<const Tables> tables_;

  friend LinkedProgram link_program(const AppModel&, std::span<const AppModel>,
                                    LinkConfig);
};

// Throws LinkError on unresolved super/interface/instantiated/invoked types
// and on two declarations giving a body to the same method.
LinkedProgram link_program(const AppModel& app,
                           std::span<const AppModel> overlays,
                           LinkConfig config = {});

}  // namespace permreach
