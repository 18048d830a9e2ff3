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

#include <algorithm>

#include "permreach/appmodel.hpp"
#include "permreach/error.hpp"

namespace permreach {

struct LinkedProgram::Tables {
  std::string name;
  Manifest manifest;
  LinkConfig config;
  std::map<std::string, ClassDecl, std::less<>> classes;
  std::vector<std::string> warnings;
  std::optional<EntryPoint> entry;
  std::map<std::string, const MethodDecl*> bodies;

  // Must be called after every mutation of `classes`; pointers target it.
  void index() {
    bodies.clear();
    for (const auto& [name, cls] : classes) {
      for (const auto& m : cls.methods) {
        if (m.has_body()) bodies.emplace(make_method_sig(name, m.subsignature()), &m);
      }
    }
  }
};

namespace {

// Lexicographic minimum keeps the merge independent of overlay order.
void merge_doc(std::optional<std::string>& into,
               const std::optional<std::string>& from) {
  if (!from) return;
  if (!into || *from < *into) into = from;
}

void merge_class(ClassDecl& into, const ClassDecl& from) {
  const auto& name = into.name;
  if (into.kind != from.kind) {
    throw LinkError(name + ": declared both as class and as interface");
  }
  if (into.origin != from.origin) {
    throw LinkError(name + ": declared with origins '" +
                    std::string(to_string(into.origin)) + "' and '" +
                    std::string(to_string(from.origin)) + "'");
  }
  if (from.super) {
    if (into.super && *into.super != *from.super) {
      throw LinkError(name + ": conflicting superclasses '" + *into.super +
                      "' and '" + *from.super + "'");
    }
    into.super = from.super;
  }
  for (const auto& i : from.interfaces) {
    if (std::find(into.interfaces.begin(), into.interfaces.end(), i) ==
        into.interfaces.end()) {
      into.interfaces.push_back(i);
    }
  }
  std::sort(into.interfaces.begin(), into.interfaces.end());
  merge_doc(into.doc, from.doc);
  into.model = into.model || from.model;

  for (const auto& f : from.fields) {
    auto it = std::find_if(into.fields.begin(), into.fields.end(),
                           [&](const FieldDecl& g) { return g.name == f.name; });
    if (it == into.fields.end()) {
      into.fields.push_back(f);
      continue;
    }
    if (it->type != f.type || it->is_static != f.is_static ||
        (it->const_value && f.const_value && *it->const_value != *f.const_value)) {
      throw LinkError(make_field_id(name, f.name) +
                      ": conflicting field declarations");
    }
    if (!it->const_value) it->const_value = f.const_value;
    merge_doc(it->doc, f.doc);
  }

  for (const auto& m : from.methods) {
    auto sub = m.subsignature();
    auto it = std::find_if(into.methods.begin(), into.methods.end(),
                           [&](const MethodDecl& g) { return g.subsignature() == sub; });
    if (it == into.methods.end()) {
      into.methods.push_back(m);
      continue;
    }
    auto sig = make_method_sig(name, sub);
    if (it->is_static != m.is_static || it->return_type != m.return_type) {
      throw LinkError(sig + ": conflicting method declarations");
    }
    if (it->has_body() && m.has_body()) {
      throw LinkError(sig + ": more than one declaration provides a body");
    }
    auto doc = it->doc;
    merge_doc(doc, m.doc);
    if (m.has_body()) {
      *it = m;
    } else {
      it->is_abstract = it->is_abstract && m.is_abstract;
    }
    it->doc = doc;
  }
  std::sort(into.fields.begin(), into.fields.end(),
            [](const FieldDecl& a, const FieldDecl& b) { return a.name < b.name; });
  std::sort(into.methods.begin(), into.methods.end(),
            [](const MethodDecl& a, const MethodDecl& b) {
              return a.subsignature() < b.subsignature();
            });
}

template <class Resolve>
void check_body_refs(const std::string& sig, const std::vector<Stmt>& body,
                     Resolve&& resolve) {
  for (size_t i = 0; i < body.size(); ++i) {
    auto locus = sig + "/" + std::to_string(i);
    const auto& stmt = body[i];
    if (const auto* s = std::get_if<NewStmt>(&stmt)) {
      resolve(s->type, locus, /*fatal=*/true);
    } else if (const auto* s = std::get_if<InvokeStmt>(&stmt)) {
      resolve(owner_of(s->method), locus, true);
    } else if (const auto* s = std::get_if<LoadStaticStmt>(&stmt)) {
      resolve(owner_of(s->field), locus, true);
    } else if (const auto* s = std::get_if<StoreStaticStmt>(&stmt)) {
      resolve(owner_of(s->field), locus, true);
    }
  }
}

}  // namespace

LinkedProgram::LinkedProgram() : tables_(std::make_shared<Tables>()) {}

LinkedProgram::LinkedProgram(std::shared_ptr<const Tables> tables)
    : tables_(std::move(tables)) {}

const std::string& LinkedProgram::name() const { return tables_->name; }
const Manifest& LinkedProgram::manifest() const { return tables_->manifest; }
const LinkConfig& LinkedProgram::config() const { return tables_->config; }
const std::map<std::string, ClassDecl, std::less<>>& LinkedProgram::classes() const {
  return tables_->classes;
}
const std::vector<std::string>& LinkedProgram::warnings() const {
  return tables_->warnings;
}
const std::optional<EntryPoint>& LinkedProgram::entry() const {
  return tables_->entry;
}
const std::map<std::string, const MethodDecl*>& LinkedProgram::bodies() const {
  return tables_->bodies;
}

const ClassDecl* LinkedProgram::find_class(std::string_view name) const {
  auto it = tables_->classes.find(name);
  return it == tables_->classes.end() ? nullptr : &it->second;
}

const MethodDecl* LinkedProgram::find_method(std::string_view sig) const {
  auto parts = split_member_id(sig);
  if (!parts) return nullptr;
  const auto* cls = find_class(parts->first);
  return cls ? cls->find_method(parts->second) : nullptr;
}

const FieldDecl* LinkedProgram::find_field(std::string_view field_id) const {
  auto parts = split_member_id(field_id);
  if (!parts) return nullptr;
  const auto* cls = find_class(parts->first);
  return cls ? cls->find_field(parts->second) : nullptr;
}

const Stmt* LinkedProgram::stmt_at(const SiteId& site) const {
  const auto* m = find_method(site.method);
  if (!m || !m->body || site.index < 0 ||
      static_cast<size_t>(site.index) >= m->body->size()) {
    return nullptr;
  }
  return &(*m->body)[static_cast<size_t>(site.index)];
}

bool LinkedProgram::is_framework(std::string_view class_name) const {
  if (const auto* c = find_class(class_name); c && c->origin == Origin::kFramework) {
    return true;
  }
  for (const auto& prefix : tables_->config.framework_prefixes) {
    if (class_name.starts_with(prefix)) return true;
  }
  return false;
}

bool LinkedProgram::is_app_code(std::string_view class_name) const {
  const auto* c = find_class(class_name);
  if (!c) return false;
  if (c->origin != Origin::kApp && c->origin != Origin::kLibrary) return false;
  return !is_framework(class_name);
}

bool LinkedProgram::is_async_excluded(std::string_view class_name) const {
  const auto& ex = tables_->config.async_excludes;
  return std::find(ex.begin(), ex.end(), class_name) != ex.end();
}

LinkedProgram LinkedProgram::with_entry(ClassDecl main_class,
                                        EntryPoint entry) const {
  auto tables = std::make_shared<Tables>(*tables_);
  auto name = main_class.name;
  tables->classes[name] = std::move(main_class);
  tables->entry = std::move(entry);
  tables->index();
  return LinkedProgram(std::move(tables));
}

LinkedProgram link_program(const AppModel& app,
                           std::span<const AppModel> overlays,
                           LinkConfig config) {
  auto tables = std::make_shared<LinkedProgram::Tables>();
  tables->name = app.name;
  tables->manifest = app.manifest;
  tables->config = std::move(config);

  auto add_model = [&](const AppModel& model) {
    for (const auto& c : model.classes) {
      auto it = tables->classes.find(c.name);
      if (it == tables->classes.end()) {
        auto& slot = tables->classes[c.name];
        slot = c;
        // Normalize member order through a no-op merge.
        ClassDecl empty = c;
        empty.fields.clear();
        empty.methods.clear();
        empty.interfaces.clear();
        merge_class(slot, empty);
      } else {
        merge_class(it->second, c);
      }
    }
  };
  add_model(app);
  for (const auto& o : overlays) add_model(o);

  auto& classes = tables->classes;
  std::set<std::string> warned;
  auto resolve = [&](const std::string& type, const std::string& locus, bool fatal) {
    if (is_primitive_type(type) || classes.count(type)) return;
    if (fatal) {
      throw LinkError(locus + ": unresolved type '" + type + "'");
    }
    if (warned.insert(type).second) {
      tables->warnings.push_back(locus + ": unresolved type '" + type + "'");
    }
  };

  for (const auto& [name, cls] : classes) {
    if (cls.super) {
      auto it = classes.find(*cls.super);
      if (it == classes.end()) {
        throw LinkError(name + ": unresolved superclass '" + *cls.super + "'");
      }
      if (it->second.kind != ClassKind::kClass) {
        throw LinkError(name + ": superclass '" + *cls.super + "' is an interface");
      }
    }
    for (const auto& i : cls.interfaces) {
      auto it = classes.find(i);
      if (it == classes.end()) {
        throw LinkError(name + ": unresolved interface '" + i + "'");
      }
      if (it->second.kind != ClassKind::kInterface) {
        throw LinkError(name + ": '" + i + "' is not an interface");
      }
    }
    for (const auto& f : cls.fields) {
      resolve(f.type, make_field_id(name, f.name), false);
    }
    for (const auto& m : cls.methods) {
      auto sig = make_method_sig(name, m.subsignature());
      for (const auto& p : m.params) resolve(p, sig, false);
      resolve(m.return_type, sig, false);
      if (m.body) check_body_refs(sig, *m.body, resolve);
    }
  }
  tables->index();
  return LinkedProgram(std::move(tables));
}

}  // namespace permreach
