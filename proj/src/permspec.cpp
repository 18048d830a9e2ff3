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

#include "permreach/permspec.hpp"

#include <algorithm>

#include "json_util.hpp"
#include "permreach/error.hpp"

namespace permreach {

using detail::json;
using detail::Node;
using detail::ordered_json;

std::string_view to_string(EntryKind kind) {
  switch (kind) {
    case EntryKind::kMethod: return "method";
    case EntryKind::kField: return "field";
    case EntryKind::kParametric: return "parametric";
  }
  return "method";
}

std::string_view to_string(EntrySource source) {
  switch (source) {
    case EntrySource::kAnnotation: return "annotation";
    case EntrySource::kXml: return "xml";
    case EntrySource::kJavadoc: return "javadoc";
    case EntrySource::kAppMined: return "app-mined";
    case EntrySource::kFixture: return "fixture";
  }
  return "fixture";
}

std::string SpecKey::to_string() const {
  std::string out(permreach::to_string(kind));
  out += ':';
  out += key;
  for (size_t i = 0; i < arg_indices.size(); ++i) {
    out += i ? ',' : '@';
    out += std::to_string(arg_indices[i]);
  }
  return out;
}

void PermissionSpec::insert(SpecEntry entry) {
  auto key = entry.spec_key();
  auto it = entries_.find(key);
  if (it != entries_.end()) {
    if (!it->second.same_mapping(entry)) {
      throw ConflictError("conflicting mappings for " + key.to_string(),
                          {key.to_string()});
    }
    it->second.deprecated = it->second.deprecated || entry.deprecated;
    it->second.source = std::min(it->second.source, entry.source);
    return;
  }
  if (entry.kind == EntryKind::kField && entry.const_value) {
    by_value_[*entry.const_value].push_back(key);
  }
  entries_.emplace(std::move(key), std::move(entry));
}

const SpecEntry* PermissionSpec::find_method(std::string_view sig) const {
  auto it = entries_.find(SpecKey{EntryKind::kMethod, std::string(sig), {}});
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<const SpecEntry*> PermissionSpec::parametric_for(
    std::string_view sig) const {
  std::vector<const SpecEntry*> out;
  SpecKey lo{EntryKind::kParametric, std::string(sig), {}};
  for (auto it = entries_.lower_bound(lo);
       it != entries_.end() && it->first.kind == EntryKind::kParametric &&
       it->first.key == sig;
       ++it) {
    out.push_back(&it->second);
  }
  return out;
}

const SpecEntry* PermissionSpec::find_field(std::string_view field_id) const {
  auto it = entries_.find(SpecKey{EntryKind::kField, std::string(field_id), {}});
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<const SpecEntry*> PermissionSpec::fields_with_value(
    std::string_view literal) const {
  std::vector<const SpecEntry*> out;
  auto it = by_value_.find(literal);
  if (it == by_value_.end()) return out;
  for (const auto& k : it->second) out.push_back(&entries_.at(k));
  return out;
}

std::set<std::string> PermissionSpec::all_permissions() const {
  std::set<std::string> out;
  for (const auto& [_, e] : entries_) {
    out.insert(e.permissions.begin(), e.permissions.end());
  }
  return out;
}

namespace {

EntryKind parse_entry_kind(const Node& n) {
  auto s = n.str();
  if (s == "method") return EntryKind::kMethod;
  if (s == "field") return EntryKind::kField;
  if (s == "parametric") return EntryKind::kParametric;
  n.fail("unknown entry kind '" + s + "'");
}

EntrySource parse_source(const Node& n) {
  auto s = n.str();
  if (s == "annotation") return EntrySource::kAnnotation;
  if (s == "xml") return EntrySource::kXml;
  if (s == "javadoc") return EntrySource::kJavadoc;
  if (s == "app-mined") return EntrySource::kAppMined;
  if (s == "fixture") return EntrySource::kFixture;
  n.fail("unknown entry source '" + s + "'");
}

std::string locus(std::string_view source, const Node& n) {
  return std::string(source) + ": at " + n.path() + ": ";
}

SpecEntry parse_entry(const Node& n, std::string_view source) {
  n.expect_object({"kind", "key", "argIndex", "constValue", "permissions",
                   "anyOf", "deprecated", "source"});
  SpecEntry e;
  e.kind = parse_entry_kind(n.child("kind"));
  e.key = n.str("key");
  if (n.has("argIndex")) {
    auto a = n.child("argIndex");
    if (a.value().is_array()) {
      for (const auto& i : a.elements()) e.arg_indices.push_back(static_cast<int>(i.integer()));
    } else {
      e.arg_indices.push_back(static_cast<int>(a.integer()));
    }
  }
  e.const_value = n.opt_str("constValue");
  for (auto& p : n.strings("permissions")) e.permissions.insert(std::move(p));
  e.any_of = n.boolean("anyOf", false);
  e.deprecated = n.boolean("deprecated", false);
  if (n.has("source")) e.source = parse_source(n.child("source"));

  auto where = locus(source, n);
  if (e.permissions.empty() || e.permissions.count("")) {
    throw ValidationError(where + "entry needs a non-empty permission set");
  }
  bool parametric = e.kind == EntryKind::kParametric;
  if (parametric && e.arg_indices.empty()) {
    throw ValidationError(where + "parametric entry without argIndex");
  }
  if (!parametric && !e.arg_indices.empty()) {
    throw ValidationError(where + "argIndex only applies to parametric entries");
  }
  for (int i : e.arg_indices) {
    if (i < 0) throw ValidationError(where + "negative argIndex");
  }
  if (e.const_value && e.kind != EntryKind::kField) {
    throw ValidationError(where + "constValue only applies to field entries");
  }
  if (e.kind == EntryKind::kField) {
    if (!split_member_id(e.key)) {
      throw ValidationError(where + "field key must be Cls#NAME");
    }
  } else if (!MethodRef::try_parse(e.key)) {
    throw ValidationError(where + "method key must be Cls#name(T,...)");
  }
  return e;
}

}  // namespace

PermissionSpec parse_spec(std::string_view text, std::string_view source) {
  json root = detail::parse_json(text, source);
  Node n(root, "", source);
  PermissionSpec spec;
  for (const auto& e : n.elements()) {
    try {
      spec.insert(parse_entry(e, source));
    } catch (const ConflictError& c) {
      throw ValidationError(std::string(source) + ": " + c.what());
    }
  }
  return spec;
}

PermissionSpec load_spec(const std::filesystem::path& path) {
  return parse_spec(detail::read_file(path), path.string());
}

std::string serialize_spec(const PermissionSpec& spec) {
  auto root = ordered_json::array();
  for (const auto& [key, e] : spec.entries()) {
    ordered_json j{{"kind", to_string(e.kind)}, {"key", e.key}};
    if (e.arg_indices.size() == 1) {
      j["argIndex"] = e.arg_indices.front();
    } else if (!e.arg_indices.empty()) {
      j["argIndex"] = e.arg_indices;
    }
    if (e.const_value) j["constValue"] = *e.const_value;
    j["permissions"] = std::vector<std::string>(e.permissions.begin(), e.permissions.end());
    if (e.any_of) j["anyOf"] = true;
    if (e.deprecated) j["deprecated"] = true;
    j["source"] = to_string(e.source);
    root.push_back(std::move(j));
  }
  return root.dump(2) + "\n";
}

SpecDiff diff_specs(const PermissionSpec& a, const PermissionSpec& b) {
  SpecDiff d;
  for (const auto& [key, e] : a.entries()) {
    auto it = b.entries().find(key);
    if (it == b.entries().end()) {
      d.only_a.push_back(key);
    } else if (e.same_mapping(it->second)) {
      d.common.push_back(key);
    } else {
      d.conflicting.push_back(key);
    }
  }
  for (const auto& [key, _] : b.entries()) {
    if (!a.entries().count(key)) d.only_b.push_back(key);
  }
  return d;
}

MergeResult merge_specs(const PermissionSpec& a, const PermissionSpec& b) {
  auto diff = diff_specs(a, b);
  if (!diff.conflicting.empty()) {
    std::vector<std::string> keys;
    std::string what = "specs disagree on";
    for (const auto& k : diff.conflicting) {
      keys.push_back(k.to_string());
      what += " " + keys.back();
    }
    throw ConflictError(what, std::move(keys));
  }
  MergeResult r{a, std::move(diff)};
  for (const auto& [_, e] : b.entries()) r.spec.insert(e);
  return r;
}

void GroupTable::set(std::string permission, Info info) {
  permissions_[std::move(permission)] = std::move(info);
}

const GroupTable::Info* GroupTable::find(std::string_view permission) const {
  auto it = permissions_.find(permission);
  return it == permissions_.end() ? nullptr : &it->second;
}

bool GroupTable::is_dangerous(std::string_view permission) const {
  const auto* info = find(permission);
  return info && info->dangerous;
}

GroupTable parse_groups(std::string_view text, std::string_view source) {
  json root = detail::parse_json(text, source);
  Node n(root, "", source);
  n.expect_object({"permissions"});
  GroupTable table;
  auto perms = n.child("permissions");
  if (!perms.value().is_object()) perms.fail("expected an object");
  for (const auto& [name, _] : perms.value().items()) {
    auto p = perms.child(name);
    p.expect_object({"group", "dangerous"});
    table.set(name, {p.str("group"), p.boolean("dangerous", false)});
  }
  return table;
}

GroupTable load_groups(const std::filesystem::path& path) {
  return parse_groups(detail::read_file(path), path.string());
}

PermissionSpec filter_dangerous(const PermissionSpec& spec,
                                const GroupTable& groups,
                                std::vector<std::string>* warnings) {
  PermissionSpec out;
  std::set<std::string> unknown;
  for (const auto& [_, e] : spec.entries()) {
    SpecEntry kept = e;
    kept.permissions.clear();
    for (const auto& p : e.permissions) {
      if (!groups.find(p)) unknown.insert(p);
      if (groups.is_dangerous(p)) kept.permissions.insert(p);
    }
    if (!kept.permissions.empty()) out.insert(std::move(kept));
  }
  if (warnings) {
    for (const auto& p : unknown) {
      warnings->push_back("permission '" + p + "' is not in the group table");
    }
  }
  return out;
}

}  // namespace permreach
