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

// Permission specification: which framework methods, fields and
// parametric methods consume which permissions.
//
// File form (*.spec.json) is a JSON array of entries:
//
//   {"kind": "method" | "field" | "parametric",
//    "key": "<method signature or field id>",
//    "argIndex": 0,                 parametric only; [i, j] for two-argument
//    "constValue": "content://...", field only
//    "permissions": ["android.permission.CAMERA"],
//    "anyOf": false, "deprecated": false,
//    "source": "annotation" | "xml" | "javadoc" | "app-mined" | "fixture"}

#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "permreach/appmodel.hpp"

namespace permreach {

enum class EntryKind { kMethod, kField, kParametric };
enum class EntrySource { kAnnotation, kXml, kJavadoc, kAppMined, kFixture };

std::string_view to_string(EntryKind kind);
std::string_view to_string(EntrySource source);

struct SpecKey {
  EntryKind kind = EntryKind::kMethod;
  std::string key;
  std::vector<int> arg_indices;  // parametric only

  std::string to_string() const;
  auto operator<=>(const SpecKey&) const = default;
};

struct SpecEntry {
  EntryKind kind = EntryKind::kMethod;
  std::string key;
  // One index for an ordinary parametric sensitive. Two or more describe a
  // sensitive whose requirement depends on several arguments jointly; those
  // are kept in the spec but not matched.
  std::vector<int> arg_indices;
  std::optional<std::string> const_value;
  std::set<std::string> permissions;
  bool any_of = false;
  bool deprecated = false;
  EntrySource source = EntrySource::kFixture;

  SpecKey spec_key() const { return {kind, key, arg_indices}; }
  bool is_multi_arg() const { return arg_indices.size() > 1; }
  // Two entries with the same key must agree on this.
  bool same_mapping(const SpecEntry& other) const {
    return permissions == other.permissions &&
           const_value == other.const_value && any_of == other.any_of;
  }
  bool operator==(const SpecEntry&) const = default;
};

class PermissionSpec {
 public:
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<SpecKey, SpecEntry>& entries() const { return entries_; }

  // Collapses an identical duplicate; throws ConflictError when the key is
  // already mapped differently.
  void insert(SpecEntry entry);

  const SpecEntry* find_method(std::string_view sig) const;
  std::vector<const SpecEntry*> parametric_for(std::string_view sig) const;
  const SpecEntry* find_field(std::string_view field_id) const;
  // Field entries whose constValue equals `literal`.
  std::vector<const SpecEntry*> fields_with_value(std::string_view literal) const;
  std::set<std::string> all_permissions() const;

  bool operator==(const PermissionSpec&) const = default;

 private:
  std::map<SpecKey, SpecEntry> entries_;
  std::map<std::string, std::vector<SpecKey>, std::less<>> by_value_;
};

// Throws ParseError and ValidationError.
PermissionSpec load_spec(const std::filesystem::path& path);
PermissionSpec parse_spec(std::string_view text,
                          std::string_view source = "<input>");
std::string serialize_spec(const PermissionSpec& spec);

struct SpecDiff {
  std::vector<SpecKey> common;
  std::vector<SpecKey> only_a;
  std::vector<SpecKey> only_b;
  std::vector<SpecKey> conflicting;  // same key, different mapping
};

SpecDiff diff_specs(const PermissionSpec& a, const PermissionSpec& b);

struct MergeResult {
  PermissionSpec spec;
  SpecDiff report;  // conflicting is always empty
};

// Union of both specs. Throws ConflictError naming every key whose
// mapping differs.
MergeResult merge_specs(const PermissionSpec& a, const PermissionSpec& b);

// groups.json: {"permissions": {"<name>": {"group": "...", "dangerous": b}}}
class GroupTable {
 public:
  struct Info {
    std::string group;
    bool dangerous = false;
  };

  void set(std::string permission, Info info);
  const Info* find(std::string_view permission) const;
  bool is_dangerous(std::string_view permission) const;
  const std::map<std::string, Info, std::less<>>& permissions() const {
    return permissions_;
  }

 private:
  std::map<std::string, Info, std::less<>> permissions_;
};

GroupTable load_groups(const std::filesystem::path& path);
GroupTable parse_groups(std::string_view text,
                        std::string_view source = "<input>");

// Keeps only dangerous permissions in each entry and drops entries left
// empty. Permissions missing from the table count as not dangerous and are
// reported through `warnings` when given.
PermissionSpec filter_dangerous(const PermissionSpec& spec,
                                const GroupTable& groups,
                                std::vector<std::string>* warnings = nullptr);

// Doc-comment mining.

struct IdentInfo {
  std::string permission;
  bool unique = true;
  bool operator==(const IdentInfo&) const = default;
};

// Identifier (e.g. ACCESS_FINE_LOCATION) -> permission it names.
using IdentTable = std::map<std::string, IdentInfo, std::less<>>;

// {"ACCESS_FINE_LOCATION": {"permission": "...", "unique": true}, ...}
IdentTable load_ident_table(const std::filesystem::path& path);
IdentTable parse_ident_table(std::string_view text,
                             std::string_view source = "<input>");
// One identifier per dangerous permission: the last dotted segment. Single
// words without an underscore (CAMERA, SMS) are marked non-unique.
IdentTable derive_ident_table(const GroupTable& groups);

enum class ElementKind { kClass, kMethod, kField };

struct DocCandidate {
  std::string element;
  ElementKind element_kind = ElementKind::kMethod;
  std::string identifier;
  std::string permission;
  bool unique_identifier = true;
  bool needs_member_expansion = false;
  std::string snippet;
  bool operator==(const DocCandidate&) const = default;
};

// One candidate per (element, identifier) whole-word match in a doc comment
// of any class, method or field. Sorted by element, then identifier.
std::vector<DocCandidate> mine_doc_candidates(const LinkedProgram& program,
                                              const IdentTable& idents);

// Columns: element,permission,unique,needs_expansion,snippet
std::string candidates_to_csv(const std::vector<DocCandidate>& candidates);

}  // namespace permreach
