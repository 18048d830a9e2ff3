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
#include <cctype>

#include "csv_util.hpp"
#include "json_util.hpp"
#include "permreach/permspec.hpp"

namespace permreach {

using detail::json;
using detail::Node;

namespace {

constexpr size_t kSnippetRadius = 40;

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string make_snippet(std::string_view doc, size_t pos, size_t len) {
  size_t begin = pos > kSnippetRadius ? pos - kSnippetRadius : 0;
  size_t end = std::min(doc.size(), pos + len + kSnippetRadius);
  std::string out;
  bool space = false;
  for (char c : doc.substr(begin, end - begin)) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

void scan(std::string_view doc, const std::string& element, ElementKind kind,
          const IdentTable& idents, std::vector<DocCandidate>& out) {
  std::map<std::string, size_t, std::less<>> first_hit;
  size_t i = 0;
  while (i < doc.size()) {
    if (!is_word_char(doc[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < doc.size() && is_word_char(doc[j])) ++j;
    auto word = doc.substr(i, j - i);
    if (idents.count(word) && !first_hit.count(word)) {
      first_hit.emplace(std::string(word), i);
    }
    i = j;
  }
  for (const auto& [ident, pos] : first_hit) {
    const auto& info = idents.find(ident)->second;
    DocCandidate c;
    c.element = element;
    c.element_kind = kind;
    c.identifier = ident;
    c.permission = info.permission;
    c.unique_identifier = info.unique;
    c.needs_member_expansion = kind == ElementKind::kClass;
    c.snippet = make_snippet(doc, pos, ident.size());
    out.push_back(std::move(c));
  }
}

}  // namespace

IdentTable parse_ident_table(std::string_view text, std::string_view source) {
  json root = detail::parse_json(text, source);
  Node n(root, "", source);
  if (!n.value().is_object()) n.fail("expected an object");
  IdentTable table;
  for (const auto& [ident, _] : n.value().items()) {
    auto e = n.child(ident);
    e.expect_object({"permission", "unique"});
    table[ident] = IdentInfo{e.str("permission"), e.boolean("unique", true)};
  }
  return table;
}

IdentTable load_ident_table(const std::filesystem::path& path) {
  return parse_ident_table(detail::read_file(path), path.string());
}

IdentTable derive_ident_table(const GroupTable& groups) {
  IdentTable table;
  for (const auto& [perm, info] : groups.permissions()) {
    if (!info.dangerous) continue;
    auto dot = perm.rfind('.');
    auto ident = dot == std::string::npos ? perm : perm.substr(dot + 1);
    if (ident.empty()) continue;
    table[ident] = IdentInfo{perm, ident.find('_') != std::string::npos};
  }
  return table;
}

std::vector<DocCandidate> mine_doc_candidates(const LinkedProgram& program,
                                              const IdentTable& idents) {
  std::vector<DocCandidate> out;
  for (const auto& [name, cls] : program.classes()) {
    if (cls.doc) scan(*cls.doc, name, ElementKind::kClass, idents, out);
    for (const auto& m : cls.methods) {
      if (m.doc) {
        scan(*m.doc, make_method_sig(name, m.subsignature()),
             ElementKind::kMethod, idents, out);
      }
    }
    for (const auto& f : cls.fields) {
      if (f.doc) {
        scan(*f.doc, make_field_id(name, f.name), ElementKind::kField, idents,
             out);
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const DocCandidate& a, const DocCandidate& b) {
    return std::tie(a.element, a.identifier) < std::tie(b.element, b.identifier);
  });
  return out;
}

std::string candidates_to_csv(const std::vector<DocCandidate>& candidates) {
  std::string out = "element,permission,unique,needs_expansion,snippet\n";
  for (const auto& c : candidates) {
    out += detail::csv_row({c.element, c.permission,
                            c.unique_identifier ? "true" : "false",
                            c.needs_member_expansion ? "true" : "false",
                            c.snippet});
  }
  return out;
}

}  // namespace permreach
