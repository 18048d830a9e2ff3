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

#include "permreach/collector.hpp"

#include <algorithm>
#include <cmath>

#include "csv_util.hpp"
#include "json_util.hpp"
#include "permreach/analysis.hpp"
#include "permreach/error.hpp"
#include "permreach/values.hpp"

namespace permreach {

namespace {

constexpr std::string_view kPermissionPrefix = "android.permission.";

class PermissionNames {
 public:
  PermissionNames(const LinkedProgram& program, const PermissionSpec& spec)
      : program_(program) {
    known_ = program.manifest().permissions;
    auto s = spec.all_permissions();
    known_.insert(s.begin(), s.end());
  }

  bool is_name(const std::string& text) const {
    return known_.count(text) || text.starts_with(kPermissionPrefix);
  }

  // Permission named by a static field of the permission-constant class.
  std::optional<std::string> from_field(const std::string& field_id) const {
    auto parts = split_member_id(field_id);
    if (!parts || parts->first != program_.config().permission_class) return std::nullopt;
    if (const auto* f = program_.find_field(field_id); f && f->const_value) {
      return *f->const_value;
    }
    return std::string(kPermissionPrefix) + parts->second;
  }

 private:
  const LinkedProgram& program_;
  std::set<std::string> known_;
};

void scan_references(const LinkedProgram& program, const PermissionNames& names,
                     PermissionUsage& usage) {
  for (const auto& [sig, method] : program.bodies()) {
    if (!program.is_app_code(owner_of(sig))) continue;
    const auto& body = *method->body;
    for (size_t i = 0; i < body.size(); ++i) {
      SiteId site{sig, static_cast<int>(i)};
      if (const auto* c = std::get_if<ConstStrStmt>(&body[i])) {
        if (names.is_name(c->value)) {
          usage.permissions[c->value].code.insert({site, CodeEvidence::kLiteral});
        }
      } else if (const auto* l = std::get_if<LoadStaticStmt>(&body[i])) {
        if (auto p = names.from_field(l->field)) {
          usage.permissions[*p].code.insert({site, CodeEvidence::kConstant});
        }
      }
    }
  }
}

void scan_requests(const ClassHierarchy& hierarchy, const PermissionNames& names,
                   const CollectOptions& options, PermissionUsage& usage) {
  const auto& program = hierarchy.program();
  for (const auto& [sig, method] : program.bodies()) {
    if (!program.is_app_code(owner_of(sig))) continue;
    const auto& body = *method->body;
    for (size_t i = 0; i < body.size(); ++i) {
      const auto* inv = std::get_if<InvokeStmt>(&body[i]);
      if (!inv) continue;
      if (!options.request_methods.count(inv->method) &&
          !options.request_methods.count(hierarchy.resolve_declaration(*inv))) {
        continue;
      }
      SiteId site{sig, static_cast<int>(i)};
      for (const auto& arg : inv->args) {
        for (const auto& v : intraproc_values(sig, *method, arg)) {
          std::optional<std::string> p;
          if (v.kind == Value::Kind::kLiteral && names.is_name(v.text)) p = v.text;
          if (v.kind == Value::Kind::kStaticField) p = names.from_field(v.text);
          if (p) usage.permissions[*p].code.insert({site, CodeEvidence::kRequest});
        }
      }
    }
  }
}

SpecCoverage spec_coverage(std::span<const ClassHierarchy> corpus,
                           const PermissionSpec& spec, const CollectOptions& options) {
  SpecCoverage out;
  for (const auto& h : corpus) {
    for (const auto& [perm, label] : classify(collect_usage(h, spec, options))) {
      if (label != UsageClass::kMCS) continue;
      ++out.mcs_instances;
      out.mcs_permissions.insert(perm);
    }
  }
  return out;
}

detail::json keys_json(const std::vector<SpecKey>& keys) {
  auto out = detail::json::array();
  for (const auto& k : keys) out.push_back(k.to_string());
  return out;
}

}  // namespace

std::string_view to_string(CodeEvidence evidence) {
  switch (evidence) {
    case CodeEvidence::kLiteral: return "literal";
    case CodeEvidence::kConstant: return "constant";
    case CodeEvidence::kRequest: return "request";
  }
  return "literal";
}

PermissionUsage collect_usage(const ClassHierarchy& hierarchy, const PermissionSpec& spec,
                              const CollectOptions& options) {
  const auto& program = hierarchy.program();
  PermissionUsage usage;
  usage.app = program.name();
  for (const auto& p : program.manifest().permissions) {
    usage.permissions[p].in_manifest = true;
  }
  PermissionNames names(program, spec);
  if (options.request_sites_only) {
    scan_requests(hierarchy, names, options, usage);
  } else {
    scan_references(program, names, usage);
  }
  for (const auto& s : find_sensitive_sites(hierarchy, spec).sites) {
    for (const auto& p : s.permissions) usage.permissions[p].sensitives.insert(s.site);
  }
  return usage;
}

std::string_view to_string(UsageClass label) {
  switch (label) {
    case UsageClass::kMCS: return "MCS";
    case UsageClass::kMC: return "MC";
    case UsageClass::kMS: return "MS";
    case UsageClass::kCS: return "CS";
    case UsageClass::kM: return "M";
    case UsageClass::kC: return "C";
    case UsageClass::kS: return "S";
  }
  return "M";
}

UsageClass usage_class(bool manifest, bool code, bool sensitive) {
  if (manifest && code && sensitive) return UsageClass::kMCS;
  if (manifest && code) return UsageClass::kMC;
  if (manifest && sensitive) return UsageClass::kMS;
  if (code && sensitive) return UsageClass::kCS;
  if (manifest) return UsageClass::kM;
  if (code) return UsageClass::kC;
  if (sensitive) return UsageClass::kS;
  throw ValidationError("usage class: no flag set");
}

std::map<std::string, UsageClass> classify(const PermissionUsage& usage) {
  std::map<std::string, UsageClass> out;
  for (const auto& [p, u] : usage.permissions) {
    out.emplace(p, usage_class(u.in_manifest, u.in_code(), u.consumed()));
  }
  return out;
}

std::map<UsageClass, int64_t> count_labels(std::span<const PermissionUsage> corpus) {
  std::map<UsageClass, int64_t> out;
  for (const auto& u : corpus) {
    for (const auto& [_, label] : classify(u)) ++out[label];
  }
  return out;
}

double coverage(int64_t mcs, int64_t mc) {
  if (mcs < 0 || mc < 0) throw ValidationError("coverage: negative count");
  if (mcs + mc == 0) throw UndefinedMetricError("coverage undefined: no MC or MCS instances");
  return static_cast<double>(mcs) / static_cast<double>(mc + mcs);
}

double coverage(std::span<const PermissionUsage> corpus) {
  auto counts = count_labels(corpus);
  return coverage(counts[UsageClass::kMCS], counts[UsageClass::kMC]);
}

int rounded_percent(double ratio) { return static_cast<int>(std::lround(ratio * 100.0)); }

std::vector<OverprivilegeEntry> overprivilege_report(std::span<const PermissionUsage> corpus,
                                                     const GroupTable& groups,
                                                     std::vector<std::string>* warnings) {
  std::vector<OverprivilegeEntry> out;
  for (const auto& usage : corpus) {
    OverprivilegeEntry entry;
    entry.app = usage.app;
    auto labels = classify(usage);
    std::set<std::string> used_groups;
    for (const auto& [p, label] : labels) {
      if (label == UsageClass::kM) continue;
      if (const auto* info = groups.find(p)) used_groups.insert(info->group);
    }
    for (const auto& [p, label] : labels) {
      if (label != UsageClass::kM) continue;
      const auto* info = groups.find(p);
      if (!info) {
        if (warnings) warnings->push_back(usage.app + ": no group known for " + p);
        entry.cross_group.insert(p);
      } else if (used_groups.count(info->group)) {
        entry.same_group.insert(p);
      } else {
        entry.cross_group.insert(p);
      }
    }
    out.push_back(std::move(entry));
  }
  return out;
}

SpecComparison compare_specs(std::span<const ClassHierarchy> corpus, const PermissionSpec& a,
                             const PermissionSpec& b, const CollectOptions& options) {
  return {spec_coverage(corpus, a, options), spec_coverage(corpus, b, options),
          diff_specs(a, b)};
}

EvalMetrics eval_metrics(const EvalLabels& l) {
  if (l.detected < 0 || l.undetected_valid < 0 || l.undetected_invalid < 0 ||
      l.cha_unreachable < 0 || l.invalid_path_sensitives < 0) {
    throw ValidationError("eval labels: negative count");
  }
  if (l.invalid_path_sensitives > l.detected) {
    throw ValidationError("eval labels: more invalid-path sensitives than detected ones");
  }
  EvalMetrics m;
  if (l.detected + l.undetected_valid > 0) {
    m.recall = static_cast<double>(l.detected) /
               static_cast<double>(l.detected + l.undetected_valid);
  }
  if (l.detected > 0) {
    m.precision = static_cast<double>(l.detected - l.invalid_path_sensitives) /
                  static_cast<double>(l.detected);
  }
  return m;
}

std::vector<LinkedProgram> load_corpus(const std::filesystem::path& dir,
                                       std::span<const AppModel> overlays,
                                       const LinkConfig& config) {
  if (!std::filesystem::is_directory(dir)) {
    throw ParseError(dir.string() + ": not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<LinkedProgram> out;
  for (const auto& f : files) out.push_back(link_program(load_app(f), overlays, config));
  std::stable_sort(out.begin(), out.end(), [](const LinkedProgram& a, const LinkedProgram& b) {
    return a.name() < b.name();
  });
  return out;
}

std::string usage_csv(std::span<const PermissionUsage> corpus, const GroupTable* groups) {
  std::string out = detail::csv_row({"app", "permission", "label", "group", "sites"});
  for (const auto& usage : corpus) {
    for (const auto& [p, u] : usage.permissions) {
      std::string group;
      if (groups) {
        if (const auto* info = groups->find(p)) group = info->group;
      }
      std::string sites;
      auto add = [&](const std::string& s) { sites += (sites.empty() ? "" : ";") + s; };
      for (const auto& c : u.code) {
        add("C:" + std::string(to_string(c.evidence)) + ":" + c.site.to_string());
      }
      for (const auto& s : u.sensitives) add("S:" + s.to_string());
      out += detail::csv_row({usage.app, p,
                              std::string(to_string(usage_class(u.in_manifest, u.in_code(),
                                                                u.consumed()))),
                              group, sites});
    }
  }
  return out;
}

std::string corpus_summary(std::span<const PermissionUsage> corpus, const GroupTable* groups,
                           const std::vector<std::string>& warnings) {
  using detail::ordered_json;
  ordered_json doc;
  doc["apps"] = corpus.size();
  auto counts = count_labels(corpus);
  ordered_json labels;
  for (auto l : {UsageClass::kMCS, UsageClass::kMC, UsageClass::kMS, UsageClass::kCS,
                 UsageClass::kM, UsageClass::kC, UsageClass::kS}) {
    labels[std::string(to_string(l))] = counts[l];
  }
  doc["instances"] = labels;
  ordered_json cov;
  cov["mcs"] = counts[UsageClass::kMCS];
  cov["mc"] = counts[UsageClass::kMC];
  try {
    double r = coverage(counts[UsageClass::kMCS], counts[UsageClass::kMC]);
    cov["ratio"] = r;
    cov["percent"] = rounded_percent(r);
  } catch (const UndefinedMetricError&) {
    cov["ratio"] = nullptr;
    cov["percent"] = nullptr;
  }
  doc["coverage"] = cov;
  auto all_warnings = warnings;
  if (groups) {
    auto entries = ordered_json::array();
    for (const auto& e : overprivilege_report(corpus, *groups, &all_warnings)) {
      entries.push_back({{"app", e.app},
                         {"sameGroup", e.same_group},
                         {"crossGroup", e.cross_group}});
    }
    doc["overprivilege"] = entries;
  }
  doc["warnings"] = all_warnings;
  return doc.dump(2) + "\n";
}

std::string write_comparison(const SpecComparison& c) {
  auto side = [](const SpecCoverage& s) {
    return detail::ordered_json{{"mcsInstances", s.mcs_instances},
                                {"permissions", s.mcs_permissions.size()},
                                {"mcsPermissions", s.mcs_permissions}};
  };
  detail::ordered_json doc;
  doc["a"] = side(c.a);
  doc["b"] = side(c.b);
  doc["diff"] = {{"common", keys_json(c.diff.common)},
                 {"onlyA", keys_json(c.diff.only_a)},
                 {"onlyB", keys_json(c.diff.only_b)},
                 {"conflicting", keys_json(c.diff.conflicting)}};
  return doc.dump(2) + "\n";
}

}  // namespace permreach
