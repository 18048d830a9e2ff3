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

// Per-app permission usage across manifest (M), code references (C) and
// consuming sensitives (S), with the corpus-level studies built on it.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "permreach/appmodel.hpp"
#include "permreach/hierarchy.hpp"
#include "permreach/permspec.hpp"

namespace permreach {

enum class CodeEvidence { kLiteral, kConstant, kRequest };

std::string_view to_string(CodeEvidence evidence);

struct CodeRef {
  SiteId site;
  CodeEvidence evidence = CodeEvidence::kLiteral;
  auto operator<=>(const CodeRef&) const = default;
};

struct PermissionUse {
  bool in_manifest = false;
  std::set<CodeRef> code;        // non-empty exactly when C holds
  std::set<SiteId> sensitives;   // non-empty exactly when S holds

  bool in_code() const { return !code.empty(); }
  bool consumed() const { return !sensitives.empty(); }
  bool operator==(const PermissionUse&) const = default;
};

struct PermissionUsage {
  std::string app;
  std::map<std::string, PermissionUse> permissions;  // at least one flag set
  bool operator==(const PermissionUsage&) const = default;
};

struct CollectOptions {
  // When set, C evidence is only a permission value passed to one of
  // `request_methods`, instead of any reference in code.
  bool request_sites_only = false;
  std::set<std::string> request_methods = {
      "android.app.Activity#requestPermissions(java.lang.String[],int)",
      "android.content.Context#checkSelfPermission(java.lang.String)"};
};

// M from the manifest. C from string constants naming a permission and from
// loads of the permission-constant class's fields. S from the sensitive
// sites of app and library bodies, with no reachability requirement.
PermissionUsage collect_usage(const ClassHierarchy& hierarchy,
                              const PermissionSpec& spec,
                              const CollectOptions& options = {});

enum class UsageClass { kMCS, kMC, kMS, kCS, kM, kC, kS };

std::string_view to_string(UsageClass label);
// Throws ValidationError when no flag is set.
UsageClass usage_class(bool manifest, bool code, bool sensitive);

std::map<std::string, UsageClass> classify(const PermissionUsage& usage);

// Instances per label, counted per (app, permission).
std::map<UsageClass, int64_t> count_labels(std::span<const PermissionUsage> corpus);

// MCS / (MC + MCS). Throws UndefinedMetricError when both are zero.
double coverage(int64_t mcs, int64_t mc);
double coverage(std::span<const PermissionUsage> corpus);

// Ratio in [0, 1] as an integer percent, rounding half away from zero.
int rounded_percent(double ratio);

struct OverprivilegeEntry {
  std::string app;
  // M-only permissions sharing a group with a permission the app uses.
  std::set<std::string> same_group;
  // M-only permissions with no such companion, or with an unknown group.
  std::set<std::string> cross_group;
  bool operator==(const OverprivilegeEntry&) const = default;
};

// One entry per app, in corpus order; apps without M-only permissions get
// empty sets.
std::vector<OverprivilegeEntry> overprivilege_report(
    std::span<const PermissionUsage> corpus, const GroupTable& groups,
    std::vector<std::string>* warnings = nullptr);

struct SpecCoverage {
  int64_t mcs_instances = 0;
  std::set<std::string> mcs_permissions;  // with at least one MCS instance
  bool operator==(const SpecCoverage&) const = default;
};

struct SpecComparison {
  SpecCoverage a;
  SpecCoverage b;
  SpecDiff diff;
};

SpecComparison compare_specs(std::span<const ClassHierarchy> corpus,
                             const PermissionSpec& a, const PermissionSpec& b,
                             const CollectOptions& options = {});

struct EvalLabels {
  int64_t detected = 0;
  int64_t undetected_valid = 0;
  int64_t undetected_invalid = 0;
  int64_t cha_unreachable = 0;
  int64_t invalid_path_sensitives = 0;
};

struct EvalMetrics {
  std::optional<double> recall;     // nullopt when undefined
  std::optional<double> precision;  // nullopt when undefined
};

// recall = detected / (detected + undetected_valid)
// precision = (detected - invalid_path_sensitives) / detected
// Throws ValidationError on negative counts.
EvalMetrics eval_metrics(const EvalLabels& labels);

// Links every *.json app model directly under `dir` against the shared
// overlays. Sorted by app name.
std::vector<LinkedProgram> load_corpus(const std::filesystem::path& dir,
                                       std::span<const AppModel> overlays,
                                       const LinkConfig& config = {});

// app,permission,label,group,sites
std::string usage_csv(std::span<const PermissionUsage> corpus,
                      const GroupTable* groups = nullptr);

// Label counts, coverage and, when groups are given, over-privilege.
std::string corpus_summary(std::span<const PermissionUsage> corpus,
                           const GroupTable* groups,
                           const std::vector<std::string>& warnings);

std::string write_comparison(const SpecComparison& comparison);

}  // namespace permreach
