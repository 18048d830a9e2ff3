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

// Sensitive-site detection, reachability traversal from callbacks, and the
// CHA reachability partition used to audit a traversal.

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "permreach/appmodel.hpp"
#include "permreach/entrypoints.hpp"
#include "permreach/hierarchy.hpp"
#include "permreach/permspec.hpp"
#include "permreach/pointsto.hpp"

namespace permreach {

enum class SensitiveKind { kMethod, kField };

std::string_view to_string(SensitiveKind kind);

struct SensitiveSite {
  SiteId site;
  SensitiveKind kind = SensitiveKind::kMethod;
  // Method signature for kMethod; field ids or literal values for kField.
  std::set<std::string> matched_keys;
  std::set<std::string> permissions;
  bool via_parametric = false;

  auto operator<=>(const SensitiveSite&) const = default;
};

struct SensitiveScan {
  std::vector<SensitiveSite> sites;  // sorted
  std::vector<std::string> warnings;
};

// Scans every invoke in app and library bodies. A method entry matches the
// resolved declaration. A parametric entry matches when an intraprocedural
// value of its argument is a sensitive field id, or a literal equal to the
// constant value of a sensitive field. One site may yield both kinds.
// Entries over several arguments are skipped with a warning.
SensitiveScan find_sensitive_sites(const ClassHierarchy& hierarchy,
                                   const PermissionSpec& spec);

enum class Mode { kCfa0, kCfa1 };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

struct Limits {
  int max_depth = 50;        // methods on one path, callback included
  int max_paths = 100;       // recorded paths per sensitive and insertion point
  int64_t max_steps = 1000000;  // method visits per callback
};

struct PathNode {
  std::string method;
  SiteId entry;  // invoke that entered `method`
  auto operator<=>(const PathNode&) const = default;
};

struct PathRecord {
  std::vector<PathNode> nodes;
  bool ambiguous = false;
  bool operator==(const PathRecord&) const = default;
};

struct SensitiveHit {
  SiteId site;
  SensitiveKind kind = SensitiveKind::kMethod;
  std::set<std::string> matched_keys;
  std::set<std::string> permissions;
  std::vector<PathRecord> paths;
  bool truncated = false;
  bool operator==(const SensitiveHit&) const = default;
};

struct InsertionPoint {
  int stmt = 0;  // index in the callback body
  std::set<std::string> permissions;
  std::vector<SensitiveHit> sensitives;  // sorted by (site, kind)
  bool operator==(const InsertionPoint&) const = default;
};

struct CallbackReport {
  std::string host;
  std::string method;
  std::vector<InsertionPoint> insertion_points;  // sorted by stmt
  bool operator==(const CallbackReport&) const = default;
};

struct ReportSummary {
  int64_t callbacks = 0;
  int64_t flagged_callbacks = 0;
  int64_t insertion_points = 0;
  int64_t sensitives = 0;
  int64_t detected_sensitives = 0;
  int64_t paths = 0;
  int64_t ambiguous_paths = 0;
  bool depth_truncated = false;
  bool paths_truncated = false;
  bool steps_truncated = false;
  bool operator==(const ReportSummary&) const = default;
};

struct AnalysisReport {
  std::string app;
  Mode mode = Mode::kCfa1;
  bool augment = true;
  std::vector<CallbackReport> callbacks;  // flagged only, sorted
  ReportSummary summary;
  std::vector<std::string> warnings;
  bool operator==(const AnalysisReport&) const = default;
};

// Depth-first search from every root of the generated entry. A method on
// the current path is not re-entered. In kCfa1 mode each call descends only
// through the edges that survive context filtering. Every sensitive site in
// a visited method records the current path, at the insertion point given
// by the first call of the path.
AnalysisReport traverse(const ClassHierarchy& hierarchy, const CallGraph& graph,
                        const PointsToSolution& solution,
                        std::span<const SensitiveSite> sensitives, Mode mode,
                        Limits limits = {});

// Sensitive sites reached by at least one path.
std::set<SiteId> detected_sites(const AnalysisReport& report);

struct ChaPartition {
  std::set<SiteId> unreachable;
  std::set<SiteId> cha_reachable_undetected;
  std::set<SiteId> detected;
  bool operator==(const ChaPartition&) const = default;
};

// Methods reachable from the entry when every invoke expands to all of its
// CHA targets.
std::set<std::string> cha_reachable_methods(const ClassHierarchy& hierarchy);

// Throws InconsistentInputError when a detected site is not CHA-reachable.
ChaPartition cha_reach_partition(const ClassHierarchy& hierarchy,
                                 std::span<const SensitiveSite> sensitives,
                                 const std::set<SiteId>& detected);

enum class ReportFormat { kJson, kText };

std::string write_report(const AnalysisReport& report,
                         ReportFormat format = ReportFormat::kJson);
// Reads the JSON form.
AnalysisReport read_report(std::string_view text,
                           std::string_view source = "<report>");

std::string write_partition(const ChaPartition& partition);

struct AnalysisOptions {
  Mode mode = Mode::kCfa1;
  bool augment = true;
  std::optional<int> augment_passes;  // nullopt: fixpoint
  Limits limits;
};

// Every intermediate product of one analysis run.
struct AnalysisRun {
  ClassHierarchy hierarchy;  // over the program with its generated entry
  std::vector<CallbackRef> callbacks;
  PointsToSolution solution;
  CallGraph base_graph;  // before augmentation
  CallGraph graph;       // the graph traversed
  SensitiveScan sensitives;
  AnalysisReport report;

  const LinkedProgram& program() const { return hierarchy.program(); }
};

// Callbacks, entry generation, 0-CFA, optional augmentation, sensitive
// detection and traversal over an already linked program.
AnalysisRun run_analysis(const LinkedProgram& linked, const PermissionSpec& spec,
                         const AnalysisOptions& options = {});

}  // namespace permreach
