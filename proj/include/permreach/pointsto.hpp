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

// Context-insensitive Andersen-style points-to analysis with on-the-fly call
// graph construction, and CHA augmentation of the resulting call graph.
//
// Constraint rules, applied only to methods reachable from the entry:
//
//   x = new T / x = "s"     site in pts(x)
//   x = y                   pts(y) <= pts(x)
//   x = y.f                 for a in pts(y): fpts(a, f) <= pts(x)
//   y.f = x                 for a in pts(y): pts(x) <= fpts(a, f)
//   x = C.F  /  C.F = x     through the global cell spts(C#F)
//   r.m(args) virtual       for a in pts(r) with type(a) <: declared class:
//                           edge to dispatch(type(a), m); a flows to `this`
//   static / special        edge to the direct target
//
// Arguments flow to `p0..`, returned values to the call's target. Methods
// without a body contribute nothing.

#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "permreach/appmodel.hpp"
#include "permreach/hierarchy.hpp"

namespace permreach {

enum class EdgeKind { kPointsTo, kAugmented, kEntry };

std::string_view to_string(EdgeKind kind);

struct CallEdge {
  std::string target;
  EdgeKind kind = EdgeKind::kPointsTo;
  auto operator<=>(const CallEdge&) const = default;
};

class CallGraph {
 public:
  const std::set<CallEdge>& edges_at(const SiteId& site) const;
  const std::map<SiteId, std::set<CallEdge>>& edges() const { return edges_; }
  const std::set<std::string>& reachable() const { return reachable_; }
  bool is_reachable(const std::string& method) const {
    return reachable_.count(method) != 0;
  }
  size_t edge_count() const;

  // Both return true when the graph changed.
  bool add_edge(const SiteId& site, CallEdge edge);
  bool add_reachable(const std::string& method);

  bool operator==(const CallGraph&) const = default;

 private:
  std::map<SiteId, std::set<CallEdge>> edges_;
  std::set<std::string> reachable_;
};

// pts0 / fpts0 / spts0 at the fixpoint. Empty sets are not stored.
class PointsToSolution {
 public:
  using VarKey = std::pair<std::string, std::string>;    // (method, local)
  using FieldKey = std::pair<SiteId, std::string>;       // (alloc, field)

  const SiteSet& pts(std::string_view method, std::string_view var) const;
  const SiteSet& field_pts(const SiteId& alloc, std::string_view field) const;
  const SiteSet& static_pts(std::string_view field_id) const;
  const std::string* alloc_type(const SiteId& alloc) const;

  const std::map<VarKey, SiteSet>& var_map() const { return vars_; }
  const std::map<FieldKey, SiteSet>& field_map() const { return fields_; }
  const std::map<std::string, SiteSet>& static_map() const { return statics_; }
  const std::map<SiteId, std::string>& alloc_types() const { return alloc_types_; }

  void set_pts(VarKey key, SiteSet sites);
  void set_field_pts(FieldKey key, SiteSet sites);
  void set_static_pts(std::string field, SiteSet sites);
  void set_alloc_type(SiteId site, std::string type);

  bool operator==(const PointsToSolution&) const = default;

 private:
  std::map<VarKey, SiteSet> vars_;
  std::map<FieldKey, SiteSet> fields_;
  std::map<std::string, SiteSet> statics_;
  std::map<SiteId, std::string> alloc_types_;
};

struct SolveResult {
  PointsToSolution solution;
  CallGraph graph;
};

// Fixpoint from the synthetic entry of hierarchy.program(). Throws Error
// when no entry has been generated.
SolveResult solve_0cfa(const ClassHierarchy& hierarchy);

struct AugmentOptions {
  // nullopt iterates to a fixpoint; 1 is a single post-processing pass.
  std::optional<int> max_passes;
};

// Adds an augmented edge at every invoke of a reachable method that has no
// edge and exactly one CHA target, which has a body. Points-to sets are not
// recomputed.
CallGraph augment_call_graph(CallGraph graph, const ClassHierarchy& hierarchy,
                             AugmentOptions options = {});

std::set<std::string> reachable_methods(const CallGraph& graph,
                                        const std::set<std::string>& roots);

// [{"site": ..., "target": ..., "provenance": "pointsto"|"augmented"|"entry"}]
std::string write_call_graph(const CallGraph& graph);

}  // namespace permreach
