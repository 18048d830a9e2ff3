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

// One-call-site context refinement evaluated on demand over a 0-CFA
// solution. A context is the invoke that entered the method under analysis;
// roots are the invokes of the generated entry method.
//
// Inside method m under context c, refined sets are the union over the defs
// of a local:
//
//   x = new T / x = "s"     that site
//   x = y                   refined(y)
//   x = y.f                 union of fpts0(a, f) for a in refined(y)
//   x = C.F                 spts0(C#F)
//   x = call(...)           pts0(x)
//   p<i>                    pts0 of argument i at c, in the caller
//   this                    pts0 of the receiver at c, restricted to the
//                           allocations that dispatch to m
//
// and are then intersected with pts0(x). A local caught in a dependency
// cycle through assigns or load bases takes pts0.

#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "permreach/hierarchy.hpp"
#include "permreach/pointsto.hpp"

namespace permreach {

struct Context {
  SiteId entry_site;
  auto operator<=>(const Context&) const = default;
};

struct FilteredEdges {
  std::set<CallEdge> edges;
  bool ambiguous = false;
};

// All edges at the site. Ambiguous when more than one is not augmented.
FilteredEdges unfiltered_edges(const CallGraph& graph, const SiteId& site);

// Memoizing query object. Not thread-safe; use one per traversal.
class Refiner {
 public:
  Refiner(const ClassHierarchy& hierarchy, const PointsToSolution& solution,
          const CallGraph& graph);

  // Throws InvalidContextError when ctx is not an invoke with an edge to
  // `method`.
  const SiteSet& refine_pts(std::string_view method, std::string_view var,
                            const Context& ctx);

  // Augmented edges and edges of static or special invokes pass unchanged.
  // Other edges survive when some refined receiver allocation dispatches to
  // their target; an empty refined receiver keeps them all. Ambiguous when
  // more than one non-augmented edge survives.
  FilteredEdges filter_edges(const SiteId& site, const Context& ctx);

 private:
  using LocalSets = std::map<std::string, SiteSet, std::less<>>;

  const LocalSets& refine_method(const std::string& method, const Context& ctx);
  SiteSet this_allocs(const std::string& method, const Context& ctx) const;

  const ClassHierarchy& hierarchy_;
  const PointsToSolution& solution_;
  const CallGraph& graph_;
  std::map<std::pair<std::string, Context>, LocalSets> memo_;
};

}  // namespace permreach
