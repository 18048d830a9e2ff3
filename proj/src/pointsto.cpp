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

#include "permreach/pointsto.hpp"

#include <deque>

#include "json_util.hpp"
#include "permreach/error.hpp"

namespace permreach {

namespace {

const SiteSet kNoSites;
const std::set<CallEdge> kNoEdges;

// Worklist solver over interned nodes. Allocation sites are interned too so
// the propagation works on small integers.
class Solver {
 public:
  explicit Solver(const ClassHierarchy& h) : h_(h), program_(h.program()) {
    entry_ = program_.entry()->main_sig;
  }

  SolveResult run() {
    make_reachable(entry_);
    while (!work_.empty()) {
      int n = work_.front();
      work_.pop_front();
      queued_[n] = false;
      auto delta = std::move(delta_[n]);
      delta_[n].clear();
      propagate(n, delta);
    }
    return extract();
  }

 private:
  enum class NodeKind { kVar, kField, kStatic, kRet };

  struct NodeKey {
    NodeKind kind;
    std::string a;  // method / field id
    std::string b;  // local / field name
    int alloc = -1;
    auto operator<=>(const NodeKey&) const = default;
  };

  struct Load {
    std::string field;
    int dst;
  };
  struct Store {
    std::string field;
    int src;
  };
  struct Call {
    SiteId site;
    const InvokeStmt* invoke;
    std::string declared;
    std::string subsig;
  };

  int node(NodeKey key) {
    auto [it, inserted] = ids_.emplace(std::move(key), static_cast<int>(keys_.size()));
    if (inserted) {
      keys_.push_back(it->first);
      pts_.emplace_back();
      delta_.emplace_back();
      queued_.push_back(false);
      succ_.emplace_back();
      loads_.emplace_back();
      stores_.emplace_back();
      calls_.emplace_back();
    }
    return it->second;
  }

  int var(const std::string& method, const std::string& v) {
    return node({NodeKind::kVar, method, v});
  }
  int field(int alloc, const std::string& f) {
    return node({NodeKind::kField, "", f, alloc});
  }
  int static_cell(const std::string& id) { return node({NodeKind::kStatic, id, ""}); }
  int ret(const std::string& method) { return node({NodeKind::kRet, method, ""}); }

  int alloc(const SiteId& site, const std::string& type) {
    auto [it, inserted] = alloc_ids_.emplace(site, static_cast<int>(allocs_.size()));
    if (inserted) {
      allocs_.push_back(site);
      alloc_types_.push_back(type);
    }
    return it->second;
  }

  void add_pts(int n, const std::set<int>& sites) {
    bool changed = false;
    for (int s : sites) {
      if (pts_[n].insert(s).second) {
        delta_[n].insert(s);
        changed = true;
      }
    }
    if (changed && !queued_[n]) {
      queued_[n] = true;
      work_.push_back(n);
    }
  }

  void add_copy(int src, int dst) {
    if (src == dst || !succ_[src].insert(dst).second) return;
    if (!pts_[src].empty()) add_pts(dst, pts_[src]);
  }

  void propagate(int n, const std::set<int>& delta) {
    for (int s : succ_[n]) add_pts(s, delta);
    // Indexed loops: the handlers below may grow these vectors.
    for (size_t i = 0; i < loads_[n].size(); ++i) {
      auto l = loads_[n][i];
      for (int a : delta) add_copy(field(a, l.field), l.dst);
    }
    for (size_t i = 0; i < stores_[n].size(); ++i) {
      auto s = stores_[n][i];
      for (int a : delta) add_copy(s.src, field(a, s.field));
    }
    for (size_t i = 0; i < calls_[n].size(); ++i) {
      auto c = calls_[n][i];
      for (int a : delta) dispatch_on(c, a);
    }
  }

  EdgeKind edge_kind(const SiteId& site) const {
    return site.method == entry_ ? EdgeKind::kEntry : EdgeKind::kPointsTo;
  }

  // Wires arguments and the return value once per (site, target).
  void link(const SiteId& site, const InvokeStmt& inv, const std::string& target) {
    if (!linked_.emplace(site, target).second) return;
    const auto* callee = program_.find_method(target);
    if (!callee || !callee->has_body()) return;
    for (size_t i = 0; i < inv.args.size(); ++i) {
      add_copy(var(site.method, inv.args[i]), var(target, param_var(i)));
    }
    if (inv.target) add_copy(ret(target), var(site.method, *inv.target));
  }

  void dispatch_on(const Call& c, int a) {
    const auto& type = alloc_types_[a];
    if (!h_.is_subtype(type, c.declared)) return;
    auto target = h_.dispatch(type, c.subsig);
    if (!target) return;
    graph_.add_edge(c.site, {*target, edge_kind(c.site)});
    make_reachable(*target);
    const auto* callee = program_.find_method(*target);
    if (callee && callee->has_body() && !callee->is_static) {
      add_pts(var(*target, std::string(kThisVar)), {a});
    }
    link(c.site, *c.invoke, *target);
  }

  void make_reachable(const std::string& method) {
    if (!graph_.add_reachable(method)) return;
    const auto* decl = program_.find_method(method);
    if (!decl || !decl->has_body()) return;
    const auto& body = *decl->body;
    for (size_t i = 0; i < body.size(); ++i) {
      SiteId site{method, static_cast<int>(i)};
      const auto& stmt = body[i];
      if (const auto* s = std::get_if<NewStmt>(&stmt)) {
        add_pts(var(method, s->target), {alloc(site, s->type)});
      } else if (const auto* s = std::get_if<ConstStrStmt>(&stmt)) {
        add_pts(var(method, s->target), {alloc(site, "java.lang.String")});
      } else if (const auto* s = std::get_if<AssignStmt>(&stmt)) {
        add_copy(var(method, s->source), var(method, s->target));
      } else if (const auto* s = std::get_if<LoadStaticStmt>(&stmt)) {
        add_copy(static_cell(s->field), var(method, s->target));
      } else if (const auto* s = std::get_if<StoreStaticStmt>(&stmt)) {
        add_copy(var(method, s->source), static_cell(s->field));
      } else if (const auto* s = std::get_if<LoadFieldStmt>(&stmt)) {
        int base = var(method, s->base);
        int dst = var(method, s->target);
        loads_[base].push_back({s->field, dst});
        auto current = pts_[base];
        for (int a : current) add_copy(field(a, s->field), dst);
      } else if (const auto* s = std::get_if<StoreFieldStmt>(&stmt)) {
        int base = var(method, s->base);
        int src = var(method, s->source);
        stores_[base].push_back({s->field, src});
        auto current = pts_[base];
        for (int a : current) add_copy(src, field(a, s->field));
      } else if (const auto* s = std::get_if<InvokeStmt>(&stmt)) {
        handle_invoke(site, *s);
      } else if (const auto* s = std::get_if<ReturnStmt>(&stmt)) {
        if (s->value) add_copy(var(method, *s->value), ret(method));
      }
    }
  }

  void handle_invoke(const SiteId& site, const InvokeStmt& inv) {
    if (inv.kind == InvokeKind::kStatic || inv.kind == InvokeKind::kSpecial) {
      auto target = h_.direct_target(inv);
      if (!target) return;
      graph_.add_edge(site, {*target, edge_kind(site)});
      make_reachable(*target);
      const auto* callee = program_.find_method(*target);
      if (inv.receiver && callee && callee->has_body() && !callee->is_static) {
        add_copy(var(site.method, *inv.receiver), var(*target, std::string(kThisVar)));
      }
      link(site, inv, *target);
      return;
    }
    auto ref = MethodRef::parse(inv.method);
    Call c{site, &inv, ref.cls, ref.subsignature()};
    int recv = var(site.method, *inv.receiver);
    calls_[recv].push_back(c);
    auto current = pts_[recv];
    for (int a : current) dispatch_on(c, a);
  }

  SiteSet to_sites(const std::set<int>& s) const {
    SiteSet out;
    for (int a : s) out.insert(allocs_[a]);
    return out;
  }

  SolveResult extract() {
    SolveResult r;
    for (size_t i = 0; i < allocs_.size(); ++i) {
      r.solution.set_alloc_type(allocs_[i], alloc_types_[i]);
    }
    for (size_t n = 0; n < keys_.size(); ++n) {
      if (pts_[n].empty()) continue;
      const auto& k = keys_[n];
      switch (k.kind) {
        case NodeKind::kVar:
          r.solution.set_pts({k.a, k.b}, to_sites(pts_[n]));
          break;
        case NodeKind::kField:
          r.solution.set_field_pts({allocs_[k.alloc], k.b}, to_sites(pts_[n]));
          break;
        case NodeKind::kStatic:
          r.solution.set_static_pts(k.a, to_sites(pts_[n]));
          break;
        case NodeKind::kRet:
          break;
      }
    }
    r.graph = std::move(graph_);
    return r;
  }

  const ClassHierarchy& h_;
  const LinkedProgram& program_;
  std::string entry_;

  std::map<NodeKey, int> ids_;
  std::vector<NodeKey> keys_;
  std::vector<std::set<int>> pts_;
  std::vector<std::set<int>> delta_;
  std::vector<bool> queued_;
  std::vector<std::set<int>> succ_;
  std::vector<std::vector<Load>> loads_;
  std::vector<std::vector<Store>> stores_;
  std::vector<std::vector<Call>> calls_;
  std::deque<int> work_;

  std::map<SiteId, int> alloc_ids_;
  std::vector<SiteId> allocs_;
  std::vector<std::string> alloc_types_;

  std::set<std::pair<SiteId, std::string>> linked_;
  CallGraph graph_;
};

}  // namespace

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kPointsTo: return "pointsto";
    case EdgeKind::kAugmented: return "augmented";
    case EdgeKind::kEntry: return "entry";
  }
  return "pointsto";
}

const std::set<CallEdge>& CallGraph::edges_at(const SiteId& site) const {
  auto it = edges_.find(site);
  return it == edges_.end() ? kNoEdges : it->second;
}

size_t CallGraph::edge_count() const {
  size_t n = 0;
  for (const auto& [_, e] : edges_) n += e.size();
  return n;
}

bool CallGraph::add_edge(const SiteId& site, CallEdge edge) {
  return edges_[site].insert(std::move(edge)).second;
}

bool CallGraph::add_reachable(const std::string& method) {
  return reachable_.insert(method).second;
}

const SiteSet& PointsToSolution::pts(std::string_view method, std::string_view var) const {
  auto it = vars_.find({std::string(method), std::string(var)});
  return it == vars_.end() ? kNoSites : it->second;
}

const SiteSet& PointsToSolution::field_pts(const SiteId& alloc, std::string_view field) const {
  auto it = fields_.find({alloc, std::string(field)});
  return it == fields_.end() ? kNoSites : it->second;
}

const SiteSet& PointsToSolution::static_pts(std::string_view field_id) const {
  auto it = statics_.find(std::string(field_id));
  return it == statics_.end() ? kNoSites : it->second;
}

const std::string* PointsToSolution::alloc_type(const SiteId& alloc) const {
  auto it = alloc_types_.find(alloc);
  return it == alloc_types_.end() ? nullptr : &it->second;
}

void PointsToSolution::set_pts(VarKey key, SiteSet sites) {
  if (sites.empty()) {
    vars_.erase(key);
  } else {
    vars_[std::move(key)] = std::move(sites);
  }
}

void PointsToSolution::set_field_pts(FieldKey key, SiteSet sites) {
  if (sites.empty()) {
    fields_.erase(key);
  } else {
    fields_[std::move(key)] = std::move(sites);
  }
}

void PointsToSolution::set_static_pts(std::string field, SiteSet sites) {
  if (sites.empty()) {
    statics_.erase(field);
  } else {
    statics_[std::move(field)] = std::move(sites);
  }
}

void PointsToSolution::set_alloc_type(SiteId site, std::string type) {
  alloc_types_[std::move(site)] = std::move(type);
}

SolveResult solve_0cfa(const ClassHierarchy& hierarchy) {
  if (!hierarchy.program().entry()) {
    throw Error("solve_0cfa: program has no generated entry method");
  }
  return Solver(hierarchy).run();
}

CallGraph augment_call_graph(CallGraph graph, const ClassHierarchy& hierarchy,
                             AugmentOptions options) {
  const auto& program = hierarchy.program();
  for (int pass = 0; !options.max_passes || pass < *options.max_passes; ++pass) {
    bool changed = false;
    auto snapshot = graph.reachable();
    for (const auto& method : snapshot) {
      const auto* decl = program.find_method(method);
      if (!decl || !decl->has_body()) continue;
      const auto& body = *decl->body;
      for (size_t i = 0; i < body.size(); ++i) {
        const auto* inv = std::get_if<InvokeStmt>(&body[i]);
        if (!inv) continue;
        SiteId site{method, static_cast<int>(i)};
        if (!graph.edges_at(site).empty()) continue;
        ChaTargets targets;
        try {
          targets = hierarchy.cha_targets(*inv);
        } catch (const UnknownTypeError&) {
          continue;
        }
        if (!targets.unique_with_body()) continue;
        const auto& target = *targets.with_body.begin();
        graph.add_edge(site, {target, EdgeKind::kAugmented});
        graph.add_reachable(target);
        changed = true;
      }
    }
    if (!changed) break;
  }
  return graph;
}

std::set<std::string> reachable_methods(const CallGraph& graph,
                                        const std::set<std::string>& roots) {
  std::map<std::string, std::vector<std::string>, std::less<>> succ;
  for (const auto& [site, edges] : graph.edges()) {
    for (const auto& e : edges) succ[site.method].push_back(e.target);
  }
  std::set<std::string> seen;
  std::vector<std::string> work(roots.begin(), roots.end());
  while (!work.empty()) {
    auto m = std::move(work.back());
    work.pop_back();
    if (!seen.insert(m).second) continue;
    auto it = succ.find(m);
    if (it == succ.end()) continue;
    for (const auto& t : it->second) {
      if (!seen.count(t)) work.push_back(t);
    }
  }
  return seen;
}

std::string write_call_graph(const CallGraph& graph) {
  auto out = detail::ordered_json::array();
  for (const auto& [site, edges] : graph.edges()) {
    for (const auto& e : edges) {
      out.push_back({{"site", site.to_string()},
                     {"target", e.target},
                     {"provenance", to_string(e.kind)}});
    }
  }
  return out.dump(2) + "\n";
}

}  // namespace permreach
