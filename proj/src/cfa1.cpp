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

#include "permreach/cfa1.hpp"

#include <algorithm>
#include <functional>
#include <vector>

#include "permreach/error.hpp"

namespace permreach {

namespace {

bool is_receiver_dispatch(const InvokeStmt& inv) {
  return inv.kind == InvokeKind::kVirtual || inv.kind == InvokeKind::kInterface;
}

// Strongly connected components of the local dependency graph, emitted so
// that every component follows the components it depends on.
class Components {
 public:
  explicit Components(const std::map<std::string, std::set<std::string>>& deps)
      : deps_(deps) {
    for (const auto& [v, _] : deps_) {
      if (!index_.count(v)) connect(v);
    }
  }

  const std::vector<std::vector<std::string>>& order() const { return order_; }

 private:
  void connect(const std::string& v) {
    index_[v] = low_[v] = next_++;
    stack_.push_back(v);
    on_stack_.insert(v);
    auto it = deps_.find(v);
    if (it != deps_.end()) {
      for (const auto& w : it->second) {
        if (!index_.count(w)) {
          connect(w);
          low_[v] = std::min(low_[v], low_[w]);
        } else if (on_stack_.count(w)) {
          low_[v] = std::min(low_[v], index_[w]);
        }
      }
    }
    if (low_[v] != index_[v]) return;
    std::vector<std::string> comp;
    std::string w;
    do {
      w = stack_.back();
      stack_.pop_back();
      on_stack_.erase(w);
      comp.push_back(w);
    } while (w != v);
    order_.push_back(std::move(comp));
  }

  const std::map<std::string, std::set<std::string>>& deps_;
  std::map<std::string, int> index_;
  std::map<std::string, int> low_;
  std::vector<std::string> stack_;
  std::set<std::string> on_stack_;
  std::vector<std::vector<std::string>> order_;
  int next_ = 0;
};

SiteSet intersect(const SiteSet& a, const SiteSet& b) {
  SiteSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
  return out;
}

}  // namespace

FilteredEdges unfiltered_edges(const CallGraph& graph, const SiteId& site) {
  FilteredEdges out;
  out.edges = graph.edges_at(site);
  auto plain = std::count_if(out.edges.begin(), out.edges.end(), [](const CallEdge& e) {
    return e.kind != EdgeKind::kAugmented;
  });
  out.ambiguous = plain > 1;
  return out;
}

Refiner::Refiner(const ClassHierarchy& hierarchy, const PointsToSolution& solution,
                 const CallGraph& graph)
    : hierarchy_(hierarchy), solution_(solution), graph_(graph) {}

const SiteSet& Refiner::refine_pts(std::string_view method, std::string_view var,
                                   const Context& ctx) {
  static const SiteSet kEmpty;
  const auto& sets = refine_method(std::string(method), ctx);
  auto it = sets.find(var);
  return it == sets.end() ? kEmpty : it->second;
}

SiteSet Refiner::this_allocs(const std::string& method, const Context& ctx) const {
  const auto& inv = std::get<InvokeStmt>(*hierarchy_.program().stmt_at(ctx.entry_site));
  if (!inv.receiver) return {};
  const auto& recv = solution_.pts(ctx.entry_site.method, *inv.receiver);
  if (!is_receiver_dispatch(inv)) return recv;
  auto ref = MethodRef::parse(inv.method);
  auto subsig = ref.subsignature();
  SiteSet out;
  for (const auto& a : recv) {
    const auto* type = solution_.alloc_type(a);
    if (!type || !hierarchy_.is_subtype(*type, ref.cls)) continue;
    if (hierarchy_.dispatch(*type, subsig) == method) out.insert(a);
  }
  return out;
}

const Refiner::LocalSets& Refiner::refine_method(const std::string& method,
                                                 const Context& ctx) {
  auto key = std::make_pair(method, ctx);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;

  const auto& program = hierarchy_.program();
  const auto* stmt = program.stmt_at(ctx.entry_site);
  const auto* inv = stmt ? std::get_if<InvokeStmt>(stmt) : nullptr;
  const auto& edges = graph_.edges_at(ctx.entry_site);
  bool calls = std::any_of(edges.begin(), edges.end(),
                           [&](const CallEdge& e) { return e.target == method; });
  if (!inv || !calls) {
    throw InvalidContextError("context " + ctx.entry_site.to_string() +
                              " does not call " + method);
  }

  LocalSets out;
  const auto* decl = program.find_method(method);
  if (!decl || !decl->has_body()) return memo_[key] = std::move(out);
  const auto& body = *decl->body;

  std::map<std::string, std::vector<size_t>> defs;
  std::map<std::string, std::set<std::string>> deps;
  auto touch = [&](const std::string& v) { deps.try_emplace(v); };
  if (!decl->is_static) touch(std::string(kThisVar));
  for (size_t i = 0; i < decl->params.size(); ++i) touch(param_var(i));
  for (size_t i = 0; i < body.size(); ++i) {
    for (const auto& r : read_vars(body[i])) touch(r);
    const auto* d = defined_var(body[i]);
    if (!d) continue;
    touch(*d);
    defs[*d].push_back(i);
    if (const auto* a = std::get_if<AssignStmt>(&body[i])) {
      deps[*d].insert(a->source);
    } else if (const auto* l = std::get_if<LoadFieldStmt>(&body[i])) {
      deps[*d].insert(l->base);
    }
  }

  Components comps(deps);
  for (const auto& comp : comps.order()) {
    const auto& v = comp.front();
    const auto& pts0 = solution_.pts(method, v);
    bool cyclic = comp.size() > 1 || deps[v].count(v);
    if (cyclic) {
      for (const auto& c : comp) {
        const auto& p = solution_.pts(method, c);
        if (!p.empty()) out[c] = p;
      }
      continue;
    }
    SiteSet acc;
    if (v == kThisVar && !decl->is_static) {
      acc = this_allocs(method, ctx);
    } else if (auto pi = param_index(v); pi && *pi < decl->params.size() &&
                                         *pi < inv->args.size()) {
      acc = solution_.pts(ctx.entry_site.method, inv->args[*pi]);
    }
    for (size_t i : defs[v]) {
      const auto& s = body[i];
      SiteId site{method, static_cast<int>(i)};
      if (std::holds_alternative<NewStmt>(s) || std::holds_alternative<ConstStrStmt>(s)) {
        acc.insert(site);
      } else if (const auto* a = std::get_if<AssignStmt>(&s)) {
        if (auto it = out.find(a->source); it != out.end()) {
          acc.insert(it->second.begin(), it->second.end());
        }
      } else if (const auto* l = std::get_if<LoadFieldStmt>(&s)) {
        if (auto it = out.find(l->base); it != out.end()) {
          for (const auto& b : it->second) {
            const auto& f = solution_.field_pts(b, l->field);
            acc.insert(f.begin(), f.end());
          }
        }
      } else if (const auto* l = std::get_if<LoadStaticStmt>(&s)) {
        const auto& f = solution_.static_pts(l->field);
        acc.insert(f.begin(), f.end());
      } else if (std::holds_alternative<InvokeStmt>(s)) {
        acc.insert(pts0.begin(), pts0.end());
      }
    }
    auto refined = intersect(acc, pts0);
    if (!refined.empty()) out[v] = std::move(refined);
  }
  return memo_[key] = std::move(out);
}

FilteredEdges Refiner::filter_edges(const SiteId& site, const Context& ctx) {
  FilteredEdges out;
  const auto& all = graph_.edges_at(site);
  const auto* stmt = hierarchy_.program().stmt_at(site);
  const auto* inv = stmt ? std::get_if<InvokeStmt>(stmt) : nullptr;
  if (!inv || !is_receiver_dispatch(*inv)) return unfiltered_edges(graph_, site);

  const auto& recv = refine_pts(site.method, *inv->receiver, ctx);
  std::set<std::string> targets;
  auto ref = MethodRef::parse(inv->method);
  auto subsig = ref.subsignature();
  for (const auto& a : recv) {
    const auto* type = solution_.alloc_type(a);
    if (!type || !hierarchy_.is_subtype(*type, ref.cls)) continue;
    if (auto t = hierarchy_.dispatch(*type, subsig)) targets.insert(*t);
  }
  size_t plain = 0;
  for (const auto& e : all) {
    if (e.kind == EdgeKind::kAugmented) {
      out.edges.insert(e);
      continue;
    }
    if (recv.empty() || targets.count(e.target)) {
      out.edges.insert(e);
      ++plain;
    }
  }
  out.ambiguous = plain > 1;
  return out;
}

}  // namespace permreach
