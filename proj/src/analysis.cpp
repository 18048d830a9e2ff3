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

#include "permreach/analysis.hpp"

#include <deque>
#include <map>
#include <utility>

#include "permreach/cfa1.hpp"
#include "permreach/error.hpp"
#include "permreach/values.hpp"

namespace permreach {

std::string_view to_string(SensitiveKind kind) {
  return kind == SensitiveKind::kMethod ? "method" : "field";
}

std::string_view to_string(Mode mode) { return mode == Mode::kCfa0 ? "cfa0" : "cfa1"; }

Mode parse_mode(std::string_view text) {
  if (text == "cfa0" || text == "0") return Mode::kCfa0;
  if (text == "cfa1" || text == "1") return Mode::kCfa1;
  throw ValidationError("unknown analysis mode '" + std::string(text) + "'");
}

SensitiveScan find_sensitive_sites(const ClassHierarchy& hierarchy,
                                   const PermissionSpec& spec) {
  const auto& program = hierarchy.program();
  SensitiveScan out;
  std::set<std::string> warned;
  for (const auto& [sig, method] : program.bodies()) {
    if (!program.is_app_code(owner_of(sig))) continue;
    const auto& body = *method->body;
    for (size_t i = 0; i < body.size(); ++i) {
      const auto* inv = std::get_if<InvokeStmt>(&body[i]);
      if (!inv) continue;
      SiteId site{sig, static_cast<int>(i)};
      auto decl = hierarchy.resolve_declaration(*inv);

      const auto* entry = spec.find_method(decl);
      if (!entry && decl != inv->method) entry = spec.find_method(inv->method);
      if (entry) {
        SensitiveSite s;
        s.site = site;
        s.kind = SensitiveKind::kMethod;
        s.matched_keys.insert(entry->key);
        s.permissions = entry->permissions;
        out.sites.push_back(std::move(s));
      }

      auto parametric = spec.parametric_for(decl);
      if (parametric.empty() && decl != inv->method) {
        parametric = spec.parametric_for(inv->method);
      }
      SensitiveSite field;
      field.site = site;
      field.kind = SensitiveKind::kField;
      field.via_parametric = true;
      for (const auto* p : parametric) {
        if (p->is_multi_arg()) {
          if (warned.insert(p->key).second) {
            out.warnings.push_back("parametric entry " + p->spec_key().to_string() +
                                   " depends on several arguments; not matched");
          }
          continue;
        }
        auto index = static_cast<size_t>(p->arg_indices.front());
        if (index >= inv->args.size()) continue;
        for (const auto& v : intraproc_values(sig, *method, inv->args[index])) {
          if (v.kind == Value::Kind::kStaticField) {
            if (const auto* f = spec.find_field(v.text)) {
              field.matched_keys.insert(f->key);
              field.permissions.insert(f->permissions.begin(), f->permissions.end());
            }
          } else if (v.kind == Value::Kind::kLiteral) {
            for (const auto* f : spec.fields_with_value(v.text)) {
              field.matched_keys.insert(v.text);
              field.permissions.insert(f->permissions.begin(), f->permissions.end());
            }
          }
        }
      }
      if (!field.permissions.empty()) out.sites.push_back(std::move(field));
    }
  }
  std::sort(out.sites.begin(), out.sites.end());
  return out;
}

namespace {

// Methods from which some method containing a sensitive site is reachable.
std::set<std::string> methods_reaching(const CallGraph& graph,
                                       const std::set<std::string>& goals) {
  std::map<std::string, std::set<std::string>> callers;
  for (const auto& [site, edges] : graph.edges()) {
    for (const auto& e : edges) callers[e.target].insert(site.method);
  }
  std::set<std::string> out;
  std::vector<std::string> work(goals.begin(), goals.end());
  while (!work.empty()) {
    auto m = std::move(work.back());
    work.pop_back();
    if (!out.insert(m).second) continue;
    for (const auto& c : callers[m]) {
      if (!out.count(c)) work.push_back(c);
    }
  }
  return out;
}

class Traversal {
 public:
  Traversal(const ClassHierarchy& hierarchy, const CallGraph& graph,
            const PointsToSolution& solution, std::span<const SensitiveSite> sensitives,
            Mode mode, Limits limits)
      : program_(hierarchy.program()),
        graph_(graph),
        refiner_(hierarchy, solution, graph),
        mode_(mode),
        limits_(limits) {
    std::set<std::string> goals;
    for (const auto& s : sensitives) {
      by_site_[s.site].push_back(&s);
      goals.insert(s.site.method);
    }
    useful_ = methods_reaching(graph, goals);
  }

  AnalysisReport run() {
    AnalysisReport report;
    report.app = program_.name();
    report.mode = mode_;
    const auto& entry = program_.entry();
    if (!entry) throw Error("traverse: program has no generated entry method");
    for (const auto& root : entry->roots) {
      ++report.summary.callbacks;
      hits_.clear();
      steps_ = 0;
      first_call_ = -1;
      visit(root.callback, Context{root.site});
      if (hits_.empty()) continue;
      CallbackReport cb;
      cb.host = root.host;
      cb.method = root.callback;
      for (auto& [stmt, by_key] : hits_) {
        InsertionPoint ip;
        ip.stmt = stmt;
        for (auto& [_, hit] : by_key) {
          ip.permissions.insert(hit.permissions.begin(), hit.permissions.end());
          ip.sensitives.push_back(std::move(hit));
        }
        cb.insertion_points.push_back(std::move(ip));
      }
      report.callbacks.push_back(std::move(cb));
    }
    std::sort(report.callbacks.begin(), report.callbacks.end(),
              [](const CallbackReport& a, const CallbackReport& b) {
                return std::tie(a.host, a.method) < std::tie(b.host, b.method);
              });

    auto& s = report.summary;
    s.flagged_callbacks = static_cast<int64_t>(report.callbacks.size());
    s.sensitives = static_cast<int64_t>(by_site_.size());
    s.detected_sensitives = static_cast<int64_t>(detected_sites(report).size());
    for (const auto& cb : report.callbacks) {
      s.insertion_points += static_cast<int64_t>(cb.insertion_points.size());
      for (const auto& ip : cb.insertion_points) {
        for (const auto& h : ip.sensitives) {
          s.paths += static_cast<int64_t>(h.paths.size());
          for (const auto& p : h.paths) s.ambiguous_paths += p.ambiguous ? 1 : 0;
          s.paths_truncated = s.paths_truncated || h.truncated;
        }
      }
    }
    s.depth_truncated = depth_truncated_;
    s.steps_truncated = steps_truncated_;
    return report;
  }

 private:
  using HitKey = std::pair<SiteId, SensitiveKind>;

  void record(const SiteId& site) {
    auto it = by_site_.find(site);
    if (it == by_site_.end()) return;
    int stmt = nodes_.size() == 1 ? site.index : first_call_;
    for (const auto* s : it->second) {
      auto& hit = hits_[stmt][{s->site, s->kind}];
      if (hit.paths.empty()) {
        hit.site = s->site;
        hit.kind = s->kind;
        hit.matched_keys = s->matched_keys;
        hit.permissions = s->permissions;
      }
      if (static_cast<int>(hit.paths.size()) >= limits_.max_paths) {
        hit.truncated = true;
        continue;
      }
      hit.paths.push_back(PathRecord{nodes_, ambiguous_calls_ > 0});
    }
  }

  void visit(const std::string& method, const Context& ctx) {
    if (++steps_ > limits_.max_steps) {
      steps_truncated_ = true;
      return;
    }
    nodes_.push_back({method, ctx.entry_site});
    on_path_.insert(method);
    const auto* decl = program_.find_method(method);
    const auto& body = *decl->body;
    for (size_t i = 0; i < body.size(); ++i) {
      SiteId site{method, static_cast<int>(i)};
      record(site);
      if (!std::holds_alternative<InvokeStmt>(body[i])) continue;
      auto edges = mode_ == Mode::kCfa1 ? refiner_.filter_edges(site, ctx)
                                        : unfiltered_edges(graph_, site);
      for (const auto& e : edges.edges) {
        const auto* callee = program_.find_method(e.target);
        if (!callee || !callee->has_body() || on_path_.count(e.target) ||
            !useful_.count(e.target)) {
          continue;
        }
        if (static_cast<int>(nodes_.size()) >= limits_.max_depth) {
          depth_truncated_ = true;
          continue;
        }
        if (nodes_.size() == 1) first_call_ = static_cast<int>(i);
        ambiguous_calls_ += edges.ambiguous ? 1 : 0;
        visit(e.target, Context{site});
        ambiguous_calls_ -= edges.ambiguous ? 1 : 0;
      }
    }
    on_path_.erase(method);
    nodes_.pop_back();
  }

  const LinkedProgram& program_;
  const CallGraph& graph_;
  Refiner refiner_;
  Mode mode_;
  Limits limits_;
  std::map<SiteId, std::vector<const SensitiveSite*>> by_site_;
  std::set<std::string> useful_;

  std::vector<PathNode> nodes_;
  std::set<std::string> on_path_;
  int ambiguous_calls_ = 0;
  int first_call_ = -1;
  int64_t steps_ = 0;
  std::map<int, std::map<HitKey, SensitiveHit>> hits_;
  bool depth_truncated_ = false;
  bool steps_truncated_ = false;
};

}  // namespace

AnalysisReport traverse(const ClassHierarchy& hierarchy, const CallGraph& graph,
                        const PointsToSolution& solution,
                        std::span<const SensitiveSite> sensitives, Mode mode,
                        Limits limits) {
  return Traversal(hierarchy, graph, solution, sensitives, mode, limits).run();
}

std::set<SiteId> detected_sites(const AnalysisReport& report) {
  std::set<SiteId> out;
  for (const auto& cb : report.callbacks) {
    for (const auto& ip : cb.insertion_points) {
      for (const auto& h : ip.sensitives) {
        if (!h.paths.empty()) out.insert(h.site);
      }
    }
  }
  return out;
}

std::set<std::string> cha_reachable_methods(const ClassHierarchy& hierarchy) {
  const auto& program = hierarchy.program();
  const auto& entry = program.entry();
  if (!entry) throw Error("cha reachability: program has no generated entry method");
  std::set<std::string> seen;
  std::deque<std::string> work{entry->main_sig};
  while (!work.empty()) {
    auto m = std::move(work.front());
    work.pop_front();
    if (!seen.insert(m).second) continue;
    const auto* decl = program.find_method(m);
    if (!decl || !decl->has_body()) continue;
    for (const auto& s : *decl->body) {
      const auto* inv = std::get_if<InvokeStmt>(&s);
      if (!inv) continue;
      for (auto& t : hierarchy.cha_targets(*inv).all()) {
        if (!seen.count(t)) work.push_back(std::move(t));
      }
    }
  }
  return seen;
}

ChaPartition cha_reach_partition(const ClassHierarchy& hierarchy,
                                 std::span<const SensitiveSite> sensitives,
                                 const std::set<SiteId>& detected) {
  auto reachable = cha_reachable_methods(hierarchy);
  std::set<SiteId> all;
  for (const auto& s : sensitives) all.insert(s.site);
  ChaPartition out;
  for (const auto& d : detected) {
    if (!all.count(d)) {
      throw InconsistentInputError("detected site " + d.to_string() +
                                   " is not a sensitive site of this program");
    }
    if (!reachable.count(d.method)) {
      throw InconsistentInputError("detected site " + d.to_string() +
                                   " is not CHA-reachable from the entry");
    }
  }
  for (const auto& s : all) {
    if (detected.count(s)) {
      out.detected.insert(s);
    } else if (reachable.count(s.method)) {
      out.cha_reachable_undetected.insert(s);
    } else {
      out.unreachable.insert(s);
    }
  }
  return out;
}

AnalysisRun run_analysis(const LinkedProgram& linked, const PermissionSpec& spec,
                         const AnalysisOptions& options) {
  auto callbacks = detect_callbacks(ClassHierarchy(linked));
  ClassHierarchy hierarchy(generate_dummy_main(linked, callbacks));
  auto solved = solve_0cfa(hierarchy);
  auto graph = options.augment
                   ? augment_call_graph(solved.graph, hierarchy, {options.augment_passes})
                   : solved.graph;
  auto scan = find_sensitive_sites(hierarchy, spec);
  auto report = traverse(hierarchy, graph, solved.solution, scan.sites, options.mode,
                         options.limits);
  report.augment = options.augment;
  report.warnings = linked.warnings();
  report.warnings.insert(report.warnings.end(), scan.warnings.begin(),
                         scan.warnings.end());
  return AnalysisRun{std::move(hierarchy), std::move(callbacks),
                     std::move(solved.solution), std::move(solved.graph),
                     std::move(graph), std::move(scan), std::move(report)};
}

}  // namespace permreach
