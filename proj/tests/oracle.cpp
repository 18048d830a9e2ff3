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

#include "oracle.hpp"

#include <deque>
#include <functional>
#include <random>
#include <vector>

namespace permreach::oracle {

namespace {

MethodDecl stub(std::string name, std::vector<std::string> params,
                std::string ret = "void", bool is_static = false) {
  MethodDecl m;
  m.name = std::move(name);
  m.params = std::move(params);
  m.return_type = std::move(ret);
  m.is_static = is_static;
  return m;
}

ClassDecl framework_class(std::string name, std::optional<std::string> super,
                          ClassKind kind = ClassKind::kClass) {
  ClassDecl c;
  c.name = std::move(name);
  c.kind = kind;
  c.origin = Origin::kFramework;
  c.super = std::move(super);
  return c;
}

AppModel framework_model() {
  AppModel fw;
  fw.name = "gen-framework";
  fw.classes.push_back(framework_class("java.lang.Object", std::nullopt));
  auto activity = framework_class("android.app.Activity", "java.lang.Object");
  activity.methods.push_back(stub("onA", {}));
  activity.methods.push_back(stub("onB", {"java.lang.Object"}));
  fw.classes.push_back(activity);
  auto listener = framework_class("android.view.Listener", std::nullopt, ClassKind::kInterface);
  auto on_event = stub("onEvent", {});
  on_event.is_abstract = true;
  listener.methods.push_back(on_event);
  fw.classes.push_back(listener);
  auto button = framework_class("android.view.Button", "java.lang.Object");
  button.methods.push_back(stub("setListener", {"android.view.Listener"}));
  button.methods.push_back(stub("make", {}, "java.lang.Object"));
  fw.classes.push_back(button);
  auto sensor = framework_class("android.hw.Sensor", "java.lang.Object");
  sensor.methods.push_back(stub("s0", {}, "void", true));
  sensor.methods.push_back(stub("s1", {}, "void", true));
  fw.classes.push_back(sensor);
  return fw;
}

class Generator {
 public:
  explicit Generator(uint64_t seed) : rng_(seed) {}

  GeneratedCase run() {
    GeneratedCase out;
    out.framework = framework_model();
    out.app.name = "gen";
    out.app.manifest.target_api = 23;

    size_t n = pick(2, 5);
    for (size_t k = 0; k < n; ++k) names_.push_back("app.C" + std::to_string(k));
    size_t budget = 40;
    for (size_t k = 0; k < n; ++k) {
      ClassDecl c;
      c.name = names_[k];
      c.origin = Origin::kApp;
      // Later classes mostly extend earlier ones so that calls declared on
      // C0 have several candidate overrides.
      if (k == 0) {
        c.super = "android.app.Activity";
      } else if (chance(0.7)) {
        c.super = names_[pick(0, k - 1)];
      } else {
        c.super = chance(0.5) ? "java.lang.Object" : "android.app.Activity";
      }
      if (chance(0.3)) c.interfaces.push_back("android.view.Listener");
      if (k == 0) {
        FieldDecl g;
        g.name = "g";
        g.type = "java.lang.Object";
        g.is_static = true;
        c.fields.push_back(g);
      }
      bool activity = derives_activity(c, out.app);
      std::vector<MethodDecl> methods;
      if (k == 0 || chance(0.7)) methods.push_back(stub("m0", {}, "java.lang.Object"));
      if (k == 0 || chance(0.5)) methods.push_back(stub("m1", {"java.lang.Object"}, "java.lang.Object"));
      if (activity && (k == 0 || chance(0.8))) methods.push_back(stub("onA", {}));
      if (activity && chance(0.4)) methods.push_back(stub("onB", {"java.lang.Object"}));
      if (!c.interfaces.empty() && chance(0.8)) methods.push_back(stub("onEvent", {}));
      for (auto& m : methods) {
        size_t len = std::min(budget, pick(2, 7));
        budget -= len;
        m.body = body(m, len);
        out.statements += len;
      }
      c.methods = std::move(methods);
      out.app.classes.push_back(std::move(c));
    }
    out.app_classes = n;

    SpecEntry s0;
    s0.key = "android.hw.Sensor#s0()";
    s0.permissions = {"android.permission.P0"};
    out.spec.insert(s0);
    SpecEntry s1;
    s1.key = "android.hw.Sensor#s1()";
    s1.permissions = {"android.permission.P1"};
    out.spec.insert(s1);
    return out;
  }

 private:
  size_t pick(size_t lo, size_t hi) {
    return std::uniform_int_distribution<size_t>(lo, hi)(rng_);
  }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  bool derives_activity(const ClassDecl& c, const AppModel& app) const {
    std::optional<std::string> s = c.super;
    while (s) {
      if (*s == "android.app.Activity") return true;
      const ClassDecl* next = nullptr;
      for (const auto& e : app.classes) {
        if (e.name == *s) next = &e;
      }
      s = next ? next->super : std::nullopt;
    }
    return false;
  }

  std::string local(const MethodDecl& m) {
    std::vector<std::string> pool = {"this", "x0", "x1", "x2"};
    if (!m.params.empty()) pool.push_back("p0");
    return pool[pick(0, pool.size() - 1)];
  }
  std::string def() { return "x" + std::to_string(pick(0, 2)); }
  std::string cls() { return names_[pick(0, names_.size() - 1)]; }

  std::vector<Stmt> body(const MethodDecl& m, size_t len) {
    std::vector<Stmt> out;
    for (size_t i = 0; i < len; ++i) {
      if (i + 1 == len && m.return_type != "void" && chance(0.6)) {
        out.push_back(ReturnStmt{local(m)});
        continue;
      }
      switch (pick(0, 13)) {
        case 0:
        case 1:
        case 12:
          out.push_back(NewStmt{def(), cls()});
          break;
        case 2:
          out.push_back(AssignStmt{def(), local(m)});
          break;
        case 3:
          out.push_back(LoadFieldStmt{def(), local(m), chance(0.5) ? "f0" : "f1"});
          break;
        case 4:
          out.push_back(StoreFieldStmt{local(m), chance(0.5) ? "f0" : "f1", local(m)});
          break;
        case 5:
          out.push_back(chance(0.5) ? Stmt(LoadStaticStmt{def(), names_[0] + "#g"})
                                    : Stmt(StoreStaticStmt{names_[0] + "#g", local(m)}));
          break;
        case 6:
        case 7:
        case 13: {
          InvokeStmt inv;
          inv.kind = chance(0.85) ? InvokeKind::kVirtual : InvokeKind::kSpecial;
          inv.receiver = local(m);
          auto decl = chance(0.5) ? names_[0] : cls();
          if (chance(0.5)) {
            inv.method = decl + "#m0()";
          } else {
            inv.method = decl + "#m1(java.lang.Object)";
            inv.args.push_back(local(m));
          }
          if (chance(0.6)) inv.target = def();
          out.push_back(std::move(inv));
          break;
        }
        case 8:
        case 9: {
          InvokeStmt inv;
          inv.kind = InvokeKind::kStatic;
          inv.method = chance(0.5) ? "android.hw.Sensor#s0()" : "android.hw.Sensor#s1()";
          out.push_back(std::move(inv));
          break;
        }
        case 10: {
          InvokeStmt inv;
          inv.kind = InvokeKind::kInterface;
          inv.receiver = local(m);
          inv.method = "android.view.Listener#onEvent()";
          out.push_back(std::move(inv));
          break;
        }
        default: {
          InvokeStmt inv;
          inv.kind = InvokeKind::kVirtual;
          inv.receiver = local(m);
          inv.method = "android.view.Button#setListener(android.view.Listener)";
          inv.args.push_back(local(m));
          out.push_back(std::move(inv));
          break;
        }
      }
    }
    return out;
  }

  std::mt19937_64 rng_;
  std::vector<std::string> names_;
};

std::optional<std::string> declared_on_chain(const LinkedProgram& program, std::string cls,
                                             const std::string& subsig, bool skip_abstract) {
  for (const ClassDecl* c = program.find_class(cls); c;
       c = c->super ? program.find_class(*c->super) : nullptr) {
    for (const auto& m : c->methods) {
      if (m.subsignature() == subsig && !(skip_abstract && m.is_abstract)) {
        return make_method_sig(c->name, subsig);
      }
    }
  }
  return std::nullopt;
}

bool grow(SiteSet& dst, const SiteSet& src) {
  bool changed = false;
  for (const auto& s : src) changed = dst.insert(s).second || changed;
  return changed;
}

}  // namespace

GeneratedCase random_case(uint64_t seed) { return Generator(seed).run(); }

LinkedProgram link_case(const GeneratedCase& c) {
  std::vector<AppModel> overlays{c.framework};
  return link_program(c.app, overlays);
}

bool naive_subtype(const LinkedProgram& program, const std::string& sub,
                   const std::string& super) {
  std::set<std::string> seen;
  std::deque<std::string> work{sub};
  while (!work.empty()) {
    auto t = work.front();
    work.pop_front();
    if (t == super) return true;
    if (!seen.insert(t).second) continue;
    const auto* c = program.find_class(t);
    if (!c) continue;
    if (c->super) work.push_back(*c->super);
    for (const auto& i : c->interfaces) work.push_back(i);
  }
  return false;
}

std::optional<std::string> naive_dispatch(const LinkedProgram& program, const std::string& type,
                                          const std::string& subsig) {
  return declared_on_chain(program, type, subsig, true);
}

BrutePts brute_force_pts(const LinkedProgram& program) {
  BrutePts r;
  std::map<SiteId, std::string> types;
  r.reachable.insert(program.entry()->main_sig);
  auto pts = [&](const std::string& m, const std::string& v) -> SiteSet& {
    return r.vars[{m, v}];
  };
  bool changed = true;
  while (changed) {
    changed = false;
    auto reachable = r.reachable;
    for (const auto& m : reachable) {
      const auto* decl = program.find_method(m);
      if (!decl || !decl->body) continue;
      const auto& body = *decl->body;
      for (size_t i = 0; i < body.size(); ++i) {
        SiteId site{m, static_cast<int>(i)};
        const auto& s = body[i];
        if (const auto* n = std::get_if<NewStmt>(&s)) {
          types[site] = n->type;
          changed = pts(m, n->target).insert(site).second || changed;
        } else if (const auto* c = std::get_if<ConstStrStmt>(&s)) {
          types[site] = "java.lang.String";
          changed = pts(m, c->target).insert(site).second || changed;
        } else if (const auto* a = std::get_if<AssignStmt>(&s)) {
          auto src = pts(m, a->source);
          changed = grow(pts(m, a->target), src) || changed;
        } else if (const auto* l = std::get_if<LoadStaticStmt>(&s)) {
          auto src = r.statics[l->field];
          changed = grow(pts(m, l->target), src) || changed;
        } else if (const auto* st = std::get_if<StoreStaticStmt>(&s)) {
          auto src = pts(m, st->source);
          changed = grow(r.statics[st->field], src) || changed;
        } else if (const auto* l = std::get_if<LoadFieldStmt>(&s)) {
          auto bases = pts(m, l->base);
          for (const auto& b : bases) {
            auto src = r.fields[{b, l->field}];
            changed = grow(pts(m, l->target), src) || changed;
          }
        } else if (const auto* st = std::get_if<StoreFieldStmt>(&s)) {
          auto bases = pts(m, st->base);
          auto src = pts(m, st->source);
          for (const auto& b : bases) changed = grow(r.fields[{b, st->field}], src) || changed;
        } else if (const auto* inv = std::get_if<InvokeStmt>(&s)) {
          auto ref = MethodRef::parse(inv->method);
          auto subsig = ref.subsignature();
          // (target, allocation flowing to `this`, or all of the receiver)
          std::vector<std::pair<std::string, std::optional<SiteId>>> targets;
          if (inv->kind == InvokeKind::kStatic || inv->kind == InvokeKind::kSpecial) {
            if (auto t = declared_on_chain(program, ref.cls, subsig, false)) {
              targets.push_back({*t, std::nullopt});
            }
          } else {
            auto recv = pts(m, *inv->receiver);
            for (const auto& a : recv) {
              if (!naive_subtype(program, types[a], ref.cls)) continue;
              if (auto t = naive_dispatch(program, types[a], subsig)) targets.push_back({*t, a});
            }
          }
          for (const auto& [t, alloc] : targets) {
            changed = r.edges.insert({site, t}).second || changed;
            changed = r.reachable.insert(t).second || changed;
            const auto* callee = program.find_method(t);
            if (!callee || !callee->body) continue;
            for (size_t k = 0; k < inv->args.size(); ++k) {
              auto src = pts(m, inv->args[k]);
              changed = grow(pts(t, param_var(k)), src) || changed;
            }
            if (!callee->is_static) {
              if (alloc) {
                changed = pts(t, "this").insert(*alloc).second || changed;
              } else if (inv->receiver) {
                auto src = pts(m, *inv->receiver);
                changed = grow(pts(t, "this"), src) || changed;
              }
            }
            if (inv->target) {
              for (const auto& cs : *callee->body) {
                const auto* ret = std::get_if<ReturnStmt>(&cs);
                if (!ret || !ret->value) continue;
                auto src = pts(t, *ret->value);
                changed = grow(pts(m, *inv->target), src) || changed;
              }
            }
          }
        }
      }
    }
  }
  std::erase_if(r.vars, [](const auto& e) { return e.second.empty(); });
  std::erase_if(r.fields, [](const auto& e) { return e.second.empty(); });
  std::erase_if(r.statics, [](const auto& e) { return e.second.empty(); });
  return r;
}

SiteSet NaiveRefiner::refine(const std::string& method, const std::string& var,
                             const SiteId& ctx) {
  auto key = std::make_pair(method, ctx);
  auto it = memo_.find(key);
  if (it == memo_.end()) {
    std::map<std::string, SiteSet> sets;
    const auto* decl = program_.find_method(method);
    const auto& inv = std::get<InvokeStmt>(*program_.stmt_at(ctx));
    if (decl && decl->body) {
      const auto& body = *decl->body;
      std::map<std::string, std::set<std::string>> deps;
      std::set<std::string> vars{"this"};
      for (size_t i = 0; i < decl->params.size(); ++i) vars.insert(param_var(i));
      for (const auto& s : body) {
        if (const auto* d = defined_var(s)) vars.insert(*d);
        if (const auto* a = std::get_if<AssignStmt>(&s)) deps[a->target].insert(a->source);
        if (const auto* l = std::get_if<LoadFieldStmt>(&s)) deps[l->target].insert(l->base);
      }
      std::set<std::string> cyclic;
      for (const auto& v : vars) {
        std::set<std::string> seen;
        std::vector<std::string> work(deps[v].begin(), deps[v].end());
        while (!work.empty()) {
          auto w = work.back();
          work.pop_back();
          if (w == v) cyclic.insert(v);
          if (!seen.insert(w).second) continue;
          for (const auto& x : deps[w]) work.push_back(x);
        }
      }
      for (const auto& v : cyclic) sets[v] = solution_.pts(method, v);
      auto ref = MethodRef::parse(inv.method);
      bool again = true;
      while (again) {
        again = false;
        for (const auto& v : vars) {
          if (cyclic.count(v)) continue;
          SiteSet acc;
          if (v == "this" && !decl->is_static && inv.receiver) {
            for (const auto& a : solution_.pts(ctx.method, *inv.receiver)) {
              if (inv.kind == InvokeKind::kSpecial) {
                acc.insert(a);
                continue;
              }
              const auto& t = *solution_.alloc_type(a);
              if (naive_subtype(program_, t, ref.cls) &&
                  naive_dispatch(program_, t, ref.subsignature()) == method) {
                acc.insert(a);
              }
            }
          }
          for (size_t i = 0; i < decl->params.size() && i < inv.args.size(); ++i) {
            if (v == param_var(i)) grow(acc, solution_.pts(ctx.method, inv.args[i]));
          }
          const auto& p0 = solution_.pts(method, v);
          for (size_t i = 0; i < body.size(); ++i) {
            const auto& s = body[i];
            const auto* d = defined_var(s);
            if (!d || *d != v) continue;
            if (std::holds_alternative<NewStmt>(s) || std::holds_alternative<ConstStrStmt>(s)) {
              acc.insert(SiteId{method, static_cast<int>(i)});
            } else if (const auto* a = std::get_if<AssignStmt>(&s)) {
              grow(acc, sets[a->source]);
            } else if (const auto* l = std::get_if<LoadFieldStmt>(&s)) {
              for (const auto& b : sets[l->base]) grow(acc, solution_.field_pts(b, l->field));
            } else if (const auto* l = std::get_if<LoadStaticStmt>(&s)) {
              grow(acc, solution_.static_pts(l->field));
            } else if (std::holds_alternative<InvokeStmt>(s)) {
              grow(acc, p0);
            }
          }
          SiteSet kept;
          for (const auto& a : acc) {
            if (p0.count(a)) kept.insert(a);
          }
          if (kept != sets[v]) {
            sets[v] = std::move(kept);
            again = true;
          }
        }
      }
    }
    it = memo_.emplace(key, std::move(sets)).first;
  }
  auto v = it->second.find(var);
  return v == it->second.end() ? SiteSet{} : v->second;
}

std::set<std::string> NaiveRefiner::filter(const SiteId& site, const SiteId& ctx) {
  std::set<std::string> out;
  const auto& edges = graph_.edges_at(site);
  const auto& inv = std::get<InvokeStmt>(*program_.stmt_at(site));
  bool dispatched = inv.kind == InvokeKind::kVirtual || inv.kind == InvokeKind::kInterface;
  auto recv = dispatched ? refine(site.method, *inv.receiver, ctx) : SiteSet{};
  std::set<std::string> allowed;
  auto ref = MethodRef::parse(inv.method);
  for (const auto& a : recv) {
    const auto& t = *solution_.alloc_type(a);
    if (!naive_subtype(program_, t, ref.cls)) continue;
    if (auto d = naive_dispatch(program_, t, ref.subsignature())) allowed.insert(*d);
  }
  for (const auto& e : edges) {
    if (!dispatched || e.kind == EdgeKind::kAugmented || recv.empty() ||
        allowed.count(e.target)) {
      out.insert(e.target);
    }
  }
  return out;
}

Enumeration enumerate_paths(const LinkedProgram& program, const CallGraph& graph,
                            const PointsToSolution& solution,
                            std::span<const SensitiveSite> sensitives, Mode mode) {
  Enumeration out;
  std::set<SiteId> sensitive;
  for (const auto& s : sensitives) sensitive.insert(s.site);
  NaiveRefiner refiner(program, solution, graph);
  std::set<std::string> on_path;

  for (const auto& root : program.entry()->roots) {
    std::function<void(const std::string&, const SiteId&, int)> dfs =
        [&](const std::string& m, const SiteId& ctx, int first) {
          on_path.insert(m);
          const auto& body = *program.find_method(m)->body;
          for (size_t i = 0; i < body.size(); ++i) {
            SiteId site{m, static_cast<int>(i)};
            int ip = first < 0 ? static_cast<int>(i) : first;
            if (sensitive.count(site)) {
              out.detected.insert(site);
              out.insertion_points.insert({root.callback, ip});
            }
            if (!std::holds_alternative<InvokeStmt>(body[i])) continue;
            std::set<std::string> targets;
            if (mode == Mode::kCfa1) {
              targets = refiner.filter(site, ctx);
            } else {
              for (const auto& e : graph.edges_at(site)) targets.insert(e.target);
            }
            for (const auto& t : targets) {
              const auto* callee = program.find_method(t);
              if (!callee || !callee->body || on_path.count(t)) continue;
              dfs(t, site, ip);
            }
          }
          on_path.erase(m);
        };
    dfs(root.callback, root.site, -1);
  }
  return out;
}

std::set<std::pair<std::string, int>> insertion_points(const AnalysisReport& report) {
  std::set<std::pair<std::string, int>> out;
  for (const auto& cb : report.callbacks) {
    for (const auto& ip : cb.insertion_points) out.insert({cb.method, ip.stmt});
  }
  return out;
}

}  // namespace permreach::oracle
