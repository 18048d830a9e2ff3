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

#include "permreach/entrypoints.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "permreach/values.hpp"

namespace permreach {

std::string_view to_string(CallbackBasis basis) {
  return basis == CallbackBasis::kOverride ? "override" : "interface-registration";
}

namespace {

// Framework supertypes of `cls` that may anchor a callback. The walk does not
// continue through async-excluded types.
std::vector<const ClassDecl*> framework_anchors(const LinkedProgram& program,
                                                const ClassDecl& cls) {
  std::vector<const ClassDecl*> out;
  std::set<std::string> seen{cls.name};
  std::deque<const ClassDecl*> work{&cls};
  while (!work.empty()) {
    const auto* c = work.front();
    work.pop_front();
    std::vector<std::string> parents;
    if (c->super) parents.push_back(*c->super);
    parents.insert(parents.end(), c->interfaces.begin(), c->interfaces.end());
    for (const auto& p : parents) {
      if (!seen.insert(p).second || program.is_async_excluded(p)) continue;
      const auto* pc = program.find_class(p);
      if (!pc) continue;
      if (program.is_framework(p)) out.push_back(pc);
      work.push_back(pc);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ClassDecl* a, const ClassDecl* b) { return a->name < b->name; });
  return out;
}

bool declares_instance_method(const ClassDecl& c, std::string_view subsig) {
  const auto* m = c.find_method(subsig);
  return m && !m->is_static;
}

// Interface `iface` or one of its framework superinterfaces declares subsig.
bool interface_declares(const ClassHierarchy& h, const ClassDecl& iface,
                        std::string_view subsig) {
  const auto& program = h.program();
  for (const auto& s : h.supertypes(iface.name)) {
    const auto* c = program.find_class(s);
    if (c && c->kind == ClassKind::kInterface && program.is_framework(s) &&
        !program.is_async_excluded(s) && declares_instance_method(*c, subsig)) {
      return true;
    }
  }
  return false;
}

// (parameter type, possible argument type) -> invoke sites.
using Registrations = std::map<std::pair<std::string, std::string>, std::set<SiteId>>;

Registrations collect_registrations(const ClassHierarchy& h) {
  const auto& program = h.program();
  Registrations regs;
  for (const auto& [sig, method] : program.bodies()) {
    if (!program.is_app_code(owner_of(sig))) continue;
    const auto& body = *method->body;
    for (size_t i = 0; i < body.size(); ++i) {
      const auto* inv = std::get_if<InvokeStmt>(&body[i]);
      if (!inv) continue;
      auto ref = MethodRef::parse(inv->method);
      for (size_t a = 0; a < inv->args.size(); ++a) {
        const auto& param_type = ref.params[a];
        const auto* pc = program.find_class(param_type);
        if (!pc || pc->kind != ClassKind::kInterface ||
            !program.is_framework(param_type)) {
          continue;
        }
        for (const auto& t : intraproc_types(h, sig, *method, inv->args[a])) {
          regs[{param_type, t}].insert(SiteId{sig, static_cast<int>(i)});
        }
      }
    }
  }
  return regs;
}

}  // namespace

std::vector<CallbackRef> detect_callbacks(const ClassHierarchy& hierarchy) {
  const auto& program = hierarchy.program();
  auto regs = collect_registrations(hierarchy);
  std::vector<CallbackRef> out;

  for (const auto& [name, cls] : program.classes()) {
    if (!program.is_app_code(name) || cls.kind != ClassKind::kClass) continue;
    auto anchors = framework_anchors(program, cls);
    if (anchors.empty()) continue;
    for (const auto& m : cls.methods) {
      if (!m.has_body() || m.is_static || m.name == "<init>" || m.name == "<clinit>") {
        continue;
      }
      auto subsig = m.subsignature();
      CallbackRef ref;
      ref.host = name;
      ref.method = make_method_sig(name, subsig);
      bool found = false;
      for (const auto* a : anchors) {
        if (a->kind == ClassKind::kClass && declares_instance_method(*a, subsig)) {
          ref.basis = CallbackBasis::kOverride;
          ref.anchor = a->name;
          found = true;
          break;
        }
      }
      for (const auto* a : anchors) {
        if (found) break;
        if (a->kind != ClassKind::kInterface || !interface_declares(hierarchy, *a, subsig)) {
          continue;
        }
        std::set<SiteId> sites;
        for (auto it = regs.lower_bound({a->name, ""});
             it != regs.end() && it->first.first == a->name; ++it) {
          if (hierarchy.is_subtype(it->first.second, name)) {
            sites.insert(it->second.begin(), it->second.end());
          }
        }
        if (sites.empty()) continue;
        ref.basis = CallbackBasis::kInterfaceRegistration;
        ref.anchor = a->name;
        ref.registration_sites.assign(sites.begin(), sites.end());
        found = true;
      }
      if (found) out.push_back(std::move(ref));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

LinkedProgram generate_dummy_main(const LinkedProgram& program,
                                  std::span<const CallbackRef> callbacks) {
  std::map<std::string, std::vector<const CallbackRef*>> by_host;
  for (const auto& cb : callbacks) by_host[cb.host].push_back(&cb);

  ClassDecl main;
  main.name = std::string(kMainClass);
  main.kind = ClassKind::kClass;
  main.origin = Origin::kSynthetic;
  MethodDecl entry;
  entry.name = "main";
  entry.is_static = true;
  std::vector<Stmt> body;
  EntryPoint ep;
  ep.main_sig = std::string(kMainSig);

  size_t host_index = 0;
  for (auto& [host, cbs] : by_host) {
    std::sort(cbs.begin(), cbs.end(),
              [](const CallbackRef* a, const CallbackRef* b) { return a->method < b->method; });
    auto host_var = "h" + std::to_string(host_index);
    body.push_back(NewStmt{host_var, host});
    size_t cb_index = 0;
    for (const auto* cb : cbs) {
      auto ref = MethodRef::parse(cb->method);
      InvokeStmt inv;
      inv.kind = InvokeKind::kVirtual;
      inv.receiver = host_var;
      inv.method = cb->method;
      for (size_t p = 0; p < ref.params.size(); ++p) {
        auto arg = "a" + std::to_string(host_index) + "_" + std::to_string(cb_index) +
                   "_" + std::to_string(p);
        const auto& type = ref.params[p];
        if (!is_primitive_type(type) && program.find_class(type)) {
          body.push_back(NewStmt{arg, type});
        }
        inv.args.push_back(std::move(arg));
      }
      SiteId site{ep.main_sig, static_cast<int>(body.size())};
      body.push_back(std::move(inv));
      ep.roots.push_back(EntryRoot{host, cb->method, site});
      ++cb_index;
    }
    ++host_index;
  }
  body.push_back(ReturnStmt{});
  entry.body = std::move(body);
  main.methods.push_back(std::move(entry));
  return program.with_entry(std::move(main), std::move(ep));
}

}  // namespace permreach
