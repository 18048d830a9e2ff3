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

// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria, capped at 1.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "invariants.hpp"
#include "oracle.hpp"
#include "permreach/analysis.hpp"
#include "permreach/cli.hpp"
#include "permreach/collector.hpp"
#include "permreach/error.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace permreach;

namespace {

constexpr double kFixtureSeconds = 1.0;
constexpr double kOracleSeconds = 60.0;
constexpr uint64_t kOracleCases = 200;

// Collects failure reasons for one criterion.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fx(std::string_view rel) { return test::fixture(rel).string(); }

// Runs the CLI and parses the JSON report it writes.
AnalysisReport cli_report(std::vector<std::string> args, const fs::path& out, Check& c) {
  args.push_back("-o");
  args.push_back(out.string());
  std::ostringstream o, e;
  int code = cli::run(args, o, e);
  c.expect(code == 0, "analyze exited " + std::to_string(code) + ": " + e.str());
  std::ifstream in(out);
  std::string text{std::istreambuf_iterator<char>(in), {}};
  try {
    return read_report(text);
  } catch (const Error& err) {
    c.expect(false, std::string("unreadable report: ") + err.what());
    return {};
  }
}

std::set<std::string> flagged(const AnalysisReport& r) {
  std::set<std::string> out;
  for (const auto& cb : r.callbacks) out.insert(cb.method);
  return out;
}

std::vector<const PathRecord*> paths_of(const AnalysisReport& r, const std::string& cb) {
  std::vector<const PathRecord*> out;
  for (const auto& c : r.callbacks) {
    if (c.method != cb) continue;
    for (const auto& ip : c.insertion_points) {
      for (const auto& h : ip.sensitives) {
        for (const auto& p : h.paths) out.push_back(&p);
      }
    }
  }
  return out;
}

Check thread_context(const fs::path& tmp) {
  Check c;
  const std::string cb1 = "app.Host#callback1()", cb2 = "app.Host#callback2()";
  std::vector<std::string> base = {
      "analyze", fx("thread_context/app.json"), "--spec", fx("thread_context/spec.json"),
      "--framework", fx("thread_context/framework.json"), "--framework",
      fx("thread_context/thread_model.json"), "--cfa"};
  for (const char* cfa : {"1", "0"}) {
    auto args = base;
    args.push_back(cfa);
    auto t0 = std::chrono::steady_clock::now();
    auto r = cli_report(args, tmp / "thread.json", c);
    c.expect(seconds_since(t0) < kFixtureSeconds, std::string("cfa") + cfa + " too slow");
    if (std::string(cfa) == "1") {
      c.expect(flagged(r) == std::set<std::string>{cb1}, "cfa1 must flag exactly callback1");
      auto p = paths_of(r, cb1);
      c.expect(p.size() == 1 && !p[0]->ambiguous, "cfa1 needs one non-ambiguous path");
    } else {
      c.expect(flagged(r) == std::set<std::string>{cb1, cb2}, "cfa0 must flag both");
      auto p = paths_of(r, cb2);
      c.expect(!p.empty() && std::all_of(p.begin(), p.end(),
                                         [](const PathRecord* x) { return x->ambiguous; }),
               "cfa0 path of callback2 must be ambiguous");
    }
  }
  return c;
}

Check stub_return(const fs::path& tmp) {
  Check c;
  const SiteId sensitive{"app.MyView#callSensitive()", 4};
  std::vector<std::string> base = {"analyze",     fx("stub_return/app.json"), "--spec",
                                   fx("spec.json"), "--framework",           fx("android.json")};
  auto t0 = std::chrono::steady_clock::now();
  auto plain_args = base;
  plain_args.push_back("--no-augment");
  auto plain = cli_report(plain_args, tmp / "plain.json", c);
  auto aug = cli_report(base, tmp / "aug.json", c);
  c.expect(seconds_since(t0) < kFixtureSeconds, "analysis too slow");

  c.expect(detected_sites(plain).empty(), "no-augment run must detect nothing");
  AnalysisOptions o;
  o.augment = false;
  auto run = run_analysis(test::android_program("stub_return/app.json"), test::android_spec(), o);
  auto part = cha_reach_partition(run.hierarchy, run.sensitives.sites, detected_sites(plain));
  c.expect(part.cha_reachable_undetected == std::set<SiteId>{sensitive},
           "sensitive must be cha_reachable_undetected without augmentation");

  c.expect(detected_sites(aug) == std::set<SiteId>{sensitive}, "augmented run must detect it");
  bool at_call = aug.callbacks.size() == 1 &&
                 aug.callbacks[0].method == "app.MyActivity#onCreate(android.os.Bundle)" &&
                 aug.callbacks[0].insertion_points.size() == 1 &&
                 aug.callbacks[0].insertion_points[0].stmt == 2;
  c.expect(at_call, "insertion point must be the v.callSensitive() statement of onCreate");
  return c;
}

Check parametric() {
  Check c;
  ClassHierarchy h(test::android_program("parametric/app.json"));
  auto scan = find_sensitive_sites(h, test::android_spec());
  const std::string m = "app.Sender#onCreate(android.os.Bundle)";
  std::set<SiteId> candidates = {{m, 2}, {m, 5}, {m, 7}};
  std::set<SiteId> got;
  for (const auto& s : scan.sites) {
    if (candidates.count(s.site)) got.insert(s.site);
  }
  c.expect(got == std::set<SiteId>{{m, 2}}, "only the sensitive-constant statement matches");
  c.expect(scan.sites.size() == 1, "no other sensitive site expected");
  return c;
}

Check metrics() {
  Check c;
  auto pct = [](std::optional<double> v) { return v ? rounded_percent(*v) : -1; };
  c.expect(pct(eval_metrics({.detected = 72, .undetected_valid = 9}).recall) == 89,
           "recall 72/9");
  c.expect(pct(eval_metrics({.detected = 72, .invalid_path_sensitives = 3}).precision) == 96,
           "precision 72/3");
  c.expect(pct(eval_metrics({.detected = 72, .invalid_path_sensitives = 12}).precision) == 83,
           "precision 72/12");
  c.expect(rounded_percent(coverage(44, 80)) == 35, "coverage 44/80");
  c.expect(rounded_percent(coverage(106, 18)) == 85, "coverage 106/18");
  return c;
}

std::set<std::pair<SiteId, std::string>> edge_pairs(const CallGraph& g) {
  std::set<std::pair<SiteId, std::string>> out;
  for (const auto& [site, edges] : g.edges()) {
    for (const auto& e : edges) out.insert({site, e.target});
  }
  return out;
}

Check oracle_equivalence() {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  for (uint64_t seed = 1; seed <= kOracleCases; ++seed) {
    auto gen = oracle::random_case(seed);
    auto linked = oracle::link_case(gen);
    auto tag = "seed " + std::to_string(seed) + ": ";
    c.expect(gen.app_classes + gen.framework.classes.size() <= 10 && gen.statements <= 40,
             tag + "case exceeds size bounds");
    for (Mode mode : {Mode::kCfa0, Mode::kCfa1}) {
      AnalysisOptions o;
      o.mode = mode;
      auto run = run_analysis(linked, gen.spec, o);
      if (mode == Mode::kCfa0) {
        auto brute = oracle::brute_force_pts(run.program());
        c.expect(run.solution.var_map() == brute.vars &&
                     run.solution.field_map() == brute.fields &&
                     run.solution.static_map() == brute.statics &&
                     edge_pairs(run.base_graph) == brute.edges,
                 tag + "pts0 differs from brute force");
      }
      auto e = oracle::enumerate_paths(run.program(), run.graph, run.solution,
                                       run.sensitives.sites, mode);
      c.expect(detected_sites(run.report) == e.detected,
               tag + std::string(to_string(mode)) + " detection differs from enumeration");
    }
  }
  c.expect(seconds_since(t0) < kOracleSeconds, "oracle suite too slow");
  return c;
}

Check invariants() {
  Check c;
  auto add = [&](const std::string& tag, const std::vector<std::string>& v) {
    for (const auto& x : v) c.failures.push_back(tag + ": " + x);
  };
  auto spec = test::android_spec();
  for (const auto* app : {"stub_return/app.json", "parametric/app.json"}) {
    add(app, oracle::check_invariants(test::android_program(app), spec));
  }
  add("thread_context",
      oracle::check_invariants(test::thread_context_program(), test::thread_context_spec()));
  for (uint64_t seed = 1; seed <= kOracleCases; ++seed) {
    auto gen = oracle::random_case(seed);
    add("seed " + std::to_string(seed),
        oracle::check_invariants(oracle::link_case(gen), gen.spec));
  }
  return c;
}

Check collector() {
  Check c;
  std::vector<AppModel> overlays{load_app(test::fixture("android.json"))};
  auto spec = test::android_spec();
  std::vector<PermissionUsage> usage;
  for (auto& p : load_corpus(test::fixture("corpus/apps"), overlays)) {
    usage.push_back(collect_usage(ClassHierarchy(std::move(p)), spec));
  }
  const std::string fine = "android.permission.ACCESS_FINE_LOCATION";
  const std::string coarse = "android.permission.ACCESS_COARSE_LOCATION";
  using U = UsageClass;
  std::map<std::string, std::map<std::string, U>> want = {
      {"alpha", {{coarse, U::kMCS}, {fine, U::kM}, {"android.permission.INTERNET", U::kM}}},
      {"beta", {{"android.permission.CAMERA", U::kMCS},
                {"android.permission.READ_CONTACTS", U::kMC}}},
      {"delta", {{"android.permission.CALL_PHONE", U::kC},
                 {"android.permission.READ_CONTACTS", U::kCS},
                 {"android.permission.READ_PHONE_STATE", U::kMCS}}},
      {"epsilon", {{"android.permission.CAMERA", U::kM},
                   {"android.permission.READ_PHONE_STATE", U::kS}}},
      {"gamma", {{coarse, U::kS}, {fine, U::kMCS}, {"android.permission.SEND_SMS", U::kMS}}},
  };
  std::map<std::string, std::map<std::string, U>> got;
  for (const auto& u : usage) got[u.app] = classify(u);
  c.expect(got == want, "per-app labels differ");
  std::map<U, int64_t> counts = {{U::kMCS, 4}, {U::kMC, 1}, {U::kMS, 1}, {U::kCS, 1},
                                 {U::kM, 3},   {U::kC, 1},  {U::kS, 2}};
  c.expect(count_labels(usage) == counts, "label counts differ");
  c.expect(rounded_percent(coverage(usage)) == 80, "coverage must be 80%");
  auto groups = load_groups(test::fixture("groups.json"));
  auto op = overprivilege_report(usage, groups);
  bool ok = op.size() == 5 && op[0].same_group == std::set<std::string>{fine} &&
            op[0].cross_group == std::set<std::string>{"android.permission.INTERNET"} &&
            op[3].cross_group == std::set<std::string>{"android.permission.CAMERA"} &&
            op[3].same_group.empty();
  for (size_t i : {1u, 2u, 4u}) {
    ok = ok && i < op.size() && op[i].same_group.empty() && op[i].cross_group.empty();
  }
  c.expect(ok, "over-privilege split differs");
  return c;
}

}  // namespace

int main() {
  auto tmp = fs::temp_directory_path() / "permreach_acceptance";
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
  };
  std::vector<Criterion> criteria = {
      {1, "thread-context fixture: cfa1 flags callback1 only, cfa0 both",
       [&] { return thread_context(tmp); }},
      {2, "stub-return fixture: detected only with augmentation", [&] { return stub_return(tmp); }},
      {3, "parametric fixture: one sensitive site", parametric},
      {4, "metric arithmetic", metrics},
      {5, "oracle equivalence on generated programs", oracle_equivalence},
      {6, "invariant suite", invariants},
      {7, "collector on the five-app corpus", collector},
  };

  int failed = 0;
  for (const auto& cr : criteria) {
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    bool pass = c.failures.empty();
    failed += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << cr.id << ": " << cr.name << "\n";
    for (const auto& f : c.failures) std::cout << "    " << f << "\n";
  }
  fs::remove_all(tmp);
  return failed == 0 ? 0 : 1;
}
