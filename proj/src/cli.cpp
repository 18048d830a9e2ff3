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

#include "permreach/cli.hpp"

#include <filesystem>
#include <optional>
#include <vector>

#include <CLI11.hpp>

#include "json_util.hpp"
#include "permreach/analysis.hpp"
#include "permreach/collector.hpp"
#include "permreach/error.hpp"
#include "permreach/permspec.hpp"

namespace permreach::cli {

namespace {

namespace fs = std::filesystem;

// Inputs shared by the program-level commands.
struct Inputs {
  std::vector<std::string> specs;
  std::vector<std::string> overlays;
  std::string groups;
  std::string config;
  std::string output;

  CLI::Option* spec_opt = nullptr;
  CLI::Option* overlay_opt = nullptr;
  CLI::Option* groups_opt = nullptr;
};

struct AnalyzeFlags {
  int cfa = 1;
  bool no_augment = false;
  int augment_passes = 0;
  int max_depth = 50;
  int max_paths = 100;
  std::string format = "json";
  std::string callgraph;

  CLI::Option* cfa_opt = nullptr;
  CLI::Option* no_augment_opt = nullptr;
  CLI::Option* passes_opt = nullptr;
  CLI::Option* depth_opt = nullptr;
  CLI::Option* paths_opt = nullptr;
  CLI::Option* format_opt = nullptr;
};

void add_inputs(CLI::App* cmd, Inputs& in, bool with_spec = true) {
  if (with_spec) {
    in.spec_opt = cmd->add_option("--spec", in.specs, "permission specification (repeatable)")
                      ->check(CLI::ExistingFile);
  }
  in.overlay_opt = cmd->add_option("--framework,--overlay", in.overlays,
                                   "framework stub or model overlay (repeatable)")
                       ->check(CLI::ExistingFile);
  in.groups_opt = cmd->add_option("--groups", in.groups,
                                  "permission group table; restricts specs to dangerous "
                                  "permissions")
                      ->check(CLI::ExistingFile);
  cmd->add_option("--config", in.config, "JSON file with defaults for these flags")
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--output", in.output, "output file (default: standard output)");
}

void add_analyze_flags(CLI::App* cmd, AnalyzeFlags& f) {
  f.cfa_opt = cmd->add_option("--cfa", f.cfa, "context sensitivity: 0 or 1")
                  ->check(CLI::IsMember({0, 1}));
  f.no_augment_opt = cmd->add_flag("--no-augment", f.no_augment,
                                   "do not add CHA edges at points-to edgeless sites");
  f.passes_opt = cmd->add_option("--augment-passes", f.augment_passes,
                                 "augmentation passes (default: until no change)")
                     ->check(CLI::PositiveNumber);
  f.depth_opt = cmd->add_option("--max-depth", f.max_depth, "methods per path")
                    ->check(CLI::PositiveNumber);
  f.paths_opt = cmd->add_option("--max-paths", f.max_paths,
                                "paths recorded per sensitive and insertion point")
                    ->check(CLI::PositiveNumber);
  f.format_opt = cmd->add_option("--format", f.format, "report format")
                     ->check(CLI::IsMember({"json", "text"}));
}

// Flags given on the command line win over the config file.
struct Config {
  std::optional<detail::json> doc;
  LinkConfig link;

  void load(const std::string& path) {
    if (path.empty()) return;
    doc = detail::parse_json(detail::read_file(path), path);
    detail::Node root(*doc, "", path);
    root.expect_object({"spec", "framework", "groups", "cfa", "augment", "augmentPasses",
                        "maxDepth", "maxPaths", "format", "frameworkPrefixes",
                        "asyncExcludes", "permissionClass"});
    if (root.has("frameworkPrefixes")) link.framework_prefixes = root.strings("frameworkPrefixes");
    if (root.has("asyncExcludes")) link.async_excludes = root.strings("asyncExcludes");
    if (auto p = root.opt_str("permissionClass")) link.permission_class = *p;
  }

  detail::Node root() const { return detail::Node(*doc, "", "<config>"); }

  void fill(CLI::Option* opt, std::string_view key, std::vector<std::string>& v) const {
    if (doc && opt && opt->count() == 0) {
      if (root().has(key)) v = root().strings(key);
    }
  }
  void fill(CLI::Option* opt, std::string_view key, std::string& v) const {
    if (doc && opt && opt->count() == 0) {
      if (auto s = root().opt_str(key)) v = *s;
    }
  }
  void fill(CLI::Option* opt, std::string_view key, int& v) const {
    if (doc && opt && opt->count() == 0 && root().has(key)) {
      v = static_cast<int>(root().child(key).integer());
    }
  }

  void apply(Inputs& in) const {
    fill(in.spec_opt, "spec", in.specs);
    fill(in.overlay_opt, "framework", in.overlays);
    fill(in.groups_opt, "groups", in.groups);
  }

  void apply(AnalyzeFlags& f) const {
    fill(f.cfa_opt, "cfa", f.cfa);
    fill(f.passes_opt, "augmentPasses", f.augment_passes);
    fill(f.depth_opt, "maxDepth", f.max_depth);
    fill(f.paths_opt, "maxPaths", f.max_paths);
    fill(f.format_opt, "format", f.format);
    if (doc && f.no_augment_opt->count() == 0) f.no_augment = !root().boolean("augment", true);
    if (f.cfa != 0 && f.cfa != 1) throw ValidationError("config: cfa must be 0 or 1");
    if (f.format != "json" && f.format != "text") {
      throw ValidationError("config: format must be json or text");
    }
  }
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    detail::write_file(path, text);
  }
}

void warn(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << "\n";
}

std::vector<AppModel> load_overlays(const std::vector<std::string>& paths) {
  std::vector<AppModel> out;
  for (const auto& p : paths) out.push_back(load_app(p));
  return out;
}

PermissionSpec load_specs(const Inputs& in, std::ostream& err) {
  if (in.specs.empty()) throw UsageError("at least one --spec is required");
  auto spec = load_spec(in.specs.front());
  for (size_t i = 1; i < in.specs.size(); ++i) {
    spec = merge_specs(spec, load_spec(in.specs[i])).spec;
  }
  if (!in.groups.empty()) {
    std::vector<std::string> warnings;
    spec = filter_dangerous(spec, load_groups(in.groups), &warnings);
    warn(warnings, err);
  }
  return spec;
}

AnalysisOptions analysis_options(const AnalyzeFlags& f) {
  AnalysisOptions o;
  o.mode = f.cfa == 0 ? Mode::kCfa0 : Mode::kCfa1;
  o.augment = !f.no_augment;
  if (f.augment_passes > 0) o.augment_passes = f.augment_passes;
  o.limits.max_depth = f.max_depth;
  o.limits.max_paths = f.max_paths;
  return o;
}

AnalysisRun analyze_app(const std::string& input, Inputs& in, AnalyzeFlags& f,
                        std::ostream& err) {
  Config config;
  config.load(in.config);
  config.apply(in);
  config.apply(f);
  auto spec = load_specs(in, err);
  auto overlays = load_overlays(in.overlays);
  auto linked = link_program(load_app(input), overlays, config.link);
  auto run = run_analysis(linked, spec, analysis_options(f));
  warn(run.report.warnings, err);
  return run;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"permreach: recommends permission request points in Android apps and "
               "audits permission usage across a corpus"};
  app.name("permreach");
  app.require_subcommand(1);

  std::string input;
  std::vector<std::string> files;
  // One set per subcommand: each keeps the CLI::Option handles that tell
  // command-line flags apart from config defaults.
  Inputs analyze_in, cha_in, collect_in, compare_in, misc_in;
  AnalyzeFlags analyze_flags, cha_flags;

  auto* analyze = app.add_subcommand("analyze", "report insertion points per callback");
  analyze->add_option("app", input, "app model")->required()->check(CLI::ExistingFile);
  add_inputs(analyze, analyze_in);
  add_analyze_flags(analyze, analyze_flags);
  analyze->add_option("--callgraph", analyze_flags.callgraph, "also write the traversed call graph");

  auto* cha = app.add_subcommand("cha-reach",
                                 "partition sensitives into unreachable, CHA-reachable but "
                                 "undetected, and detected");
  cha->add_option("app", input, "app model")->required()->check(CLI::ExistingFile);
  add_inputs(cha, cha_in);
  add_analyze_flags(cha, cha_flags);

  std::string summary_path;
  bool request_only = false;
  auto* collect = app.add_subcommand("collect", "M/C/S permission usage over a corpus");
  collect->add_option("corpus", input, "directory of app models")
      ->required()
      ->check(CLI::ExistingDirectory);
  add_inputs(collect, collect_in);
  collect->add_option("--summary", summary_path,
                      "summary JSON (default: <output>.summary.json when -o is given)");
  collect->add_flag("--request-sites-only", request_only,
                    "count only permission values passed to request APIs as C evidence");

  std::string spec_a, spec_b;
  auto* compare = app.add_subcommand("compare-specs", "MCS counts of two specs over a corpus");
  compare->add_option("corpus", input, "directory of app models")
      ->required()
      ->check(CLI::ExistingDirectory);
  compare->add_option("--spec-a", spec_a, "first spec")->required()->check(CLI::ExistingFile);
  compare->add_option("--spec-b", spec_b, "second spec")->required()->check(CLI::ExistingFile);
  add_inputs(compare, compare_in, false);

  std::string idents;
  auto* mine = app.add_subcommand("mine-doc", "permission mentions in doc comments");
  mine->add_option("models", files, "framework model files")
      ->required()
      ->check(CLI::ExistingFile);
  mine->add_option("--idents", idents, "identifier table")->check(CLI::ExistingFile);
  mine->add_option("--groups", misc_in.groups, "derive identifiers from a group table")
      ->check(CLI::ExistingFile);
  mine->add_option("-o,--output", misc_in.output, "output CSV");

  auto* spec_cmd = app.add_subcommand("spec", "spec file utilities");
  spec_cmd->require_subcommand(1);
  auto* validate = spec_cmd->add_subcommand("validate", "check spec files");
  validate->add_option("specs", files, "spec files")->required()->check(CLI::ExistingFile);
  auto* merge = spec_cmd->add_subcommand("merge", "merge spec files, failing on conflicts");
  merge->add_option("specs", files, "spec files")->required()->check(CLI::ExistingFile);
  merge->add_option("-o,--output", misc_in.output, "merged spec");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      auto& in = analyze_in;
      auto& flags = analyze_flags;
      auto run = analyze_app(input, in, flags, err);
      emit(in.output, write_report(run.report, flags.format == "text" ? ReportFormat::kText
                                                                      : ReportFormat::kJson),
           out);
      if (!flags.callgraph.empty()) detail::write_file(flags.callgraph, write_call_graph(run.graph));
    } else if (cha->parsed()) {
      auto run = analyze_app(input, cha_in, cha_flags, err);
      auto partition = cha_reach_partition(run.hierarchy, run.sensitives.sites,
                                           detected_sites(run.report));
      emit(cha_in.output, write_partition(partition), out);
    } else if (collect->parsed()) {
      auto& in = collect_in;
      Config config;
      config.load(in.config);
      config.apply(in);
      auto spec = load_specs(in, err);
      auto overlays = load_overlays(in.overlays);
      std::optional<GroupTable> groups;
      if (!in.groups.empty()) groups = load_groups(in.groups);
      CollectOptions options;
      options.request_sites_only = request_only;
      std::vector<PermissionUsage> usages;
      std::vector<std::string> warnings;
      for (const auto& p : load_corpus(input, overlays, config.link)) {
        warnings.insert(warnings.end(), p.warnings().begin(), p.warnings().end());
        usages.push_back(collect_usage(ClassHierarchy(p), spec, options));
      }
      emit(in.output, usage_csv(usages, groups ? &*groups : nullptr), out);
      if (summary_path.empty() && !in.output.empty()) {
        summary_path = fs::path(in.output).replace_extension(".summary.json").string();
      }
      auto summary = corpus_summary(usages, groups ? &*groups : nullptr, warnings);
      if (!summary_path.empty()) detail::write_file(summary_path, summary);
    } else if (compare->parsed()) {
      auto& in = compare_in;
      Config config;
      config.load(in.config);
      config.apply(in);
      auto a = load_spec(spec_a);
      auto b = load_spec(spec_b);
      if (!in.groups.empty()) {
        auto groups = load_groups(in.groups);
        std::vector<std::string> warnings;
        a = filter_dangerous(a, groups, &warnings);
        b = filter_dangerous(b, groups, &warnings);
        warn(warnings, err);
      }
      std::vector<ClassHierarchy> corpus;
      for (auto& p : load_corpus(input, load_overlays(in.overlays), config.link)) {
        corpus.emplace_back(std::move(p));
      }
      emit(in.output, write_comparison(compare_specs(corpus, a, b)), out);
    } else if (mine->parsed()) {
      auto& in = misc_in;
      IdentTable table;
      if (!idents.empty()) {
        table = load_ident_table(idents);
      } else if (!in.groups.empty()) {
        table = derive_ident_table(load_groups(in.groups));
      } else {
        throw UsageError("mine-doc needs --idents or --groups");
      }
      AppModel empty;
      empty.name = "doc-corpus";
      auto linked = link_program(empty, load_overlays(files));
      emit(in.output, candidates_to_csv(mine_doc_candidates(linked, table)), out);
    } else if (validate->parsed()) {
      for (const auto& f : files) {
        auto spec = load_spec(f);
        out << f << ": ok, " << spec.size() << " entries\n";
      }
    } else if (merge->parsed()) {
      auto spec = load_spec(files.front());
      for (size_t i = 1; i < files.size(); ++i) spec = merge_specs(spec, load_spec(files[i])).spec;
      emit(misc_in.output, serialize_spec(spec), out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConflictError& e) {
    err << "error: " << e.what() << "\n";
    for (const auto& k : e.keys()) err << "  conflicting key " << k << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}

}  // namespace permreach::cli
