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

#include <sstream>

#include "json_util.hpp"
#include "permreach/analysis.hpp"

namespace permreach {

namespace {

using detail::json;
using detail::Node;

json to_json(const std::set<std::string>& s) { return json(std::vector<std::string>(s.begin(), s.end())); }

json to_json(const ReportSummary& s) {
  return {{"callbacks", s.callbacks},
          {"flaggedCallbacks", s.flagged_callbacks},
          {"insertionPoints", s.insertion_points},
          {"sensitives", s.sensitives},
          {"detectedSensitives", s.detected_sensitives},
          {"paths", s.paths},
          {"ambiguousPaths", s.ambiguous_paths},
          {"depthTruncated", s.depth_truncated},
          {"pathsTruncated", s.paths_truncated},
          {"stepsTruncated", s.steps_truncated}};
}

json to_json(const SensitiveHit& h) {
  json paths = json::array();
  for (const auto& p : h.paths) {
    json nodes = json::array();
    for (const auto& n : p.nodes) {
      nodes.push_back({{"method", n.method}, {"entry", n.entry.to_string()}});
    }
    paths.push_back({{"nodes", std::move(nodes)}, {"ambiguous", p.ambiguous}});
  }
  return {{"site", h.site.to_string()},
          {"kind", to_string(h.kind)},
          {"matched", to_json(h.matched_keys)},
          {"permissions", to_json(h.permissions)},
          {"paths", std::move(paths)},
          {"truncated", h.truncated}};
}

std::set<std::string> string_set(const Node& n, std::string_view key) {
  auto v = n.strings(key);
  return {v.begin(), v.end()};
}

int64_t count(const Node& n, std::string_view key) {
  return n.has(key) ? n.child(key).integer() : 0;
}

SensitiveKind parse_kind(const Node& n) {
  auto k = n.str();
  if (k == "method") return SensitiveKind::kMethod;
  if (k == "field") return SensitiveKind::kField;
  n.fail("unknown sensitive kind '" + k + "'");
}

SiteId parse_site(const Node& n) {
  try {
    return SiteId::parse(n.str());
  } catch (const ParseError& e) {
    n.fail(e.what());
  }
}

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& e : s) out += (out.empty() ? "" : ", ") + e;
  return out;
}

}  // namespace

std::string write_report(const AnalysisReport& report, ReportFormat format) {
  if (format == ReportFormat::kText) {
    std::ostringstream out;
    out << "app " << report.app << " mode " << to_string(report.mode) << " augment "
        << (report.augment ? "on" : "off") << "\n";
    for (const auto& cb : report.callbacks) {
      out << "callback " << cb.method << "\n";
      for (const auto& ip : cb.insertion_points) {
        out << "  stmt " << ip.stmt << ": " << join(ip.permissions) << "\n";
        for (const auto& h : ip.sensitives) {
          out << "    " << to_string(h.kind) << " sensitive at " << h.site.to_string()
              << " (" << join(h.matched_keys) << ")"
              << (h.truncated ? " [paths truncated]" : "") << "\n";
          for (const auto& p : h.paths) {
            out << "      " << (p.ambiguous ? "ambiguous " : "") << "path";
            for (size_t i = 0; i < p.nodes.size(); ++i) {
              out << (i == 0 ? " " : " -> ") << p.nodes[i].method;
            }
            out << "\n";
          }
        }
      }
    }
    const auto& s = report.summary;
    out << "summary: " << s.flagged_callbacks << "/" << s.callbacks
        << " callbacks flagged, " << s.insertion_points << " insertion points, "
        << s.detected_sensitives << "/" << s.sensitives << " sensitives detected, "
        << s.paths << " paths (" << s.ambiguous_paths << " ambiguous)\n";
    if (s.depth_truncated || s.paths_truncated || s.steps_truncated) {
      out << "truncated:" << (s.depth_truncated ? " depth" : "")
          << (s.paths_truncated ? " paths" : "") << (s.steps_truncated ? " steps" : "")
          << "\n";
    }
    for (const auto& w : report.warnings) out << "warning: " << w << "\n";
    return out.str();
  }

  json callbacks = json::array();
  for (const auto& cb : report.callbacks) {
    json points = json::array();
    for (const auto& ip : cb.insertion_points) {
      json hits = json::array();
      for (const auto& h : ip.sensitives) hits.push_back(to_json(h));
      points.push_back({{"stmt", ip.stmt},
                        {"permissions", to_json(ip.permissions)},
                        {"sensitives", std::move(hits)}});
    }
    callbacks.push_back(
        {{"class", cb.host}, {"method", cb.method}, {"insertionPoints", std::move(points)}});
  }
  json doc = {{"app", report.app},
              {"mode", to_string(report.mode)},
              {"augment", report.augment},
              {"callbacks", std::move(callbacks)},
              {"summary", to_json(report.summary)},
              {"warnings", report.warnings}};
  return doc.dump(2) + "\n";
}

AnalysisReport read_report(std::string_view text, std::string_view source) {
  auto doc = detail::parse_json(text, source);
  Node root(doc, "", source);
  root.expect_object({"app", "mode", "augment", "callbacks", "summary", "warnings"});
  AnalysisReport r;
  r.app = root.str("app");
  try {
    r.mode = parse_mode(root.str("mode"));
  } catch (const ValidationError& e) {
    root.child("mode").fail(e.what());
  }
  r.augment = root.boolean("augment", true);
  r.warnings = root.strings("warnings");
  for (const auto& c : root.child("callbacks").elements()) {
    c.expect_object({"class", "method", "insertionPoints"});
    CallbackReport cb;
    cb.host = c.str("class");
    cb.method = c.str("method");
    for (const auto& p : c.child("insertionPoints").elements()) {
      p.expect_object({"stmt", "permissions", "sensitives"});
      InsertionPoint ip;
      ip.stmt = static_cast<int>(p.child("stmt").integer());
      ip.permissions = string_set(p, "permissions");
      for (const auto& h : p.child("sensitives").elements()) {
        h.expect_object({"site", "kind", "matched", "permissions", "paths", "truncated"});
        SensitiveHit hit;
        hit.site = parse_site(h.child("site"));
        hit.kind = parse_kind(h.child("kind"));
        hit.matched_keys = string_set(h, "matched");
        hit.permissions = string_set(h, "permissions");
        hit.truncated = h.boolean("truncated", false);
        for (const auto& path : h.child("paths").elements()) {
          path.expect_object({"nodes", "ambiguous"});
          PathRecord rec;
          rec.ambiguous = path.boolean("ambiguous", false);
          for (const auto& n : path.child("nodes").elements()) {
            n.expect_object({"method", "entry"});
            rec.nodes.push_back({n.str("method"), parse_site(n.child("entry"))});
          }
          hit.paths.push_back(std::move(rec));
        }
        ip.sensitives.push_back(std::move(hit));
      }
      cb.insertion_points.push_back(std::move(ip));
    }
    r.callbacks.push_back(std::move(cb));
  }
  if (root.has("summary")) {
    auto s = root.child("summary");
    s.expect_object({"callbacks", "flaggedCallbacks", "insertionPoints", "sensitives",
                     "detectedSensitives", "paths", "ambiguousPaths", "depthTruncated",
                     "pathsTruncated", "stepsTruncated"});
    auto& m = r.summary;
    m.callbacks = count(s, "callbacks");
    m.flagged_callbacks = count(s, "flaggedCallbacks");
    m.insertion_points = count(s, "insertionPoints");
    m.sensitives = count(s, "sensitives");
    m.detected_sensitives = count(s, "detectedSensitives");
    m.paths = count(s, "paths");
    m.ambiguous_paths = count(s, "ambiguousPaths");
    m.depth_truncated = s.boolean("depthTruncated", false);
    m.paths_truncated = s.boolean("pathsTruncated", false);
    m.steps_truncated = s.boolean("stepsTruncated", false);
  }
  return r;
}

std::string write_partition(const ChaPartition& partition) {
  auto sites = [](const std::set<SiteId>& s) {
    json out = json::array();
    for (const auto& e : s) out.push_back(e.to_string());
    return out;
  };
  json doc = {{"unreachable", sites(partition.unreachable)},
              {"chaReachableUndetected", sites(partition.cha_reachable_undetected)},
              {"detected", sites(partition.detected)}};
  return doc.dump(2) + "\n";
}

}  // namespace permreach
