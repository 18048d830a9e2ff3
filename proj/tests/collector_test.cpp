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

#include <gtest/gtest.h>

#include <cmath>

#include "permreach/collector.hpp"
#include "permreach/error.hpp"
#include "support.hpp"

namespace permreach {
namespace {

const std::string kFine = "android.permission.ACCESS_FINE_LOCATION";
const std::string kCoarse = "android.permission.ACCESS_COARSE_LOCATION";
const std::string kCamera = "android.permission.CAMERA";
const std::string kContacts = "android.permission.READ_CONTACTS";
const std::string kCall = "android.permission.CALL_PHONE";
const std::string kPhoneState = "android.permission.READ_PHONE_STATE";
const std::string kSms = "android.permission.SEND_SMS";
const std::string kInternet = "android.permission.INTERNET";

std::vector<ClassHierarchy> corpus_hierarchies() {
  std::vector<AppModel> overlays{load_app(test::fixture("android.json"))};
  std::vector<ClassHierarchy> out;
  for (auto& p : load_corpus(test::fixture("corpus/apps"), overlays)) {
    out.emplace_back(std::move(p));
  }
  return out;
}

std::vector<PermissionUsage> corpus_usage() {
  auto spec = test::android_spec();
  std::vector<PermissionUsage> out;
  for (const auto& h : corpus_hierarchies()) out.push_back(collect_usage(h, spec));
  return out;
}

using Labels = std::map<std::string, UsageClass>;

TEST(Collect, HandComputedLabels) {
  auto usage = corpus_usage();
  ASSERT_EQ(usage.size(), 5u);
  std::map<std::string, Labels> got;
  for (const auto& u : usage) got[u.app] = classify(u);
  using U = UsageClass;
  std::map<std::string, Labels> want = {
      {"alpha", {{kCoarse, U::kMCS}, {kFine, U::kM}, {kInternet, U::kM}}},
      {"beta", {{kCamera, U::kMCS}, {kContacts, U::kMC}}},
      {"delta", {{kCall, U::kC}, {kContacts, U::kCS}, {kPhoneState, U::kMCS}}},
      {"epsilon", {{kCamera, U::kM}, {kPhoneState, U::kS}}},
      {"gamma", {{kCoarse, U::kS}, {kFine, U::kMCS}, {kSms, U::kMS}}},
  };
  EXPECT_EQ(got, want);
  EXPECT_EQ(usage[0].app, "alpha");
}

TEST(Collect, CountsAndCoverage) {
  auto usage = corpus_usage();
  using U = UsageClass;
  std::map<U, int64_t> want = {{U::kMCS, 4}, {U::kMC, 1}, {U::kMS, 1}, {U::kCS, 1},
                               {U::kM, 3},   {U::kC, 1},  {U::kS, 2}};
  EXPECT_EQ(count_labels(usage), want);
  EXPECT_DOUBLE_EQ(coverage(usage), 0.8);
  EXPECT_EQ(rounded_percent(coverage(usage)), 80);
}

TEST(Collect, EvidenceKinds) {
  auto usage = corpus_usage();
  for (const auto& u : usage) {
    for (const auto& [perm, use] : u.permissions) {
      for (const auto& c : use.code) EXPECT_NE(c.evidence, CodeEvidence::kRequest);
    }
  }
}

TEST(Overprivilege, SameAndCrossGroupSplit) {
  auto usage = corpus_usage();
  auto groups = load_groups(test::fixture("groups.json"));
  std::vector<std::string> warnings;
  auto report = overprivilege_report(usage, groups, &warnings);
  ASSERT_EQ(report.size(), 5u);
  EXPECT_EQ(report[0], (OverprivilegeEntry{"alpha", {kFine}, {kInternet}}));
  EXPECT_EQ(report[1], (OverprivilegeEntry{"beta", {}, {}}));
  EXPECT_EQ(report[2], (OverprivilegeEntry{"delta", {}, {}}));
  EXPECT_EQ(report[3], (OverprivilegeEntry{"epsilon", {}, {kCamera}}));
  EXPECT_EQ(report[4], (OverprivilegeEntry{"gamma", {}, {}}));
}

TEST(Overprivilege, UnknownGroupIsCrossGroupWithWarning) {
  PermissionUsage u{"x", {{"x.UNKNOWN", PermissionUse{true, {}, {}}}}};
  std::vector<PermissionUsage> corpus{u};
  std::vector<std::string> warnings;
  auto report = overprivilege_report(corpus, GroupTable{}, &warnings);
  EXPECT_EQ(report[0].cross_group, std::set<std::string>{"x.UNKNOWN"});
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(Labels, AllSevenAndInvalid) {
  EXPECT_EQ(usage_class(true, true, true), UsageClass::kMCS);
  EXPECT_EQ(usage_class(true, true, false), UsageClass::kMC);
  EXPECT_EQ(usage_class(true, false, true), UsageClass::kMS);
  EXPECT_EQ(usage_class(false, true, true), UsageClass::kCS);
  EXPECT_EQ(usage_class(true, false, false), UsageClass::kM);
  EXPECT_EQ(usage_class(false, true, false), UsageClass::kC);
  EXPECT_EQ(usage_class(false, false, true), UsageClass::kS);
  EXPECT_THROW(usage_class(false, false, false), ValidationError);
  EXPECT_EQ(to_string(UsageClass::kMCS), "MCS");
}

TEST(Metrics, CoverageArithmetic) {
  EXPECT_EQ(rounded_percent(coverage(44, 80)), 35);
  EXPECT_EQ(rounded_percent(coverage(106, 18)), 85);
  EXPECT_EQ(rounded_percent(coverage(5, 0)), 100);
  EXPECT_DOUBLE_EQ(coverage(0, 7), 0.0);
  EXPECT_THROW(coverage(0, 0), UndefinedMetricError);
}

TEST(Metrics, RecallAndPrecision) {
  auto m = eval_metrics({.detected = 72, .undetected_valid = 9});
  EXPECT_EQ(rounded_percent(*m.recall), 89);
  EXPECT_EQ(rounded_percent(*eval_metrics({.detected = 72, .invalid_path_sensitives = 3})
                                 .precision),
            96);
  EXPECT_EQ(rounded_percent(*eval_metrics({.detected = 72, .invalid_path_sensitives = 12})
                                 .precision),
            83);
  auto empty = eval_metrics({});
  EXPECT_FALSE(empty.recall.has_value());
  EXPECT_FALSE(empty.precision.has_value());
  EXPECT_THROW(eval_metrics({.detected = -1}), ValidationError);
  EXPECT_THROW(eval_metrics({.detected = 2, .invalid_path_sensitives = 3}), ValidationError);
}

TEST(Metrics, OracleFormulas) {
  // Independent closed forms over a grid of counts.
  for (int64_t d = 0; d <= 30; d += 3) {
    for (int64_t uv = 0; uv <= 30; uv += 5) {
      for (int64_t inv = 0; inv <= d; inv += 2) {
        auto m = eval_metrics({.detected = d, .undetected_valid = uv,
                               .invalid_path_sensitives = inv});
        if (d + uv == 0) {
          EXPECT_FALSE(m.recall);
        } else {
          EXPECT_DOUBLE_EQ(*m.recall, static_cast<double>(d) / static_cast<double>(d + uv));
        }
        if (d == 0) {
          EXPECT_FALSE(m.precision);
        } else {
          EXPECT_DOUBLE_EQ(*m.precision,
                           static_cast<double>(d - inv) / static_cast<double>(d));
        }
      }
    }
  }
}

TEST(CompareSpecs, DroppingAnEntryLosesItsMcs) {
  auto corpus = corpus_hierarchies();
  auto a = load_spec(test::fixture("corpus/spec_a.json"));
  auto b = load_spec(test::fixture("corpus/spec_b.json"));
  auto cmp = compare_specs(corpus, a, b);
  EXPECT_EQ(cmp.a.mcs_instances, 4);
  EXPECT_EQ(cmp.a.mcs_permissions,
            (std::set<std::string>{kCamera, kCoarse, kFine, kPhoneState}));
  EXPECT_EQ(cmp.b.mcs_instances, 3);
  EXPECT_EQ(cmp.b.mcs_permissions, (std::set<std::string>{kCoarse, kFine, kPhoneState}));
  EXPECT_EQ(cmp.diff.only_a.size(), 1u);
  EXPECT_TRUE(cmp.diff.only_b.empty());
}

TEST(Output, CsvIsSortedAndComplete) {
  auto usage = corpus_usage();
  auto groups = load_groups(test::fixture("groups.json"));
  auto csv = usage_csv(usage, &groups);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "app,permission,label,group,sites");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 14);
  EXPECT_NE(csv.find("alpha," + kFine + ",M,LOCATION,"), std::string::npos);
  auto summary = corpus_summary(usage, &groups, {});
  EXPECT_EQ(summary, corpus_summary(corpus_usage(), &groups, {}));
  EXPECT_NE(summary.find("\"percent\": 80"), std::string::npos);
}

TEST(Collect, RequestSitesOnlyNarrowsCodeEvidence) {
  auto spec = test::android_spec();
  CollectOptions o;
  o.request_sites_only = true;
  for (const auto& h : corpus_hierarchies()) {
    auto usage = collect_usage(h, spec, o);
    for (const auto& [perm, use] : usage.permissions) {
      for (const auto& c : use.code) EXPECT_EQ(c.evidence, CodeEvidence::kRequest);
    }
  }
}

}  // namespace
}  // namespace permreach
