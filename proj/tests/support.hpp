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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "permreach/appmodel.hpp"
#include "permreach/permspec.hpp"

namespace permreach::test {

inline std::filesystem::path fixture(std::string_view rel) {
  return std::filesystem::path(PERMREACH_FIXTURE_DIR) / rel;
}

inline LinkedProgram link_fixture(std::string_view app,
                                  const std::vector<std::string>& overlays) {
  std::vector<AppModel> models;
  for (const auto& o : overlays) models.push_back(load_app(fixture(o)));
  return link_program(load_app(fixture(app)), models);
}

inline LinkedProgram thread_context_program() {
  return link_fixture("thread_context/app.json",
                      {"thread_context/framework.json", "thread_context/thread_model.json"});
}

inline PermissionSpec thread_context_spec() {
  return load_spec(fixture("thread_context/spec.json"));
}

inline LinkedProgram android_program(std::string_view app) {
  return link_fixture(app, {"android.json"});
}

inline PermissionSpec android_spec() { return load_spec(fixture("spec.json")); }

// Parses an app model held in a string; used for small inline programs.
inline LinkedProgram link_inline(std::string_view app_json,
                                 std::string_view framework_json = {}) {
  std::vector<AppModel> overlays;
  if (!framework_json.empty()) overlays.push_back(parse_app(framework_json, "<framework>"));
  return link_program(parse_app(app_json, "<app>"), overlays);
}

}  // namespace permreach::test
