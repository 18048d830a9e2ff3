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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "permreach/appmodel.hpp"
#include "permreach/hierarchy.hpp"

namespace permreach {

inline constexpr std::string_view kMainClass = "synthetic.Main";
inline constexpr std::string_view kMainSig = "synthetic.Main#main()";

enum class CallbackBasis { kOverride, kInterfaceRegistration };

std::string_view to_string(CallbackBasis basis);

struct CallbackRef {
  std::string host;
  std::string method;  // signature, declared on `host`
  CallbackBasis basis = CallbackBasis::kOverride;
  // Framework class or interface that makes the method a callback.
  std::string anchor;
  // Invokes passing a `host` instance where `anchor` is expected.
  std::vector<SiteId> registration_sites;

  auto operator<=>(const CallbackRef&) const = default;
};

// A method C.f of app or library code with a body is a callback when a
// framework superclass declares f, or when C implements a framework
// interface I declaring f and some app or library invoke passes a C where a
// parameter of type I is expected. The walk up from C stops at classes on
// the async exclude list. Sorted by (host, method).
std::vector<CallbackRef> detect_callbacks(const ClassHierarchy& hierarchy);

// Adds synthetic.Main#main(): per host class one allocation, then one
// virtual invoke per callback with a fresh allocation for every
// non-primitive parameter.
LinkedProgram generate_dummy_main(const LinkedProgram& program,
                                  std::span<const CallbackRef> callbacks);

}  // namespace permreach
