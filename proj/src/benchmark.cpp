// Copyright 2026 The qlc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qlc/benchmark.hpp"

#include <string>

#include "qlc/error.hpp"

namespace qlc {

HermitianOperator three_level_drift(const ThreeLevelParams& params) {
  ComplexMatrix h(3);
  h(0, 0) = params.omega1;
  h(1, 1) = params.omega2;
  h(2, 2) = params.omega3;
  h(0, 1) = params.coupling;
  h(1, 0) = params.coupling;
  return HermitianOperator(h);
}

HermitianOperator three_level_control(int which) {
  if (which != 1 && which != 2) throw ValidationError("three-level control index must be 1 or 2, got " + std::to_string(which));
  ComplexMatrix h(3);
  const std::size_t a = static_cast<std::size_t>(which - 1);
  h(a, 2) = 1.0;
  h(2, a) = 1.0;
  return HermitianOperator(h);
}

ControlledSystem three_level_system(const ThreeLevelParams& params, double strength, double horizon) {
  return ControlledSystem(three_level_drift(params), {three_level_control(1), three_level_control(2)}, strength,
                          horizon, 2);
}

ControlledSystem three_level_system_h1(const ThreeLevelParams& params, double strength, double horizon) {
  return ControlledSystem(three_level_drift(params), {three_level_control(1)}, strength, horizon, 2);
}

}  // namespace qlc
