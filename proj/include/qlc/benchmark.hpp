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

// The three-level test system: levels |1>,|2>,|3> with |1>-|2> coupling g,
// controls coupling |1>-|3> (H1) and |2>-|3> (H2), goal |E3>.

#ifndef QLC_BENCHMARK_HPP
#define QLC_BENCHMARK_HPP

#include "qlc/lyapunov.hpp"

namespace qlc {

struct ThreeLevelParams {
  double omega1 = 1.0;
  double omega2 = 2.0;
  double omega3 = 5.0;
  double coupling = 0.5;
};

/// H0 = sum_n omega_n |n><n| + g (|1><2| + |2><1|)
HermitianOperator three_level_drift(const ThreeLevelParams& params = {});

/// H1 = |1><3| + |3><1| (which = 1), H2 = |2><3| + |3><2| (which = 2).
HermitianOperator three_level_control(int which);

/// Controls {H1, H2}, goal |E3>.
ControlledSystem three_level_system(const ThreeLevelParams& params, double strength, double horizon);

/// Control H1 only, goal |E3>.
ControlledSystem three_level_system_h1(const ThreeLevelParams& params, double strength, double horizon);

}  // namespace qlc

#endif  // QLC_BENCHMARK_HPP
