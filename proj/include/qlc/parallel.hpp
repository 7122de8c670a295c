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

#ifndef QLC_PARALLEL_HPP
#define QLC_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace qlc {

/// Runs body(b) for b in [0, blocks) on `threads` threads (the caller
/// included). Bodies must write only their own output slots, which makes the
/// result independent of the thread count. on_done(count) is called from the
/// calling thread as it finishes blocks. The first exception thrown by any
/// body stops the remaining work and is rethrown.
void parallel_blocks(std::size_t blocks, unsigned threads, const std::function<void(std::size_t)>& body,
                     const std::function<void(std::size_t)>& on_done = {});

}  // namespace qlc

#endif  // QLC_PARALLEL_HPP
