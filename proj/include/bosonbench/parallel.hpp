// Copyright 2026 The bosonbench authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace bosonbench {

/// Worker count: BOSONBENCH_THREADS if set, else hardware concurrency.
unsigned thread_budget();

/// Runs body(i) for i in [begin, end) on the thread budget. Exceptions from
/// workers are rethrown on the calling thread. Callers must make results
/// order-independent (per-index slots or tolerance-guarded reductions).
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& body);

}  // namespace bosonbench
