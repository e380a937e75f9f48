#pragma once

#include <cstdint>
#include <functional>

namespace depmix {

// Execution policy for the replica-parallel kernels. Every kernel writes
// per-replica results to disjoint slots (or merges integer counts), so both
// policies produce bit-identical output; Serial is the reference path used
// by the tests and the benchmark.
enum class Exec { Serial, Parallel };

namespace parallel {

// Runs body(begin, end) over disjoint chunks of [0, count). With
// Exec::Serial a single chunk covers the whole range.
void for_blocks(Exec exec, std::int64_t count,
                const std::function<void(std::int64_t, std::int64_t)>& body);

int max_threads();

} // namespace parallel
} // namespace depmix
