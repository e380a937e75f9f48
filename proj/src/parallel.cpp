#include "depmix/parallel.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace depmix::parallel {

void for_blocks(Exec exec, std::int64_t count,
                const std::function<void(std::int64_t, std::int64_t)>& body) {
    if (count <= 0) {
        return;
    }
#ifdef _OPENMP
    if (exec == Exec::Parallel) {
        const std::int64_t threads = std::min<std::int64_t>(omp_get_max_threads(), count);
        const std::int64_t chunks = std::max<std::int64_t>(threads * 4, 1);
        const std::int64_t step = (count + chunks - 1) / chunks;
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t c = 0; c < chunks; ++c) {
            const std::int64_t lo = c * step;
            const std::int64_t hi = std::min(lo + step, count);
            if (lo < hi) {
                body(lo, hi);
            }
        }
        return;
    }
#else
    (void)exec;
#endif
    body(0, count);
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace depmix::parallel
