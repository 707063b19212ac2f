#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace xctrl {

// Fixed block size for reductions. Partial sums are always produced per
// block and combined in block order, so a reduction yields the same bits
// no matter how many threads execute it (including one).
inline constexpr std::ptrdiff_t kReduceBlock = 2048;

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

// Independent per-index work; f(i) must only write state owned by index i.
template <class Fn>
void parallel_for(std::ptrdiff_t n, Fn&& f, bool parallel = true) {
#ifdef _OPENMP
    if (parallel && n > 1) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
        return;
    }
#endif
    (void)parallel;
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
}

// Same contract but for uneven task costs (bootstrap replicates, policy states).
template <class Fn>
void parallel_for_dynamic(std::ptrdiff_t n, Fn&& f, bool parallel = true) {
#ifdef _OPENMP
    if (parallel && n > 1) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
        return;
    }
#endif
    (void)parallel;
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
}

inline std::ptrdiff_t block_count(std::ptrdiff_t n, std::ptrdiff_t block = kReduceBlock) {
    return (n + block - 1) / block;
}

}  // namespace xctrl
