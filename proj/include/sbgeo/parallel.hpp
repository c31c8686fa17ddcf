#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sbgeo::par {

enum class Mode { Serial, OpenMP };

inline bool openmp_compiled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Process-wide execution mode for the sweep kernels. Defaults to OpenMP when
// compiled in; the serial branch is the reference implementation the tests
// compare against.
inline Mode& mode() {
    static Mode m = openmp_compiled() ? Mode::OpenMP : Mode::Serial;
    return m;
}

// Run body(i) for i in [0, n). Bodies must write only to their own slot i;
// under that contract both branches produce bit-identical results.
template <typename Body>
void for_indices(std::size_t n, Mode m, Body&& body) {
    if (m == Mode::OpenMP) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            body(static_cast<std::size_t>(i));
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) body(i);
}

template <typename Body>
void for_indices(std::size_t n, Body&& body) {
    for_indices(n, mode(), static_cast<Body&&>(body));
}

} // namespace sbgeo::par
