#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sysid {

// Runs body(i) for i in [0, n). Each body writes only to its own output
// slot, and all randomness is counter-based on i, so the parallel and
// serial versions produce identical results. The serial version is kept
// as the reference implementation for tests and for the benchmark target.

template <class Body>
void for_each_index_serial(std::size_t n, Body&& body) {
    for (std::size_t i = 0; i < n; ++i) body(i);
}

template <class Body>
void for_each_index_parallel(std::size_t n, Body&& body) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
#else
    for_each_index_serial(n, body);
#endif
}

enum class ExecMode { serial, parallel };

template <class Body>
void for_each_index(ExecMode mode, std::size_t n, Body&& body) {
    if (mode == ExecMode::parallel)
        for_each_index_parallel(n, body);
    else
        for_each_index_serial(n, body);
}

}  // namespace sysid
