// parallel.hpp — OpenMP loop helper. Results are written into
// caller-preallocated slots, so output is identical for any thread count.

#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace vcoup {

inline int max_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_thread_cap(int n) {
#if defined(_OPENMP)
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

// Index-parallel loop; body(i) must only write state owned by index i.
// Exceptions thrown by iterations are captured and the first one is
// rethrown on the calling thread.
template <class Body>
void parallel_for(std::ptrdiff_t n, const Body& body) {
#if defined(_OPENMP)
    std::exception_ptr first;
    std::mutex mtx;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(mtx);
            if (!first) first = std::current_exception();
        }
    }
    if (first) std::rethrow_exception(first);
#else
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
#endif
}

// Serial reference path, kept alongside the parallel one for testing and
// benchmarking.
template <class Body>
void serial_for(std::ptrdiff_t n, const Body& body) {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

} // namespace vcoup
