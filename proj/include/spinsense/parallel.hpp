#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace spinsense {

// Evaluates fn(i) for i in [0,n) on up to `workers` threads; results keyed by index.
// If several points throw, the one with the lowest index is rethrown.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn, int workers = 0)
{
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    const int threads = workers > 0 ? workers : omp_get_max_threads();
    const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long long i = 0; i < count; ++i) {
        try {
            out[i] = fn(std::size_t(i));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

template <typename T, typename Fn>
std::vector<T> serial_map(std::size_t n, Fn&& fn)
{
    std::vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
}

}  // namespace spinsense
