#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <span>
#include <thread>
#include <vector>

namespace sie {

/// Number of worker threads used by the path-parallel loops. 0 restores the
/// default (hardware concurrency, or SIE_THREADS from the environment).
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(begin, end) over a partition of [0, n). Each index must be
/// processed independently of the others, so results never depend on the
/// partition. Exceptions are rethrown from the lowest-indexed chunk.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t threads = std::min<std::size_t>(thread_count(), n);
    if (threads <= 1) {
        if (n > 0) body(std::size_t{0}, n);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    auto run_chunk = [&](std::size_t c) {
        const std::size_t begin = n * c / threads;
        const std::size_t end = n * (c + 1) / threads;
        try {
            body(begin, end);
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads - 1);
        for (std::size_t c = 1; c < threads; ++c) workers.emplace_back(run_chunk, c);
        run_chunk(0);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Pairwise summation with a fixed recursion structure: the result depends
/// only on the input values and their order.
double deterministic_sum(std::span<const double> values);

struct SampleMoments {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< unbiased; 0 when count < 2

    /// Standard error of the mean.
    double std_error() const;
};

SampleMoments sample_moments(std::span<const double> values);

}  // namespace sie
