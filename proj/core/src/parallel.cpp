#include "sie/parallel.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>

namespace sie {

namespace {

unsigned default_thread_count() {
    if (const char* env = std::getenv("SIE_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (...) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::atomic<unsigned> g_threads{0};

double pairwise(const double* x, std::size_t n) {
    if (n <= 32) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise(x, half) + pairwise(x + half, n - half);
}

}  // namespace

void set_thread_count(unsigned n) { g_threads.store(n); }

unsigned thread_count() {
    const unsigned n = g_threads.load();
    return n == 0 ? default_thread_count() : n;
}

double deterministic_sum(std::span<const double> values) {
    return pairwise(values.data(), values.size());
}

double SampleMoments::std_error() const {
    if (count < 2) return 0.0;
    return std::sqrt(variance / static_cast<double>(count));
}

SampleMoments sample_moments(std::span<const double> values) {
    SampleMoments m;
    m.count = values.size();
    if (m.count == 0) return m;
    // Shifting by the first value makes constant samples exact.
    const double shift = values[0];
    std::vector<double> dev(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) dev[i] = values[i] - shift;
    const double n = static_cast<double>(m.count);
    const double mean_dev = deterministic_sum(dev) / n;
    m.mean = shift + mean_dev;
    if (m.count < 2) return m;
    for (double& d : dev) {
        d -= mean_dev;
        d *= d;
    }
    m.variance = deterministic_sum(dev) / (n - 1.0);
    return m;
}

}  // namespace sie
