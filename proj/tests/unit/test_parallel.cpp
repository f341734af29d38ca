#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "sie/parallel.hpp"

TEST_CASE("parallel_for covers every index exactly once") {
    for (unsigned t : {1u, 3u, 8u}) {
        sie::set_thread_count(t);
        std::vector<std::atomic<int>> hits(1001);
        sie::parallel_for(hits.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) hits[i]++;
        });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
    sie::set_thread_count(0);
}

TEST_CASE("parallel_for rethrows worker exceptions") {
    sie::set_thread_count(4);
    CHECK_THROWS_AS(sie::parallel_for(100,
                                      [](std::size_t b, std::size_t) {
                                          if (b > 0) throw std::runtime_error("boom");
                                      }),
                    std::runtime_error);
    sie::set_thread_count(0);
}

TEST_CASE("deterministic_sum") {
    std::vector<double> v(1000);
    std::iota(v.begin(), v.end(), 1.0);
    CHECK(sie::deterministic_sum(v) == 500500.0);
    CHECK(sie::deterministic_sum({}) == 0.0);
    // Pairwise summation keeps 0.1 * 1e6 far closer than naive accumulation.
    std::vector<double> tenths(1000000, 0.1);
    CHECK(std::abs(sie::deterministic_sum(tenths) - 100000.0) < 1e-8);
}

TEST_CASE("sample moments") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    const auto m = sie::sample_moments(x);
    CHECK(m.count == 4);
    CHECK(m.mean == 2.5);
    CHECK(m.variance == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
    CHECK(m.std_error() == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-15));
    const std::vector<double> one{7.0};
    CHECK(sie::sample_moments(one).variance == 0.0);
}
