#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "sie/error.hpp"
#include "sie/parallel.hpp"
#include "sie/paths.hpp"

using namespace sie;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected sie::Error");
    return ErrorKind::format_error;
}

}  // namespace

TEST_CASE("make_grid nodes") {
    auto g = make_grid(0, 1, 4);
    CHECK(std::vector<double>(g.nodes().begin(), g.nodes().end()) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    g = make_grid(0, 1, 1);
    CHECK(std::vector<double>(g.nodes().begin(), g.nodes().end()) == std::vector<double>{0, 1});
    g = make_grid(2, 3, 2);
    CHECK(std::vector<double>(g.nodes().begin(), g.nodes().end()) == std::vector<double>{2, 2.5, 3});
}

TEST_CASE("grid invariants") {
    const auto g = make_grid(-0.3, 1.7, 777);
    CHECK(g.node(0) == -0.3);
    CHECK(g.node(777) == 1.7);
    const double ulp = std::nextafter(2.0, 3.0) - 2.0;
    for (std::size_t j = 1; j <= 777; ++j) {
        CHECK(g.node(j) > g.node(j - 1));
        CHECK(std::abs(g.node(j) - g.node(j - 1) - g.dt()) <= ulp);
    }
}

TEST_CASE("make_grid errors") {
    CHECK(kind_of([] { make_grid(1, 1, 3); }) == ErrorKind::invalid_interval);
    CHECK(kind_of([] { make_grid(2, 1, 3); }) == ErrorKind::invalid_interval);
    CHECK(kind_of([] { make_grid(0, INFINITY, 3); }) == ErrorKind::invalid_interval);
    CHECK(kind_of([] { make_grid(NAN, 1, 3); }) == ErrorKind::invalid_interval);
    CHECK(kind_of([] { make_grid(0, 1, 0); }) == ErrorKind::invalid_steps);
    CHECK(kind_of([] { sample_brownian(make_grid(0, 1, 2), 0, 1); }) == ErrorKind::empty_ensemble);
}

TEST_CASE("sampling is deterministic and thread-count independent") {
    const auto g = make_grid(0, 1, 64);
    set_thread_count(1);
    const auto e1 = sample_brownian(g, 500, 99);
    set_thread_count(4);
    const auto e4 = sample_brownian(g, 500, 99);
    set_thread_count(0);
    const auto again = sample_brownian(g, 500, 99);
    CHECK(std::ranges::equal(e1.increments(), e4.increments()));
    CHECK(std::ranges::equal(e1.increments(), again.increments()));
    CHECK_FALSE(std::ranges::equal(e1.increments(), sample_brownian(g, 500, 100).increments()));
    // A path does not depend on how many paths are drawn.
    const auto small = sample_brownian(g, 10, 99);
    CHECK(std::ranges::equal(small.increments(9), e1.increments(9)));
}

TEST_CASE("path values are prefix sums with B(a) = 0") {
    const auto e = sample_brownian(make_grid(1, 2, 10), 3, 5);
    for (std::size_t p = 0; p < 3; ++p) {
        const auto b = e.path_values(p);
        CHECK(b[0] == 0.0);
        double acc = 0.0;
        for (std::size_t j = 0; j < 10; ++j) {
            acc += e.increment(p, j);
            CHECK(b[j + 1] == acc);
            CHECK(e.path_value(p, j + 1) == acc);
        }
    }
}

TEST_CASE("B(1) at m = 1000, n = 100000") {
    const auto e = sample_brownian(make_grid(0, 1, 1000), 100000, 2718);
    std::vector<double> b1(e.n_paths());
    for (std::size_t p = 0; p < e.n_paths(); ++p) b1[p] = e.path_value(p, 1000);
    const auto m = sample_moments(b1);
    CHECK(std::abs(m.mean) < 0.013);
    CHECK(std::abs(m.variance - 1.0) < 0.02);
}

TEST_CASE("increment mean and variance") {
    const auto g = make_grid(0, 2, 100);
    const auto e = sample_brownian(g, 4000, 11);
    const auto m = sample_moments(e.increments());
    const double n = double(e.increments().size());
    CHECK(std::abs(m.mean) < 4.0 * std::sqrt(g.dt() / n));
    CHECK(std::abs(m.variance - g.dt()) < 4.0 * g.dt() * std::sqrt(2.0 / n));
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Two-sided KS statistic against N(0, 1).
double ks_statistic(std::vector<double> z) {
    std::ranges::sort(z);
    const double n = double(z.size());
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double f = normal_cdf(z[i]);
        d = std::max({d, f - i / n, (i + 1) / n - f});
    }
    return d;
}

}  // namespace

TEST_CASE("standardized increments pass KS at 0.001") {
    const auto g = make_grid(0, 1, 250);
    const auto e = sample_brownian(g, 800, 31337);
    std::vector<double> z(e.increments().begin(), e.increments().end());
    for (double& v : z) v /= std::sqrt(g.dt());
    // Asymptotic critical value 1.9495 / sqrt(n) at alpha = 0.001.
    CHECK(ks_statistic(z) < 1.9495 / std::sqrt(double(z.size())));
}

TEST_CASE("bridge refinement preserves coarse increments") {
    const auto coarse = sample_brownian(make_grid(0, 1, 16), 200, 4);
    for (std::size_t factor : {2u, 3u, 8u}) {
        const auto fine = refine_brownian(coarse, factor, 17);
        CHECK(fine.steps() == 16 * factor);
        CHECK(fine.grid().end() == 1.0);
        for (std::size_t p = 0; p < 200; ++p)
            for (std::size_t i = 0; i < 16; ++i) {
                double s = 0.0;
                for (std::size_t k = 0; k < factor; ++k) s += fine.increment(p, i * factor + k);
                CHECK(std::abs(s - coarse.increment(p, i)) <= 8e-16 * (1.0 + std::abs(coarse.increment(p, i))));
            }
    }
}

TEST_CASE("refined increments are N(0, dt / factor)") {
    const auto coarse = sample_brownian(make_grid(0, 1, 8), 20000, 8);
    const auto fine = refine_brownian(coarse, 4, 9);
    const double dt = fine.grid().dt();
    CHECK(dt == doctest::Approx(1.0 / 32));
    for (std::size_t k = 0; k < 4; ++k) {
        std::vector<double> col;
        for (std::size_t p = 0; p < fine.n_paths(); ++p) col.push_back(fine.increment(p, k));
        const auto m = sample_moments(col);
        const double n = double(col.size());
        CHECK(std::abs(m.mean) < 4.0 * std::sqrt(dt / n));
        CHECK(std::abs(m.variance - dt) < 4.0 * dt * std::sqrt(2.0 / n));
    }
}

TEST_CASE("refine rejects factor < 2") {
    const auto e = sample_brownian(make_grid(0, 1, 4), 2, 1);
    CHECK(kind_of([&] { refine_brownian(e, 1, 0); }) == ErrorKind::invalid_argument);
    CHECK(kind_of([&] { refine_brownian(e, 0, 0); }) == ErrorKind::invalid_argument);
}

TEST_CASE("binary dump round trip") {
    const auto e = sample_brownian(make_grid(0.5, 2.25, 13), 7, 0xdeadbeefcafeull);
    std::stringstream buf;
    write_ensemble(buf, e);
    const std::string bytes = buf.str();
    CHECK(bytes.substr(0, 4) == "SIEB");
    CHECK(bytes.size() == 4 + 4 + 8 * 5 + 8 * 7 * 13);
    const auto back = read_ensemble(buf);
    CHECK(back.grid() == e.grid());
    CHECK(back.n_paths() == 7);
    CHECK(back.seed() == e.seed());
    CHECK(std::ranges::equal(back.increments(), e.increments()));

    std::stringstream bad("SIEX");
    CHECK(kind_of([&] { read_ensemble(bad); }) == ErrorKind::format_error);
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK(kind_of([&] { read_ensemble(truncated); }) == ErrorKind::format_error);
}
