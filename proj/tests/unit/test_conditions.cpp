#include <cmath>
#include <string>

#include "doctest.h"
#include "sie/conditions.hpp"
#include "sie/error.hpp"
#include "sie/parallel.hpp"

using namespace sie;

namespace {

SieProblem constant_problem(InitialLaw h, double c, double a = 0.0, double b = 1.0) {
    return SieProblem{a, b, h, Coefficient::constant(c), Coefficient::constant(c)};
}

SieProblem linear_problem(double k1, double k2, double a = 0.0, double b = 1.0) {
    return SieProblem{a, b, InitialLaw::constant(1.0), Coefficient::linear(TimeFunction::constant(k1)),
                      Coefficient::linear(TimeFunction::constant(k2))};
}

// Values that are not binary fractions can only be hit to within rounding.
bool within_ulps(double x, double target, int ulps) {
    double lo = target, hi = target;
    for (int i = 0; i < ulps; ++i) {
        lo = std::nextafter(lo, -INFINITY);
        hi = std::nextafter(hi, INFINITY);
    }
    return lo <= x && x <= hi;
}

// Re-decides a report from its own numbers.
bool recomputed_holds(const ConditionReport& r) {
    switch (r.theorem) {
        case Theorem::schauder_sie: return *r.value("required_radius") <= *r.value("r");
        case Theorem::banach_sie: return *r.value("k_squared") < 1.0;
        case Theorem::schauder_fredholm: return *r.value("lambda_M") <= *r.value("r");
        case Theorem::banach_fredholm: return *r.value("contraction") < 1.0;
    }
    return false;
}

void check_self_consistent(const ConditionReport& r) {
    if (r.verdict == Verdict::pass) CHECK(recomputed_holds(r));
    if (r.verdict == Verdict::fail) CHECK_FALSE(recomputed_holds(r));
}

}  // namespace

TEST_CASE("initial law moments") {
    CHECK(InitialLaw::constant(-2).second_moment() == 4.0);
    CHECK(InitialLaw::normal(1, 0.5).second_moment() == 1.5);
    CHECK(InitialLaw::lognormal(0.1, 0.04).second_moment() == std::exp(0.2 + 0.08));
    CHECK(InitialLaw::lognormal(0.1, 0.04).mean() == std::exp(0.1 + 0.02));
    CHECK_THROWS_AS(InitialLaw::normal(0, -1), Error);
}

TEST_CASE("initial law sampling matches closed-form moments") {
    const InitialLaw laws[] = {InitialLaw::normal(0.5, 2.0), InitialLaw::lognormal(-0.2, 0.3)};
    for (const auto& law : laws) {
        const auto x = law.sample(100000, 17);
        std::vector<double> sq(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) sq[i] = x[i] * x[i];
        const auto m1 = sample_moments(x), m2 = sample_moments(sq);
        CHECK(std::abs(m1.mean - law.mean()) <= 4 * m1.std_error());
        CHECK(std::abs(m2.mean - law.second_moment()) <= 4 * m2.std_error());
    }
    const auto c = InitialLaw::constant(3).sample(5, 1);
    CHECK(c == std::vector<double>(5, 3.0));
    // Draw p depends only on (seed, p).
    CHECK(InitialLaw::normal(0, 1).sample(3, 9)[2] == InitialLaw::normal(0, 1).sample(50, 9)[2]);
}

TEST_CASE("initial law descriptors") {
    for (const char* t : {"constant:1", "normal:0.5,2", "lognormal:-0.2,0.3"})
        CHECK(parse_initial_law(t).descriptor() == t);
    for (const char* t : {"normal:1", "normal:1,-1", "uniform:0,1", "constant:1,2", "constant:"})
        CHECK_THROWS_AS(parse_initial_law(t), Error);
}

TEST_CASE("schauder worked instances") {
    const auto p = constant_problem(InitialLaw::constant(1.0), 1.0);
    const auto r3 = check_schauder(p, 3.0);
    CHECK(r3.verdict == Verdict::pass);
    CHECK(*r3.value("d") == 1.0);
    CHECK(*r3.value("lhs") == 9.0);
    CHECK(*r3.value("rhs") == 9.0);

    const auto r29 = check_schauder(p, 2.9);
    CHECK(r29.verdict == Verdict::fail);
    CHECK(*r29.value("lhs") == 9.0);
    CHECK(*r29.value("rhs") == 2.9 * 2.9);

    const auto z = check_schauder(constant_problem(InitialLaw::constant(0.0), 1.0), std::sqrt(6.0));
    CHECK(z.verdict == Verdict::pass);
    CHECK(*z.value("lhs") == 6.0);
    CHECK(within_ulps(*z.value("rhs"), 6.0, 1));
    check_self_consistent(r3);
    check_self_consistent(r29);
    check_self_consistent(z);
}

TEST_CASE("banach worked instances") {
    const auto a = check_banach(linear_problem(0.1, 0.1));
    CHECK(a.verdict == Verdict::pass);
    CHECK(*a.value("c") == 0.1);
    CHECK(within_ulps(*a.value("k_squared"), 0.04, 2));
    CHECK(within_ulps(*a.value("k"), 0.2, 2));

    const auto b = check_banach(linear_problem(0.5, 0.5));
    CHECK(b.verdict == Verdict::fail);
    CHECK(*b.value("k_squared") == 1.0);

    const auto gbm = check_banach(linear_problem(0.05, 0.2));
    CHECK(gbm.verdict == Verdict::pass);
    CHECK(*gbm.value("k1") == 0.05);
    CHECK(*gbm.value("k2") == 0.2);
    CHECK(*gbm.value("c") == 0.2);
    CHECK(within_ulps(*gbm.value("k_squared"), 0.16, 2));
    CHECK(within_ulps(*gbm.value("k"), 0.4, 2));
    for (const auto* r : {&a, &b, &gbm}) check_self_consistent(*r);
}

TEST_CASE("banach verdict is symmetric in f and sigma") {
    for (double k : {0.1, 0.3, 0.5, 0.7}) {
        const auto x = check_banach(linear_problem(k, 0.05));
        const auto y = check_banach(linear_problem(0.05, k));
        CHECK(x.verdict == y.verdict);
        CHECK(*x.value("k") == *y.value("k"));
    }
}

TEST_CASE("schauder is monotone in r for constant d") {
    const auto p = constant_problem(InitialLaw::normal(0.3, 0.8), 0.7, 0.0, 1.5);
    const auto first = min_radius(p);
    REQUIRE(first.status == RadiusSearch::Status::found);
    CHECK(check_schauder(p, first.radius).verdict == Verdict::pass);
    for (double r = first.radius; r < 50.0; r *= 1.37) {
        const auto rep = check_schauder(p, r);
        CHECK(rep.verdict == Verdict::pass);
        check_self_consistent(rep);
    }
    CHECK(check_schauder(p, first.radius - 2 * kRadiusTolerance).verdict == Verdict::fail);
}

TEST_CASE("min_radius") {
    const auto z = min_radius(constant_problem(InitialLaw::constant(0.0), 1.0));
    CHECK(z.status == RadiusSearch::Status::found);
    CHECK(std::abs(z.radius - std::sqrt(6.0)) <= kRadiusTolerance);

    const auto one = min_radius(constant_problem(InitialLaw::constant(1.0), 1.0));
    CHECK(one.status == RadiusSearch::Status::found);
    CHECK(std::abs(one.radius - 3.0) <= kRadiusTolerance);

    const auto lin = min_radius(linear_problem(1.0, 1.0));
    CHECK(lin.status == RadiusSearch::Status::infeasible);

    const auto trivial = min_radius(constant_problem(InitialLaw::constant(0.0), 0.0));
    CHECK(trivial.status == RadiusSearch::Status::found);
    CHECK(trivial.radius == 0.0);
}

TEST_CASE("heuristic bound policy") {
    const auto p = constant_problem(InitialLaw::constant(1.0), 1.0);
    BoundPolicy sampled{BoundSource::sampled, false, 1000, 3};
    CHECK(check_schauder(p, 3.0, sampled).verdict == Verdict::unavailable);
    CHECK(check_banach(p, sampled).verdict == Verdict::unavailable);
    sampled.allow_heuristic = true;
    CHECK(check_schauder(p, 3.0, sampled).verdict == Verdict::pass_heuristic);
    CHECK(check_schauder(p, 2.0, sampled).verdict == Verdict::fail);
    CHECK(check_banach(p, sampled).verdict == Verdict::pass_heuristic);
}

TEST_CASE("fredholm condition instances") {
    const FredholmProblem one{0, 1, 1, Kernel::separable(TimeFunction::constant(1), TimeFunction::constant(1))};
    const auto s1 = check_fredholm_schauder(one, 1.0);
    CHECK(s1.verdict == Verdict::pass);
    CHECK(*s1.value("M") == 1.0);

    const FredholmProblem two{0, 1, 1, Kernel::separable(TimeFunction::constant(2), TimeFunction::constant(1))};
    CHECK(check_fredholm_schauder(two, 1.0).verdict == Verdict::fail);

    FredholmProblem zero = two;
    zero.lambda = 0.0;
    for (double r : {1e-9, 0.5, 1e3}) CHECK(check_fredholm_schauder(zero, r).verdict == Verdict::pass);
    CHECK(check_fredholm_banach(zero).verdict == Verdict::pass);

    const FredholmProblem quarter{0, 1, 1,
                                  Kernel::affine(TimeFunction::polynomial({0, 1}), TimeFunction::polynomial({0, 1}), 0.25)};
    const auto b = check_fredholm_banach(quarter);
    CHECK(b.verdict == Verdict::pass);
    CHECK(*b.value("L") == 0.25);
    CHECK(*b.value("contraction") == 0.25);

    const FredholmProblem unit{0, 1, 1, Kernel::affine(TimeFunction::constant(0), TimeFunction::constant(0), 1.0)};
    const auto u = check_fredholm_banach(unit);
    CHECK(u.verdict == Verdict::fail);
    CHECK(*u.value("contraction") == 1.0);
    for (const auto* r : {&s1, &b, &u}) check_self_consistent(*r);
}

TEST_CASE("report serialization") {
    const auto rep = check_banach(linear_problem(0.5, 0.5));
    CHECK(condition_csv_header() == "theorem,verdict,intermediates");
    const auto row = to_csv_row(rep);
    CHECK(row.rfind("banach_sie,fail,\"", 0) == 0);
    CHECK(row.find("k_squared=1;") != std::string::npos);
    CHECK(row.back() == '"');
    const auto text = to_text(rep);
    CHECK(text.find("verdict = fail\n") != std::string::npos);
    CHECK(text.find("k = 1\n") != std::string::npos);
    // %.17g keeps every bit.
    const auto g = to_csv_row(check_banach(linear_problem(0.05, 0.2)));
    CHECK(g.find("k_squared=0.16000000000000003") != std::string::npos);
}

TEST_CASE("argument errors") {
    const auto p = constant_problem(InitialLaw::constant(1.0), 1.0);
    CHECK_THROWS_AS(check_schauder(p, 0.0), Error);
    CHECK_THROWS_AS(check_schauder(p, -1.0), Error);
    CHECK_THROWS_AS(check_banach(constant_problem(InitialLaw::constant(1.0), 1.0, 1.0, 1.0)), Error);
}
