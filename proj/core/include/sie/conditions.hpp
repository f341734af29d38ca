#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sie/coefficients.hpp"
#include "sie/fredholm.hpp"

namespace sie {

/// Law of the initial condition h: constant(x0), normal(mean, var) or
/// lognormal(mu, sigma2) (h = exp(mu + sqrt(sigma2) Z)).
class InitialLaw {
public:
    enum class Kind { constant, normal, lognormal };

    static InitialLaw constant(double x0);
    static InitialLaw normal(double mean, double variance);
    static InitialLaw lognormal(double mu, double sigma2);

    Kind kind() const { return kind_; }
    double mean() const;
    double second_moment() const;  ///< E[h^2], closed form

    /// n draws, one per path; draw p depends only on (seed, p).
    std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

    std::string descriptor() const;

private:
    InitialLaw(Kind kind, double p1, double p2) : kind_(kind), p1_(p1), p2_(p2) {}

    Kind kind_;
    double p1_;
    double p2_;
};

/// "constant:x0", "normal:mean,var", "lognormal:mu,sigma2".
InitialLaw parse_initial_law(std::string_view text);

/// X_t = h + int_a^t sigma(s, X_s) dB(s) + int_a^t f(s, X_s) ds on [a, b].
struct SieProblem {
    double a = 0.0;
    double b = 1.0;
    InitialLaw h;
    Coefficient drift;      ///< f
    Coefficient diffusion;  ///< sigma

    Interval interval() const { return {a, b}; }
    void validate() const;
};

enum class Theorem { schauder_sie, banach_sie, schauder_fredholm, banach_fredholm };
enum class Verdict { pass, pass_heuristic, fail, unavailable };

const char* to_string(Theorem t);
const char* to_string(Verdict v);

using NamedValues = std::vector<std::pair<std::string, double>>;

struct ConditionReport {
    Theorem theorem = Theorem::schauder_sie;
    NamedValues inputs;
    NamedValues intermediates;
    Verdict verdict = Verdict::unavailable;
    std::string message;

    /// The inequality each report decides, written over its own named values.
    std::string inequality() const;

    std::optional<double> value(std::string_view name) const;
};

/// key=value block, one entry per line.
std::string to_text(const ConditionReport& report);

/// CSV: theorem,verdict,"name=value;..." (inputs first, then intermediates).
std::string condition_csv_header();
std::string to_csv_row(const ConditionReport& report);

enum class BoundSource { analytic, sampled };

struct BoundPolicy {
    BoundSource source = BoundSource::analytic;
    bool allow_heuristic = false;
    std::size_t n_samples = 100000;
    std::uint64_t seed = 0;
};

/// Existence condition 3E[h^2] + 3(1+b-a)(b-a)d^2 <= r^2 with
/// d = max(sup|f|, sup|sigma|) over [a,b] x [-r, r]. The comparison is done in
/// the radius domain, sqrt(lhs) <= r, so a radius produced by min_radius (or
/// a correctly rounded square root) is accepted at the boundary.
ConditionReport check_schauder(const SieProblem& problem, double r, const BoundPolicy& policy = {});

/// Contraction condition k^2 = 2c^2(1+b-a)(b-a) < 1 with c = max(k1, k2).
ConditionReport check_banach(const SieProblem& problem, const BoundPolicy& policy = {});

/// |lambda| M <= r with (b-a) M = max |F| over [a,b]^2 x [-r, r].
ConditionReport check_fredholm_schauder(const FredholmProblem& problem, double r);

/// (b-a) |lambda| L < 1 with L = sup |F_u|.
ConditionReport check_fredholm_banach(const FredholmProblem& problem);

struct RadiusSearch {
    enum class Status { found, infeasible, unavailable };
    Status status = Status::unavailable;
    double radius = 0.0;
};

inline constexpr double kMaxRadius = 1e6;
inline constexpr double kRadiusTolerance = 1e-9;

/// Smallest r in [0, kMaxRadius] passing check_schauder, by bisection to
/// kRadiusTolerance. For the registry, sup(r)/r is non-increasing, so the
/// pass set is an interval [r_min, inf) and bisection is exact.
RadiusSearch min_radius(const SieProblem& problem);

}  // namespace sie
