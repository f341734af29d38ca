#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sie {

struct Interval {
    double a;
    double b;
};

/// Registry of time functions g(s): constant, polynomial, sinusoid.
class TimeFunction {
public:
    struct Constant {
        double value;
    };
    struct Polynomial {
        std::vector<double> coeffs;  ///< c0 + c1 s + c2 s^2 + ...
    };
    struct Sinusoid {
        double amplitude;
        double frequency;
        double phase;  ///< amplitude * sin(frequency * s + phase)
    };

    static TimeFunction constant(double c);
    static TimeFunction polynomial(std::vector<double> coeffs);
    static TimeFunction sinusoid(double amplitude, double frequency, double phase);

    double operator()(double s) const;

    /// max_{s in [a,b]} |g(s)|, from endpoints and critical points.
    double max_abs(Interval interval) const;

    /// The value when g does not depend on s.
    std::optional<double> constant_value() const;

    std::string descriptor() const;

    const std::variant<Constant, Polynomial, Sinusoid>& form() const { return form_; }

private:
    explicit TimeFunction(std::variant<Constant, Polynomial, Sinusoid> form) : form_(std::move(form)) {}
    std::variant<Constant, Polynomial, Sinusoid> form_;
};

/// Drift or diffusion coefficient (s, x) -> value from a closed registry:
///   constant(c)            c
///   linear(g)              g(s) x
///   affine(alpha, beta)    alpha(s) x + beta(s)
///   clipped(inner, bound)  inner clamped to [-bound, bound]
class Coefficient {
public:
    enum class Kind { constant, linear, affine, clipped };

    static Coefficient constant(double c);
    static Coefficient linear(TimeFunction g);
    static Coefficient affine(TimeFunction alpha, TimeFunction beta);
    static Coefficient clipped(Coefficient inner, double bound);

    Kind kind() const { return kind_; }

    /// Throws Error(non_finite_input) for non-finite s or x.
    double evaluate(double s, double x) const;

    /// Evaluation without input validation, for hot loops over checked data.
    double evaluate_unchecked(double s, double x) const;

    std::string descriptor() const;

    double constant_value() const { return value_; }
    double clip_bound() const { return value_; }
    const TimeFunction& slope() const { return *slope_; }
    const TimeFunction& offset() const { return *offset_; }
    const Coefficient& inner() const { return *inner_; }

private:
    Coefficient() = default;

    Kind kind_ = Kind::constant;
    double value_ = 0.0;  // constant value, or clip bound
    std::shared_ptr<const TimeFunction> slope_;
    std::shared_ptr<const TimeFunction> offset_;
    std::shared_ptr<const Coefficient> inner_;
};

/// A coefficient with its time functions tabulated on fixed nodes, so the
/// per-path loops only do arithmetic.
class GridCoefficient {
public:
    GridCoefficient(const Coefficient& coef, std::span<const double> nodes);

    double operator()(std::size_t j, double x) const;

private:
    Coefficient::Kind kind_;
    double value_;
    std::vector<double> slope_;
    std::vector<double> offset_;
    std::unique_ptr<GridCoefficient> inner_;
};

enum class Provenance { analytic, sampled_heuristic };

const char* to_string(Provenance p);

struct BoundInfo {
    std::optional<double> lipschitz;    ///< in x, uniformly over s in the interval
    std::optional<double> sup_on_ball;  ///< sup |coef| over [a,b] x [-radius, radius]
    double radius = 0.0;
    Provenance provenance = Provenance::analytic;
};

/// Closed-form Lipschitz constant in x over s in the interval.
std::optional<double> lipschitz_constant(const Coefficient& coef, Interval interval);

/// Closed-form sup of |coef(s, x)| over s in the interval and |x| <= r.
std::optional<double> sup_bound(const Coefficient& coef, Interval interval, double r);

BoundInfo analytic_bounds(const Coefficient& coef, Interval interval, double r);

/// Sampled fallback: max |coef| over uniform points of [a,b] x [-r,r] and the
/// max difference quotient over sampled pairs at a common s. These are lower
/// estimates of the true constants and are labelled as heuristic.
BoundInfo estimate_bounds(const Coefficient& coef, Interval interval, double r,
                          std::size_t n_samples, std::uint64_t seed);

/// Descriptor grammar:
///   coefficient := "constant:" num
///                | "linear:" timefn
///                | "affine:(" timefn "):(" timefn ")"
///                | "clipped:" num ":(" coefficient ")"
///   timefn      := "const:" num | "poly:" num {"," num} | "sin:" num "," num "," num
///                | "(" timefn ")"
/// Throws Error(parse_error) naming the offending position.
Coefficient parse_coefficient(std::string_view text);
TimeFunction parse_time_function(std::string_view text);

/// Shared descriptor helpers, also used by the kernel and initial-law parsers.
namespace descriptor {

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }
    bool consume(std::string_view token);
    void expect(std::string_view token);
    double number();
    std::string_view word();
    [[noreturn]] void fail(const std::string& what) const;
    std::size_t position() const { return pos_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

TimeFunction time_function(Cursor& cur);
std::string format_number(double v);

}  // namespace descriptor

}  // namespace sie
