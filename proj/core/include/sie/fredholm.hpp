#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sie/coefficients.hpp"

namespace sie {

/// Kernel registry for u(x) = lambda int_a^b F(x, y, u(y)) dy:
///   separable  F = p(x) q(y)
///   affine     F = p(x) q(y) + gamma u
///   sine       F = p(x) q(y) sin(u)
class Kernel {
public:
    enum class Kind { separable, affine, sine };

    static Kernel separable(TimeFunction p, TimeFunction q);
    static Kernel affine(TimeFunction p, TimeFunction q, double gamma);
    static Kernel sine(TimeFunction p, TimeFunction q);

    double operator()(double x, double y, double u) const;

    /// max |F| over [a,b]^2 x [-r, r].
    double max_abs(Interval interval, double r) const;

    /// sup |dF/du| over [a,b]^2 x R.
    double u_lipschitz(Interval interval) const;

    Kind kind() const { return kind_; }
    const TimeFunction& p() const { return p_; }
    const TimeFunction& q() const { return q_; }
    double gamma() const { return gamma_; }

    std::string descriptor() const;

private:
    Kernel(Kind kind, TimeFunction p, TimeFunction q, double gamma)
        : kind_(kind), p_(std::move(p)), q_(std::move(q)), gamma_(gamma) {}

    Kind kind_;
    TimeFunction p_;
    TimeFunction q_;
    double gamma_;
};

/// "separable:(p):(q)", "affine:(p):(q):gamma", "sine:(p):(q)" with p, q in
/// the time-function grammar.
Kernel parse_kernel(std::string_view text);

struct FredholmProblem {
    double a = 0.0;
    double b = 1.0;
    double lambda = 1.0;
    Kernel kernel;

    Interval interval() const { return {a, b}; }
    void validate() const;
};

struct GridFunction {
    std::vector<double> nodes;
    std::vector<double> values;
};

/// Composite-trapezoid abscissae a + i (b-a)/n, i = 0..n.
std::vector<double> trapezoid_nodes(double a, double b, std::size_t n_quad);

/// lambda * trapezoid_y F(x_i, y, u(y)) at every node x_i.
GridFunction apply_fredholm(const FredholmProblem& problem, const GridFunction& u, std::size_t n_quad);

struct FredholmSolveResult {
    GridFunction solution;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> history;  ///< max-norm update per iteration
    double residual = 0.0;        ///< max |T u - u| at the returned iterate
    std::optional<double> observed_rate;  ///< max update ratio above the rounding floor
    std::optional<bool> in_ball;          ///< max |u| <= r, when r was supplied
};

/// Fixed-point iteration u <- T u from u = 0 until the max-norm update is
/// <= tol. Non-convergence is reported through the result, not thrown.
FredholmSolveResult solve_fredholm(const FredholmProblem& problem, std::size_t n_quad, double tol,
                                   std::size_t max_iter, std::optional<double> radius = std::nullopt);

/// Largest ratio history[n] / history[n-1] (n >= 1) over updates that stay
/// above sqrt(eps) * scale; smaller updates are dominated by cancellation.
std::optional<double> max_update_ratio(const std::vector<double>& history, double scale);

}  // namespace sie
