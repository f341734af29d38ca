#include "sie/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sie/error.hpp"
#include "sie/parallel.hpp"

namespace sie {

Kernel Kernel::separable(TimeFunction p, TimeFunction q) {
    return Kernel(Kind::separable, std::move(p), std::move(q), 0.0);
}

Kernel Kernel::affine(TimeFunction p, TimeFunction q, double gamma) {
    if (!std::isfinite(gamma)) throw Error(ErrorKind::non_finite_input, "kernel gamma is not finite");
    return Kernel(Kind::affine, std::move(p), std::move(q), gamma);
}

Kernel Kernel::sine(TimeFunction p, TimeFunction q) {
    return Kernel(Kind::sine, std::move(p), std::move(q), 0.0);
}

double Kernel::operator()(double x, double y, double u) const {
    const double pq = p_(x) * q_(y);
    switch (kind_) {
        case Kind::separable: return pq;
        case Kind::affine: return pq + gamma_ * u;
        case Kind::sine: return pq * std::sin(u);
    }
    return 0.0;
}

double Kernel::max_abs(Interval iv, double r) const {
    const double pq = p_.max_abs(iv) * q_.max_abs(iv);
    switch (kind_) {
        case Kind::separable: return pq;
        // u ranges over [-r, r] independently of x and y, so its sign can
        // always be aligned with p q.
        case Kind::affine: return pq + std::abs(gamma_) * r;
        case Kind::sine: return pq * (r >= std::numbers::pi / 2 ? 1.0 : std::sin(r));
    }
    return 0.0;
}

double Kernel::u_lipschitz(Interval iv) const {
    switch (kind_) {
        case Kind::separable: return 0.0;
        case Kind::affine: return std::abs(gamma_);
        case Kind::sine: return p_.max_abs(iv) * q_.max_abs(iv);
    }
    return 0.0;
}

std::string Kernel::descriptor() const {
    const std::string pq = "(" + p_.descriptor() + "):(" + q_.descriptor() + ")";
    switch (kind_) {
        case Kind::separable: return "separable:" + pq;
        case Kind::affine: return "affine:" + pq + ":" + descriptor::format_number(gamma_);
        case Kind::sine: return "sine:" + pq;
    }
    return {};
}

Kernel parse_kernel(std::string_view text) {
    descriptor::Cursor cur(text);
    const auto name = cur.word();
    cur.expect(":");
    auto p = descriptor::time_function(cur);
    cur.expect(":");
    auto q = descriptor::time_function(cur);
    std::optional<Kernel> kernel;
    if (name == "separable") {
        kernel = Kernel::separable(std::move(p), std::move(q));
    } else if (name == "affine") {
        cur.expect(":");
        kernel = Kernel::affine(std::move(p), std::move(q), cur.number());
    } else if (name == "sine") {
        kernel = Kernel::sine(std::move(p), std::move(q));
    } else {
        cur.fail("unknown kernel kind '" + std::string(name) + "'");
    }
    if (!cur.done()) cur.fail("trailing characters");
    return *kernel;
}

void FredholmProblem::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw Error(ErrorKind::invalid_interval, "Fredholm problem needs finite a < b");
    if (!std::isfinite(lambda)) throw Error(ErrorKind::non_finite_input, "lambda is not finite");
}

std::vector<double> trapezoid_nodes(double a, double b, std::size_t n_quad) {
    if (n_quad == 0) throw Error(ErrorKind::invalid_steps, "n_quad must be >= 1");
    std::vector<double> nodes(n_quad + 1);
    const double h = (b - a) / static_cast<double>(n_quad);
    for (std::size_t i = 0; i < n_quad; ++i) nodes[i] = a + static_cast<double>(i) * h;
    nodes[n_quad] = b;
    return nodes;
}

GridFunction apply_fredholm(const FredholmProblem& problem, const GridFunction& u, std::size_t n_quad) {
    problem.validate();
    const auto nodes = trapezoid_nodes(problem.a, problem.b, n_quad);
    if (u.nodes != nodes || u.values.size() != nodes.size())
        throw Error(ErrorKind::node_mismatch,
                    "grid function is not on the " + std::to_string(n_quad) + "-panel trapezoid nodes");
    const double h = (problem.b - problem.a) / static_cast<double>(n_quad);
    GridFunction out{nodes, std::vector<double>(nodes.size())};
    parallel_for(nodes.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double x = nodes[i];
            double acc = 0.5 * (problem.kernel(x, nodes.front(), u.values.front()) +
                                problem.kernel(x, nodes.back(), u.values.back()));
            for (std::size_t j = 1; j < n_quad; ++j) acc += problem.kernel(x, nodes[j], u.values[j]);
            out.values[i] = problem.lambda * h * acc;
        }
    });
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (!std::isfinite(out.values[i])) throw NumericFailure(0, i, "apply_fredholm");
    return out;
}

std::optional<double> max_update_ratio(const std::vector<double>& history, double scale) {
    const double floor = std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(scale, 1.0);
    std::optional<double> worst;
    for (std::size_t n = 1; n < history.size(); ++n) {
        if (history[n - 1] <= floor || history[n] <= floor) break;
        const double ratio = history[n] / history[n - 1];
        worst = worst ? std::max(*worst, ratio) : ratio;
    }
    return worst;
}

namespace {

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
    return worst;
}

double max_abs(const std::vector<double>& x) {
    double worst = 0.0;
    for (double v : x) worst = std::max(worst, std::abs(v));
    return worst;
}

}  // namespace

FredholmSolveResult solve_fredholm(const FredholmProblem& problem, std::size_t n_quad, double tol,
                                   std::size_t max_iter, std::optional<double> radius) {
    if (!(tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tol must be positive");
    if (max_iter == 0) throw Error(ErrorKind::invalid_argument, "max_iter must be >= 1");
    const auto nodes = trapezoid_nodes(problem.a, problem.b, n_quad);
    GridFunction u{nodes, std::vector<double>(nodes.size(), 0.0)};
    GridFunction tu = apply_fredholm(problem, u, n_quad);

    FredholmSolveResult res;
    while (res.iterations < max_iter) {
        const double update = max_abs_diff(tu.values, u.values);
        u = std::move(tu);
        ++res.iterations;
        res.history.push_back(update);
        tu = apply_fredholm(problem, u, n_quad);
        if (update <= tol) {
            res.converged = true;
            break;
        }
    }
    res.residual = max_abs_diff(tu.values, u.values);
    res.observed_rate = max_update_ratio(res.history, max_abs(u.values));
    if (radius) res.in_ball = max_abs(u.values) <= *radius;
    res.solution = std::move(u);
    return res;
}

}  // namespace sie
