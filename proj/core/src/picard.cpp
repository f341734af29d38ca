#include "sie/picard.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "sie/error.hpp"
#include "sie/parallel.hpp"
#include "sie/rng.hpp"

namespace sie {

namespace {

void require_operator_inputs(const AdaptedProcess* x, const BrownianEnsemble& ensemble,
                             std::span<const double> h_samples, const char* op) {
    if (x && !x->matches(ensemble))
        throw Error(ErrorKind::shape_mismatch, std::string(op) + ": process does not match the ensemble");
    if (h_samples.size() != ensemble.n_paths())
        throw Error(ErrorKind::shape_mismatch, std::string(op) + ": need one h sample per path, got " +
                                                   std::to_string(h_samples.size()));
    for (std::size_t p = 0; p < h_samples.size(); ++p)
        if (!std::isfinite(h_samples[p])) throw NumericFailure(p, 0, std::string(op) + " initial condition");
}

}  // namespace

AdaptedProcess apply_operator(const SieProblem& problem, const AdaptedProcess& x,
                              const BrownianEnsemble& ensemble, std::span<const double> h_samples) {
    problem.validate();
    require_operator_inputs(&x, ensemble, h_samples, "apply_operator");
    x.require_finite("apply_operator input");
    const TimeGrid& grid = ensemble.grid();
    const GridCoefficient f(problem.drift, grid.nodes());
    const GridCoefficient sigma(problem.diffusion, grid.nodes());
    const double dt = grid.dt();
    const std::size_t m = grid.steps();

    AdaptedProcess out(grid, x.n_paths());
    parallel_for(x.n_paths(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto in = x.row(p);
            const auto dB = ensemble.increments(p);
            auto row = out.row(p);
            double acc = h_samples[p];
            row[0] = acc;
            for (std::size_t i = 0; i < m; ++i) {
                const double incr = f(i, in[i]) * dt + sigma(i, in[i]) * dB[i];
                acc = acc + incr;
                row[i + 1] = acc;
            }
        }
    });
    out.require_finite("apply_operator");
    return out;
}

AdaptedProcess euler_maruyama(const SieProblem& problem, const BrownianEnsemble& ensemble,
                              std::span<const double> h_samples) {
    problem.validate();
    require_operator_inputs(nullptr, ensemble, h_samples, "euler_maruyama");
    const TimeGrid& grid = ensemble.grid();
    const GridCoefficient f(problem.drift, grid.nodes());
    const GridCoefficient sigma(problem.diffusion, grid.nodes());
    const double dt = grid.dt();
    const std::size_t m = grid.steps();

    AdaptedProcess out(grid, ensemble.n_paths());
    parallel_for(ensemble.n_paths(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto dB = ensemble.increments(p);
            auto row = out.row(p);
            double acc = h_samples[p];
            row[0] = acc;
            for (std::size_t i = 0; i < m; ++i) {
                const double incr = f(i, acc) * dt + sigma(i, acc) * dB[i];
                acc = acc + incr;
                row[i + 1] = acc;
            }
        }
    });
    out.require_finite("euler_maruyama");
    return out;
}

NormEstimate residual(const SieProblem& problem, const AdaptedProcess& x, const BrownianEnsemble& ensemble,
                      std::span<const double> h_samples) {
    return sup_l2_norm(apply_operator(problem, x, ensemble, h_samples) - x);
}

std::vector<double> SolveResult::update_norms() const {
    std::vector<double> out;
    out.reserve(history.size());
    for (const auto& rec : history) out.push_back(rec.update_norm);
    return out;
}

std::optional<double> empirical_rate(std::span<const double> updates, double scale) {
    if (updates.size() < 4) return std::nullopt;
    const double floor = std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(scale, 1.0);
    std::size_t usable = 0;
    while (usable < updates.size() && updates[usable] > floor) ++usable;
    if (usable < 2) return std::nullopt;
    const std::size_t first = usable > 5 ? usable - 5 : 0;
    const std::size_t n = usable - first;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double xk = static_cast<double>(k);
        const double yk = std::log(updates[first + k]);
        sx += xk;
        sy += yk;
        sxx += xk * xk;
        sxy += xk * yk;
    }
    const double nn = static_cast<double>(n);
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    return std::exp(slope);
}

SolveResult solve_picard(const SieProblem& problem, const BrownianEnsemble& ensemble,
                         const PicardOptions& options) {
    problem.validate();
    if (!(options.tol > 0.0)) throw Error(ErrorKind::invalid_argument, "tol must be positive");
    if (options.max_iter == 0) throw Error(ErrorKind::invalid_argument, "max_iter must be >= 1");
    if (!(options.theta > 0.0 && options.theta <= 1.0))
        throw Error(ErrorKind::invalid_argument, "damping theta must lie in (0, 1]");

    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const std::size_t n = ensemble.n_paths();
    const TimeGrid& grid = ensemble.grid();

    std::vector<double> h = problem.h.sample(n, options.seed_h);
    if (options.start && !options.start->matches(ensemble))
        throw Error(ErrorKind::shape_mismatch, "warm start does not match the ensemble");
    AdaptedProcess x = options.start ? *options.start : AdaptedProcess(grid, n);
    if (!options.start && options.initial == InitialIterate::h_constant)
        for (std::size_t p = 0; p < n; ++p)
            for (auto& v : x.row(p)) v = h[p];

    SolveResult res{.solution = AdaptedProcess(grid, n)};
    const auto banach = check_banach(problem);
    if (banach.verdict != Verdict::unavailable) res.theoretical_k = banach.value("k");

    bool in_ball = true;
    auto track_ball = [&](const AdaptedProcess& iterate) {
        if (options.ball_radius) in_ball = in_ball && sup_l2_norm(iterate).value <= *options.ball_radius;
    };
    track_ball(x);

    AdaptedProcess ax = apply_operator(problem, x, ensemble, h);
    while (res.iterations < options.max_iter) {
        AdaptedProcess next = ax;
        if (options.theta != 1.0) {
            next -= x;
            next *= options.theta;
            next += x;
        }
        const double update = sup_l2_norm(next - x).value;
        x = std::move(next);
        ax = apply_operator(problem, x, ensemble, h);
        const double defect = sup_l2_norm(ax - x).value;
        ++res.iterations;
        res.history.push_back(IterationRecord{
            res.iterations, update, defect,
            std::chrono::duration<double, std::milli>(clock::now() - start).count()});
        track_ball(x);
        if (update <= options.tol) {
            res.converged = true;
            break;
        }
    }

    res.final_residual = sup_l2_norm(ax - x);
    const auto updates = res.update_norms();
    res.empirical_rate = empirical_rate(updates, sup_l2_norm(x).value);
    if (options.ball_radius) res.stayed_in_ball = in_ball;
    res.solution = std::move(x);
    res.h_samples = std::move(h);
    return res;
}

namespace {

struct BallDraw {
    double c0, c1, c2, u;
};

BallDraw ball_draw(std::uint64_t seed, std::uint32_t index) {
    const CounterRng rng(seed, RngDomain::probe);
    return {rng.normal(index, 0), rng.normal(index, 1), rng.normal(index, 2), rng.uniform(index, 3)};
}

// Column means of w = B / sqrt(b-a) and w^2, and s = (t-a)/(b-a): enough to
// get the sup-L2 norm of any c0 + c1 w + c2 s without materializing it.
struct MixtureMoments {
    std::vector<double> w1, w2, s;

    double mean_square(std::size_t j, double c0, double c1, double c2) const {
        return c0 * c0 + c1 * c1 * w2[j] + c2 * c2 * s[j] * s[j] + 2.0 * c0 * c1 * w1[j] +
               2.0 * c0 * c2 * s[j] + 2.0 * c1 * c2 * s[j] * w1[j];
    }

    double sup_norm(double c0, double c1, double c2) const {
        double best = 0.0;
        for (std::size_t j = 0; j < s.size(); ++j) best = std::max(best, mean_square(j, c0, c1, c2));
        return std::sqrt(best);
    }
};

MixtureMoments mixture_moments(const BrownianEnsemble& ensemble) {
    const TimeGrid& grid = ensemble.grid();
    AdaptedProcess w = brownian_process(ensemble);
    w *= 1.0 / std::sqrt(grid.length());
    MixtureMoments mm{column_moments(w).mean, column_mean_squares(w), std::vector<double>(grid.steps() + 1)};
    for (std::size_t j = 0; j < mm.s.size(); ++j) mm.s[j] = (grid.node(j) - grid.start()) / grid.length();
    return mm;
}

double ball_scale(const BallDraw& d, double r, double norm) {
    return norm == 0.0 ? 0.0 : d.u * r / norm * (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
}

}  // namespace

AdaptedProcess random_ball_element(const BrownianEnsemble& ensemble, double r, std::uint64_t seed,
                                   std::uint32_t index) {
    if (!(r >= 0.0)) throw Error(ErrorKind::invalid_argument, "ball radius must be non-negative");
    const auto [c0, c1, c2, u] = ball_draw(seed, index);

    const TimeGrid& grid = ensemble.grid();
    const double len = grid.length();
    const double wscale = 1.0 / std::sqrt(len);
    AdaptedProcess x(grid, ensemble.n_paths());
    parallel_for(ensemble.n_paths(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto dB = ensemble.increments(p);
            auto row = x.row(p);
            double b = 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (j > 0) b += dB[j - 1];
                row[j] = c0 + c1 * wscale * b + c2 * (grid.node(j) - grid.start()) / len;
            }
        }
    });
    const double norm = sup_l2_norm(x).value;
    if (norm == 0.0) return x;
    x *= u * r / norm * (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
    return x;
}

ContractionProbe contraction_probe(const SieProblem& problem, const BrownianEnsemble& ensemble,
                                   std::size_t n_trials, double r, std::uint64_t seed) {
    problem.validate();
    if (n_trials == 0) throw Error(ErrorKind::invalid_argument, "n_trials must be >= 1");
    if (!(r >= 0.0)) throw Error(ErrorKind::invalid_argument, "ball radius must be non-negative");

    const TimeGrid& grid = ensemble.grid();
    const GridCoefficient f(problem.drift, grid.nodes());
    const GridCoefficient sigma(problem.diffusion, grid.nodes());
    const MixtureMoments mm = mixture_moments(ensemble);
    const double dt = grid.dt();
    const double wscale = 1.0 / std::sqrt(grid.length());
    const std::size_t m = grid.steps();
    const std::size_t width = m + 1;
    const std::size_t n = ensemble.n_paths();

    // Column sums of (AX - AY)^2 are formed per fixed block of paths and then
    // combined in block order, so the result does not depend on threading.
    constexpr std::size_t kBlock = 64;
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(blocks * width);
    std::vector<double> column(blocks);

    ContractionProbe out;
    for (std::size_t t = 0; t < n_trials; ++t) {
        const BallDraw dx = ball_draw(seed, static_cast<std::uint32_t>(2 * t));
        const BallDraw dy = ball_draw(seed, static_cast<std::uint32_t>(2 * t + 1));
        const double sx = ball_scale(dx, r, mm.sup_norm(dx.c0, dx.c1, dx.c2));
        const double sy = ball_scale(dy, r, mm.sup_norm(dy.c0, dy.c1, dy.c2));
        const double den = mm.sup_norm(sx * dx.c0 - sy * dy.c0, sx * dx.c1 - sy * dy.c1, sx * dx.c2 - sy * dy.c2);
        if (den == 0.0) {
            ++out.skipped;
            continue;
        }

        std::fill(partial.begin(), partial.end(), 0.0);
        parallel_for(blocks, [&](std::size_t first, std::size_t last) {
            for (std::size_t blk = first; blk < last; ++blk) {
                double* acc = partial.data() + blk * width;
                for (std::size_t p = blk * kBlock; p < std::min(n, (blk + 1) * kBlock); ++p) {
                    const auto dB = ensemble.increments(p);
                    double b = 0.0, ax = 0.0, ay = 0.0;
                    for (std::size_t i = 0; i < m; ++i) {
                        const double w = wscale * b;
                        const double s = mm.s[i];
                        const double x = sx * (dx.c0 + dx.c1 * w + dx.c2 * s);
                        const double y = sy * (dy.c0 + dy.c1 * w + dy.c2 * s);
                        ax = ax + (f(i, x) * dt + sigma(i, x) * dB[i]);
                        ay = ay + (f(i, y) * dt + sigma(i, y) * dB[i]);
                        b += dB[i];
                        const double d = ax - ay;
                        acc[i + 1] += d * d;
                    }
                }
            }
        });

        double num = 0.0;
        for (std::size_t j = 1; j < width; ++j) {
            for (std::size_t blk = 0; blk < blocks; ++blk) column[blk] = partial[blk * width + j];
            num = std::max(num, deterministic_sum(column) / static_cast<double>(n));
        }
        const double ratio = std::sqrt(num) / den;
        if (!std::isfinite(ratio)) throw NumericFailure(0, 0, "contraction_probe");
        out.ratios.push_back(ratio);
        out.max_ratio = std::max(out.max_ratio, ratio);
    }
    return out;
}

EquicontinuityProbe equicontinuity_probe(const SieProblem& problem, const BrownianEnsemble& ensemble,
                                         const AdaptedProcess& x, double r, std::size_t max_lag) {
    if (!x.matches(ensemble))
        throw Error(ErrorKind::shape_mismatch, "equicontinuity_probe: process does not match the ensemble");
    if (max_lag == 0 || max_lag > ensemble.steps())
        throw Error(ErrorKind::invalid_argument, "max_lag must lie in [1, m]");
    if (sup_l2_norm(x).value > r * (1.0 + 1e-12))
        throw Error(ErrorKind::invalid_argument, "probe process lies outside the r-ball");

    const std::vector<double> zero_h(ensemble.n_paths(), 0.0);
    const auto ax = apply_operator(problem, x, ensemble, zero_h);
    const TimeGrid& grid = ensemble.grid();
    const std::size_t n = ax.n_paths();

    EquicontinuityProbe best;
    double best_modulus = -1.0;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        // Column j of diff holds AX_{j+lag} - AX_j; the trailing lag columns stay 0.
        AdaptedProcess diff(grid, n);
        for (std::size_t p = 0; p < n; ++p) {
            const auto in = ax.row(p);
            auto row = diff.row(p);
            for (std::size_t j = 0; j + lag < in.size(); ++j) row[j] = in[j + lag] - in[j];
        }
        const auto ms = column_mean_squares(diff);
        for (std::size_t j = 0; j + lag <= grid.steps(); ++j) {
            const double modulus = ms[j] / (grid.node(j + lag) - grid.node(j));
            if (modulus > best_modulus) {
                best_modulus = modulus;
                best.t1 = j;
                best.t2 = j + lag;
            }
        }
    }
    best.modulus = best_modulus;
    std::vector<double> sq(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double d = ax.at(p, best.t2) - ax.at(p, best.t1);
        sq[p] = d * d;
    }
    const auto mom = sample_moments(sq);
    best.relative_std_error = mom.mean > 0.0 ? mom.std_error() / mom.mean : 0.0;
    return best;
}

}  // namespace sie
