#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sie/calculus.hpp"
#include "sie/conditions.hpp"
#include "sie/paths.hpp"

namespace sie {

/// (A X)_j = h + sum_{i<j} [ f(t_i, X_i) dt + sigma(t_i, X_i) dB_i ], the
/// discrete Picard operator. Column 0 equals h. The accumulation order is the
/// same as in euler_maruyama, so a process satisfying the recursion is
/// reproduced bit for bit.
AdaptedProcess apply_operator(const SieProblem& problem, const AdaptedProcess& x,
                              const BrownianEnsemble& ensemble, std::span<const double> h_samples);

/// X_{j+1} = X_j + f(t_j, X_j) dt + sigma(t_j, X_j) dB_j, X_0 = h.
AdaptedProcess euler_maruyama(const SieProblem& problem, const BrownianEnsemble& ensemble,
                              std::span<const double> h_samples);

/// Fixed-point defect sup_t || A x - x ||.
NormEstimate residual(const SieProblem& problem, const AdaptedProcess& x, const BrownianEnsemble& ensemble,
                      std::span<const double> h_samples);

enum class InitialIterate { zero, h_constant };

struct PicardOptions {
    double tol = 1e-6;
    std::size_t max_iter = 50;
    InitialIterate initial = InitialIterate::h_constant;
    std::uint64_t seed_h = 0;
    /// Damping: X <- (1 - theta) X + theta A X. 1 is plain Picard.
    double theta = 1.0;
    /// When set, the solve records whether every iterate stays in the r-ball.
    std::optional<double> ball_radius;
    /// Warm start; overrides `initial` and must match the ensemble.
    std::optional<AdaptedProcess> start;
};

struct IterationRecord {
    std::size_t iteration = 0;
    double update_norm = 0.0;  ///< sup-L2 norm of X^{n} - X^{n-1}
    double residual = 0.0;     ///< sup-L2 norm of A X^{n} - X^{n}
    double elapsed_ms = 0.0;
};

struct SolveResult {
    AdaptedProcess solution;
    std::vector<double> h_samples{};
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<IterationRecord> history{};
    NormEstimate final_residual{};
    std::optional<double> empirical_rate{};  ///< set once history has >= 4 entries
    std::optional<double> theoretical_k{};   ///< from check_banach, when available
    std::optional<bool> stayed_in_ball{};

    std::vector<double> update_norms() const;
};

/// Picard iteration X^{n+1} = A X^n with h drawn once from problem.h and held
/// fixed. Stops when the sup-L2 update is <= tol or after max_iter
/// iterations; non-convergence is reported, not thrown.
SolveResult solve_picard(const SieProblem& problem, const BrownianEnsemble& ensemble,
                         const PicardOptions& options);

/// Geometric fit to the tail of an update-norm history: exp of the
/// least-squares slope of log(update) over the last (up to five) entries above
/// the rounding floor. Needs at least four entries in total.
std::optional<double> empirical_rate(std::span<const double> updates, double scale);

/// A random element of the sup-L2 ball of radius r: c0 + c1 W_t + c2 s_t
/// with W = B / sqrt(b-a), s_t = (t-a)/(b-a) and normal weights, rescaled so
/// its empirical sup-L2 norm is u r with u uniform in (0, 1].
AdaptedProcess random_ball_element(const BrownianEnsemble& ensemble, double r, std::uint64_t seed,
                                   std::uint32_t index);

struct ContractionProbe {
    double max_ratio = 0.0;
    std::vector<double> ratios;  ///< one per non-degenerate trial
    std::size_t skipped = 0;     ///< trials with X = Y
};

/// Empirical Lipschitz ratio sup||AX - AY|| / sup||X - Y|| over random ball
/// pairs. h cancels in the difference and is set to zero.
ContractionProbe contraction_probe(const SieProblem& problem, const BrownianEnsemble& ensemble,
                                   std::size_t n_trials, double r, std::uint64_t seed);

struct EquicontinuityProbe {
    double modulus = 0.0;              ///< max ||AX_{t1} - AX_{t2}||^2 / |t1 - t2|
    double relative_std_error = 0.0;   ///< MC error of the maximising estimate
    std::size_t t1 = 0;
    std::size_t t2 = 0;
};

/// Scans grid pairs (j, j + lag) for lag = 1..max_lag. x must lie in the
/// r-ball.
EquicontinuityProbe equicontinuity_probe(const SieProblem& problem, const BrownianEnsemble& ensemble,
                                         const AdaptedProcess& x, double r, std::size_t max_lag = 1);

}  // namespace sie
