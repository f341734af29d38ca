#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sie/paths.hpp"

namespace sie {

/// Values X_{t_j}(omega_p) of a process on a grid, row-major n_paths x (m+1).
///
/// Adaptedness is a property of how a process is built, not of the storage:
/// every constructor in this library computes column j only from increments
/// with index < j and from the initial condition.
class AdaptedProcess {
public:
    AdaptedProcess(TimeGrid grid, std::size_t n_paths);
    AdaptedProcess(TimeGrid grid, std::size_t n_paths, std::vector<double> values);

    static AdaptedProcess constant(const TimeGrid& grid, std::size_t n_paths, double value);

    const TimeGrid& grid() const { return grid_; }
    std::size_t n_paths() const { return n_paths_; }
    std::size_t steps() const { return grid_.steps(); }
    std::size_t width() const { return grid_.steps() + 1; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::span<const double> row(std::size_t p) const {
        return std::span<const double>(values_).subspan(p * width(), width());
    }
    std::span<double> row(std::size_t p) { return std::span<double>(values_).subspan(p * width(), width()); }
    double at(std::size_t p, std::size_t j) const { return values_[p * width() + j]; }
    double& at(std::size_t p, std::size_t j) { return values_[p * width() + j]; }

    bool same_shape(const AdaptedProcess& other) const {
        return grid_ == other.grid_ && n_paths_ == other.n_paths_;
    }
    bool matches(const BrownianEnsemble& ensemble) const {
        return grid_ == ensemble.grid() && n_paths_ == ensemble.n_paths();
    }

    /// Throws NumericFailure naming the first non-finite entry.
    void require_finite(const char* context) const;

    AdaptedProcess& operator+=(const AdaptedProcess& other);
    AdaptedProcess& operator-=(const AdaptedProcess& other);
    AdaptedProcess& operator*=(double scale);

    friend AdaptedProcess operator+(AdaptedProcess lhs, const AdaptedProcess& rhs) { return lhs += rhs; }
    friend AdaptedProcess operator-(AdaptedProcess lhs, const AdaptedProcess& rhs) { return lhs -= rhs; }
    friend AdaptedProcess operator*(double s, AdaptedProcess x) { return x *= s; }

private:
    TimeGrid grid_;
    std::size_t n_paths_;
    std::vector<double> values_;
};

/// B(t_j) for every path of the ensemble.
AdaptedProcess brownian_process(const BrownianEnsemble& ensemble);

/// The deterministic process t_j, replicated over n_paths.
AdaptedProcess time_process(const TimeGrid& grid, std::size_t n_paths);

struct NormEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
};

struct IsometryReport {
    double lhs = 0.0;             ///< mean of (terminal Ito integral)^2
    double rhs = 0.0;             ///< mean of sum f^2 dt
    double rel_error = 0.0;       ///< |lhs - rhs| / max(|rhs|, floor)
    double diff_std_error = 0.0;  ///< MC standard error of the paired difference
    double tolerance = 0.0;
    bool pass = false;

    /// |lhs - rhs| in units of diff_std_error (0 when both vanish).
    double z_score() const;
};

/// Scale floor used by IsometryReport::rel_error and the pass rule.
inline constexpr double kIsometryFloor = 1e-12;

/// Cumulative left-endpoint sum sum_{i<j} X_i dB_i; column 0 is zero.
AdaptedProcess ito_integral(const AdaptedProcess& integrand, const BrownianEnsemble& ensemble);

/// Cumulative left Riemann sum sum_{i<j} X_i dt; column 0 is zero.
AdaptedProcess lebesgue_integral(const AdaptedProcess& integrand, const TimeGrid& grid);

/// (E|X_{t_j}|^2)^{1/2}; std_error is that of the root, via the delta method.
NormEstimate l2_norm_at(const AdaptedProcess& process, std::size_t j);

/// max_j of l2_norm_at; std_error taken at the first maximising index.
NormEstimate sup_l2_norm(const AdaptedProcess& process);

/// Left-endpoint estimate of int_a^b E|X_t|^2 dt (the squared L2_ad norm).
NormEstimate l2ad_norm(const AdaptedProcess& process);

/// Compares both sides of the Ito isometry on one ensemble. The discrete
/// left-endpoint sums make the identity exact in expectation, so only Monte
/// Carlo error separates lhs from rhs.
IsometryReport isometry_check(const AdaptedProcess& integrand, const BrownianEnsemble& ensemble,
                              double tolerance);

/// Per-column mean and MC standard error of the mean.
struct ColumnMoments {
    std::vector<double> mean;
    std::vector<double> std_error;
};

ColumnMoments column_moments(const AdaptedProcess& process);

/// Per-column mean of squares (E|X_{t_j}|^2 estimates).
std::vector<double> column_mean_squares(const AdaptedProcess& process);

}  // namespace sie
