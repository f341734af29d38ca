#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace sie {

/// Uniform time grid a = t_0 < t_1 < ... < t_m = b.
class TimeGrid {
public:
    TimeGrid(double a, double b, std::size_t steps);

    double start() const { return a_; }
    double end() const { return b_; }
    double length() const { return b_ - a_; }
    std::size_t steps() const { return m_; }
    double dt() const { return dt_; }
    std::span<const double> nodes() const { return nodes_; }
    double node(std::size_t j) const { return nodes_[j]; }

    bool operator==(const TimeGrid& other) const {
        return a_ == other.a_ && b_ == other.b_ && m_ == other.m_;
    }

private:
    double a_;
    double b_;
    std::size_t m_;
    double dt_;
    std::vector<double> nodes_;
};

TimeGrid make_grid(double a, double b, std::size_t m);

/// N Brownian paths on a shared grid, stored as increments (row-major,
/// n_paths x m). Path values are prefix sums with B(a) = 0. Immutable;
/// copies share the increment buffer.
class BrownianEnsemble {
public:
    BrownianEnsemble(TimeGrid grid, std::size_t n_paths, std::uint64_t seed,
                     std::vector<double> increments);

    const TimeGrid& grid() const { return grid_; }
    std::size_t n_paths() const { return n_paths_; }
    std::size_t steps() const { return grid_.steps(); }
    std::uint64_t seed() const { return seed_; }

    std::span<const double> increments() const { return *increments_; }
    std::span<const double> increments(std::size_t path) const {
        return std::span<const double>(*increments_).subspan(path * steps(), steps());
    }
    double increment(std::size_t path, std::size_t step) const {
        return (*increments_)[path * steps() + step];
    }

    /// B(t_0), ..., B(t_m) for one path.
    std::vector<double> path_values(std::size_t path) const;
    double path_value(std::size_t path, std::size_t j) const;

private:
    TimeGrid grid_;
    std::size_t n_paths_;
    std::uint64_t seed_;
    std::shared_ptr<const std::vector<double>> increments_;
};

/// Increments are sqrt(dt) * Z with Z drawn from the (path, step) counter of
/// the seed, so the result is identical for any thread count.
BrownianEnsemble sample_brownian(const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed);

/// Splits every step into `factor` sub-steps by Brownian-bridge sampling.
/// The sub-increments of each coarse step sum to the coarse increment, so
/// the coarse path values are preserved up to rounding.
BrownianEnsemble refine_brownian(const BrownianEnsemble& ensemble, std::size_t factor,
                                 std::uint64_t seed);

/// Binary dump: "SIEB", u32 version, f64 a, f64 b, u64 m, u64 n_paths,
/// u64 seed, then row-major f64 increments. Little-endian throughout.
void write_ensemble(std::ostream& out, const BrownianEnsemble& ensemble);
BrownianEnsemble read_ensemble(std::istream& in);

inline constexpr std::uint32_t kEnsembleFormatVersion = 1;

}  // namespace sie
