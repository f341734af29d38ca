#include "sie/calculus.hpp"

#include <cmath>
#include <string>

#include "sie/error.hpp"
#include "sie/parallel.hpp"

namespace sie {

AdaptedProcess::AdaptedProcess(TimeGrid grid, std::size_t n_paths)
    : grid_(std::move(grid)), n_paths_(n_paths), values_(n_paths * (grid_.steps() + 1), 0.0) {
    if (n_paths == 0) throw Error(ErrorKind::empty_ensemble, "process needs at least one path");
}

AdaptedProcess::AdaptedProcess(TimeGrid grid, std::size_t n_paths, std::vector<double> values)
    : grid_(std::move(grid)), n_paths_(n_paths), values_(std::move(values)) {
    if (n_paths == 0) throw Error(ErrorKind::empty_ensemble, "process needs at least one path");
    if (values_.size() != n_paths * width())
        throw Error(ErrorKind::shape_mismatch, "process buffer has " + std::to_string(values_.size()) +
                                                   " entries, expected " +
                                                   std::to_string(n_paths * width()));
}

AdaptedProcess AdaptedProcess::constant(const TimeGrid& grid, std::size_t n_paths, double value) {
    return AdaptedProcess(grid, n_paths, std::vector<double>(n_paths * (grid.steps() + 1), value));
}

void AdaptedProcess::require_finite(const char* context) const {
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k])) throw NumericFailure(k / width(), k % width(), context);
    }
}

AdaptedProcess& AdaptedProcess::operator+=(const AdaptedProcess& other) {
    if (!same_shape(other)) throw Error(ErrorKind::shape_mismatch, "adding processes of different shape");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

AdaptedProcess& AdaptedProcess::operator-=(const AdaptedProcess& other) {
    if (!same_shape(other))
        throw Error(ErrorKind::shape_mismatch, "subtracting processes of different shape");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

AdaptedProcess& AdaptedProcess::operator*=(double scale) {
    for (auto& v : values_) v *= scale;
    return *this;
}

AdaptedProcess brownian_process(const BrownianEnsemble& ensemble) {
    AdaptedProcess out(ensemble.grid(), ensemble.n_paths());
    parallel_for(ensemble.n_paths(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto inc = ensemble.increments(p);
            auto row = out.row(p);
            double acc = 0.0;
            row[0] = 0.0;
            for (std::size_t i = 0; i < inc.size(); ++i) {
                acc += inc[i];
                row[i + 1] = acc;
            }
        }
    });
    return out;
}

AdaptedProcess time_process(const TimeGrid& grid, std::size_t n_paths) {
    AdaptedProcess out(grid, n_paths);
    for (std::size_t p = 0; p < n_paths; ++p) {
        auto row = out.row(p);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = grid.node(j);
    }
    return out;
}

double IsometryReport::z_score() const {
    const double diff = std::abs(lhs - rhs);
    if (diff_std_error > 0.0) return diff / diff_std_error;
    return diff == 0.0 ? 0.0 : INFINITY;
}

namespace {

void require_match(const AdaptedProcess& x, const BrownianEnsemble& ensemble, const char* op) {
    if (!x.matches(ensemble))
        throw Error(ErrorKind::shape_mismatch,
                    std::string(op) + ": integrand grid/n_paths differ from the ensemble");
}

// Runs fn(j, column) for every grid index, where column holds transform(X[p][j])
// over all paths. Columns are gathered in blocks to keep row reads contiguous.
template <typename Transform, typename Fn>
void for_each_column(const AdaptedProcess& x, Transform transform, Fn fn) {
    constexpr std::size_t kBlock = 16;
    const std::size_t width = x.width();
    const std::size_t n = x.n_paths();
    const std::size_t blocks = (width + kBlock - 1) / kBlock;
    parallel_for(blocks, [&](std::size_t begin, std::size_t end) {
        std::vector<double> buf(kBlock * n);
        for (std::size_t blk = begin; blk < end; ++blk) {
            const std::size_t j0 = blk * kBlock;
            const std::size_t cols = std::min(kBlock, width - j0);
            for (std::size_t p = 0; p < n; ++p) {
                const double* row = x.row(p).data() + j0;
                for (std::size_t c = 0; c < cols; ++c) buf[c * n + p] = transform(row[c]);
            }
            for (std::size_t c = 0; c < cols; ++c)
                fn(j0 + c, std::span<const double>(buf.data() + c * n, n));
        }
    });
}

NormEstimate norm_from_squares(const SampleMoments& sq) {
    NormEstimate est;
    est.n_paths = sq.count;
    est.value = std::sqrt(std::max(sq.mean, 0.0));
    est.std_error = est.value > 0.0 ? sq.std_error() / (2.0 * est.value) : 0.0;
    return est;
}

std::vector<SampleMoments> column_square_moments(const AdaptedProcess& x) {
    std::vector<SampleMoments> out(x.width());
    for_each_column(x, [](double v) { return v * v; },
                    [&](std::size_t j, std::span<const double> col) { out[j] = sample_moments(col); });
    return out;
}

}  // namespace

AdaptedProcess ito_integral(const AdaptedProcess& integrand, const BrownianEnsemble& ensemble) {
    require_match(integrand, ensemble, "ito_integral");
    AdaptedProcess out(integrand.grid(), integrand.n_paths());
    parallel_for(integrand.n_paths(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto f = integrand.row(p);
            const auto dB = ensemble.increments(p);
            auto row = out.row(p);
            double acc = 0.0;
            row[0] = 0.0;
            for (std::size_t i = 0; i < dB.size(); ++i) {
                acc += f[i] * dB[i];
                row[i + 1] = acc;
            }
        }
    });
    return out;
}

AdaptedProcess lebesgue_integral(const AdaptedProcess& integrand, const TimeGrid& grid) {
    if (!(integrand.grid() == grid))
        throw Error(ErrorKind::shape_mismatch, "lebesgue_integral: integrand lives on another grid");
    const double dt = grid.dt();
    AdaptedProcess out(grid, integrand.n_paths());
    parallel_for(integrand.n_paths(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto f = integrand.row(p);
            auto row = out.row(p);
            double acc = 0.0;
            row[0] = 0.0;
            for (std::size_t i = 0; i < grid.steps(); ++i) {
                acc += f[i];
                row[i + 1] = acc * dt;
            }
        }
    });
    return out;
}

NormEstimate l2_norm_at(const AdaptedProcess& process, std::size_t j) {
    if (j > process.steps())
        throw Error(ErrorKind::invalid_argument, "grid index " + std::to_string(j) + " out of range");
    std::vector<double> sq(process.n_paths());
    for (std::size_t p = 0; p < sq.size(); ++p) {
        const double v = process.at(p, j);
        sq[p] = v * v;
    }
    return norm_from_squares(sample_moments(sq));
}

NormEstimate sup_l2_norm(const AdaptedProcess& process) {
    const auto cols = column_square_moments(process);
    std::size_t best = 0;
    for (std::size_t j = 1; j < cols.size(); ++j)
        if (cols[j].mean > cols[best].mean) best = j;
    return norm_from_squares(cols[best]);
}

NormEstimate l2ad_norm(const AdaptedProcess& process) {
    const double dt = process.grid().dt();
    const std::size_t m = process.steps();
    std::vector<double> per_path(process.n_paths());
    parallel_for(per_path.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto row = process.row(p);
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += row[j] * row[j];
            per_path[p] = acc * dt;
        }
    });
    const auto mom = sample_moments(per_path);
    return NormEstimate{mom.mean, mom.std_error(), mom.count};
}

IsometryReport isometry_check(const AdaptedProcess& integrand, const BrownianEnsemble& ensemble,
                              double tolerance) {
    require_match(integrand, ensemble, "isometry_check");
    if (!(tolerance > 0.0)) throw Error(ErrorKind::invalid_argument, "tolerance must be positive");
    const double dt = ensemble.grid().dt();
    const std::size_t n = integrand.n_paths();
    std::vector<double> lhs(n), rhs(n), diff(n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto f = integrand.row(p);
            const auto dB = ensemble.increments(p);
            double ito = 0.0;
            double energy = 0.0;
            for (std::size_t i = 0; i < dB.size(); ++i) {
                ito += f[i] * dB[i];
                energy += f[i] * f[i];
            }
            lhs[p] = ito * ito;
            rhs[p] = energy * dt;
            diff[p] = lhs[p] - rhs[p];
        }
    });
    IsometryReport rep;
    rep.tolerance = tolerance;
    rep.lhs = deterministic_sum(lhs) / static_cast<double>(n);
    rep.rhs = deterministic_sum(rhs) / static_cast<double>(n);
    rep.diff_std_error = sample_moments(diff).std_error();
    const double gap = std::abs(rep.lhs - rep.rhs);
    const double scale = std::max(std::abs(rep.rhs), kIsometryFloor);
    rep.rel_error = gap / scale;
    rep.pass = gap <= tolerance * scale;
    return rep;
}

ColumnMoments column_moments(const AdaptedProcess& process) {
    ColumnMoments out;
    out.mean.resize(process.width());
    out.std_error.resize(process.width());
    for_each_column(process, [](double v) { return v; },
                    [&](std::size_t j, std::span<const double> col) {
                        const auto m = sample_moments(col);
                        out.mean[j] = m.mean;
                        out.std_error[j] = m.std_error();
                    });
    return out;
}

std::vector<double> column_mean_squares(const AdaptedProcess& process) {
    const auto cols = column_square_moments(process);
    std::vector<double> out(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) out[j] = cols[j].mean;
    return out;
}

}  // namespace sie
