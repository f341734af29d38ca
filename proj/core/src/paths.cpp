#include "sie/paths.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "sie/error.hpp"
#include "sie/parallel.hpp"
#include "sie/rng.hpp"

namespace sie {

TimeGrid::TimeGrid(double a, double b, std::size_t steps) : a_(a), b_(b), m_(steps) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw Error(ErrorKind::invalid_interval,
                    "need finite a < b, got [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    if (steps == 0) throw Error(ErrorKind::invalid_steps, "grid needs at least one step");
    dt_ = (b - a) / static_cast<double>(steps);
    nodes_.resize(steps + 1);
    for (std::size_t j = 0; j < steps; ++j) nodes_[j] = a + static_cast<double>(j) * dt_;
    nodes_[steps] = b;
}

TimeGrid make_grid(double a, double b, std::size_t m) { return TimeGrid(a, b, m); }

BrownianEnsemble::BrownianEnsemble(TimeGrid grid, std::size_t n_paths, std::uint64_t seed,
                                   std::vector<double> increments)
    : grid_(std::move(grid)), n_paths_(n_paths), seed_(seed) {
    if (n_paths == 0) throw Error(ErrorKind::empty_ensemble, "ensemble needs at least one path");
    if (n_paths > std::numeric_limits<std::uint32_t>::max())
        throw Error(ErrorKind::invalid_argument, "n_paths exceeds the 32-bit stream space");
    if (increments.size() != n_paths * grid_.steps())
        throw Error(ErrorKind::shape_mismatch, "increment buffer has " +
                                                   std::to_string(increments.size()) +
                                                   " entries, expected " +
                                                   std::to_string(n_paths * grid_.steps()));
    increments_ = std::make_shared<const std::vector<double>>(std::move(increments));
}

std::vector<double> BrownianEnsemble::path_values(std::size_t path) const {
    std::vector<double> out(steps() + 1);
    const auto inc = increments(path);
    double acc = 0.0;
    out[0] = 0.0;
    for (std::size_t i = 0; i < inc.size(); ++i) {
        acc += inc[i];
        out[i + 1] = acc;
    }
    return out;
}

double BrownianEnsemble::path_value(std::size_t path, std::size_t j) const {
    const auto inc = increments(path);
    double acc = 0.0;
    for (std::size_t i = 0; i < j; ++i) acc += inc[i];
    return acc;
}

BrownianEnsemble sample_brownian(const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed) {
    if (n_paths == 0) throw Error(ErrorKind::empty_ensemble, "ensemble needs at least one path");
    if (n_paths > std::numeric_limits<std::uint32_t>::max())
        throw Error(ErrorKind::invalid_argument, "n_paths exceeds the 32-bit stream space");
    const std::size_t m = grid.steps();
    const double scale = std::sqrt(grid.dt());
    std::vector<double> inc(n_paths * m);
    const CounterRng rng(seed, RngDomain::brownian);
    parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            double* row = inc.data() + p * m;
            const auto stream = static_cast<std::uint32_t>(p);
            for (std::size_t i = 0; i < m; i += 2) {
                const auto z = rng.normal_pair(stream, i / 2);
                row[i] = scale * z[0];
                if (i + 1 < m) row[i + 1] = scale * z[1];
            }
        }
    });
    return BrownianEnsemble(grid, n_paths, seed, std::move(inc));
}

BrownianEnsemble refine_brownian(const BrownianEnsemble& ensemble, std::size_t factor,
                                 std::uint64_t seed) {
    if (factor < 2) throw Error(ErrorKind::invalid_argument, "refinement factor must be >= 2");
    const TimeGrid& coarse = ensemble.grid();
    const std::size_t m = coarse.steps();
    const TimeGrid fine(coarse.start(), coarse.end(), m * factor);
    const std::size_t fm = fine.steps();
    const double delta = coarse.dt();
    const double sub = delta / static_cast<double>(factor);
    const std::size_t draws_per_step = factor - 1;

    std::vector<double> inc(ensemble.n_paths() * fm);
    const CounterRng rng(seed, RngDomain::bridge);
    parallel_for(ensemble.n_paths(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto coarse_row = ensemble.increments(p);
            double* row = inc.data() + p * fm;
            const auto stream = static_cast<std::uint32_t>(p);
            for (std::size_t i = 0; i < m; ++i) {
                // Sequential bridge: each sub-increment is drawn conditionally on
                // the remaining displacement over the remaining time.
                double remaining = coarse_row[i];
                double remaining_time = delta;
                for (std::size_t k = 0; k < draws_per_step; ++k) {
                    const double mean = remaining * sub / remaining_time;
                    const double var = sub * (remaining_time - sub) / remaining_time;
                    const double z = rng.normal(stream, i * draws_per_step + k);
                    const double x = mean + std::sqrt(std::max(var, 0.0)) * z;
                    row[i * factor + k] = x;
                    remaining -= x;
                    remaining_time -= sub;
                }
                row[i * factor + draws_per_step] = remaining;
            }
        }
    });
    return BrownianEnsemble(fine, ensemble.n_paths(), seed, std::move(inc));
}

namespace {

constexpr char kMagic[4] = {'S', 'I', 'E', 'B'};

void put_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out.write(buf, 8);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out.write(buf, 4);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
    unsigned char buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8))
        throw Error(ErrorKind::format_error, "truncated ensemble file");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw Error(ErrorKind::format_error, "truncated ensemble file");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void write_ensemble(std::ostream& out, const BrownianEnsemble& ensemble) {
    out.write(kMagic, 4);
    put_u32(out, kEnsembleFormatVersion);
    put_f64(out, ensemble.grid().start());
    put_f64(out, ensemble.grid().end());
    put_u64(out, ensemble.steps());
    put_u64(out, ensemble.n_paths());
    put_u64(out, ensemble.seed());
    for (double v : ensemble.increments()) put_f64(out, v);
    if (!out) throw Error(ErrorKind::format_error, "failed writing ensemble");
}

BrownianEnsemble read_ensemble(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::string(magic, 4) != std::string(kMagic, 4))
        throw Error(ErrorKind::format_error, "missing SIEB magic");
    const std::uint32_t version = get_u32(in);
    if (version != kEnsembleFormatVersion)
        throw Error(ErrorKind::format_error, "unsupported ensemble version " + std::to_string(version));
    const double a = get_f64(in);
    const double b = get_f64(in);
    const std::uint64_t m = get_u64(in);
    const std::uint64_t n = get_u64(in);
    const std::uint64_t seed = get_u64(in);
    TimeGrid grid(a, b, m);
    if (n == 0 || n > std::numeric_limits<std::uint32_t>::max() ||
        m > std::numeric_limits<std::uint64_t>::max() / n)
        throw Error(ErrorKind::format_error, "implausible ensemble shape");
    std::vector<double> inc(n * m);
    for (auto& v : inc) v = get_f64(in);
    return BrownianEnsemble(std::move(grid), n, seed, std::move(inc));
}

}  // namespace sie
