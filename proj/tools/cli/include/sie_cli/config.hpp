#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sie/conditions.hpp"
#include "sie/fredholm.hpp"
#include "sie/picard.hpp"

namespace sie::cli {

/// Bad config text, unknown key or invalid value. The message names the key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ProblemType { sie, fredholm };

/// Everything a run depends on. Descriptor strings are kept verbatim so the
/// file round-trips; they are validated on load.
struct ExperimentConfig {
    // [problem]
    ProblemType type = ProblemType::sie;
    double a = 0.0;
    double b = 1.0;
    std::string h = "constant:1";
    std::string drift = "constant:0";
    std::string diffusion = "constant:0";
    double lambda = 1.0;
    std::string kernel = "separable:(const:1):(const:1)";

    // [grid]
    std::size_t m = 256;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    std::size_t n_quad = 256;

    // [solver]
    double tol = 1e-6;
    std::size_t max_iter = 50;
    double theta = 1.0;
    InitialIterate initial = InitialIterate::h_constant;
    std::optional<std::uint64_t> seed_h;  ///< defaults to grid.seed

    // [checks]
    std::vector<std::string> checks = {"schauder", "banach"};
    std::optional<double> radius;
    BoundSource bounds = BoundSource::analytic;
    bool allow_heuristic = false;
    std::size_t bound_samples = 100000;
    std::uint64_t bound_seed = 0;

    // [gbm]
    unsigned min_level = 4;
    unsigned max_level = 8;

    // [isometry]
    std::vector<std::string> integrands = {"one", "t", "B"};
    double iso_tolerance = 0.05;

    // [output]
    std::string out_dir = "sie_out";

    // [run]
    unsigned threads = 0;  ///< 0 = hardware default

    bool operator==(const ExperimentConfig&) const = default;

    std::uint64_t effective_seed_h() const { return seed_h.value_or(seed); }
    SieProblem sie_problem() const;
    FredholmProblem fredholm_problem() const;
    PicardOptions picard_options() const;
    BoundPolicy bound_policy() const;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical INI text; parse_config(to_ini(c)) == c.
std::string to_ini(const ExperimentConfig& config);

const char* to_string(ProblemType t);

}  // namespace sie::cli
