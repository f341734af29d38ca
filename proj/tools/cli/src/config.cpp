#include "sie_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sie/error.hpp"

namespace sie::cli {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"problem", {"type", "a", "b", "h", "drift", "diffusion", "lambda", "kernel"}},
        {"grid", {"m", "n_paths", "seed", "n_quad"}},
        {"solver", {"tol", "max_iter", "theta", "initial", "seed_h"}},
        {"checks", {"run", "radius", "bounds", "allow_heuristic", "bound_samples", "bound_seed"}},
        {"gbm", {"min_level", "max_level"}},
        {"isometry", {"integrands", "tolerance"}},
        {"output", {"dir"}},
        {"run", {"threads"}},
    };
    return keys;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& why) {
    throw ConfigError(key + ": " + why + " (got '" + value + "')");
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out))
        bad_value(key, v, "expected a finite number");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size())
        bad_value(key, v, "expected a non-negative integer");
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    bad_value(key, v, "expected true or false");
}

std::vector<std::string> to_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
    return out;
}

std::string num(double v) { return descriptor::format_number(v); }

template <typename Fn>
void validated(const std::string& key, const std::string& text, Fn parse) {
    try {
        parse(text);
    } catch (const Error& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

void validate(const ExperimentConfig& c) {
    if (!(c.a < c.b)) throw ConfigError("problem.a, problem.b: need a < b");
    validated("problem.h", c.h, parse_initial_law);
    validated("problem.drift", c.drift, parse_coefficient);
    validated("problem.diffusion", c.diffusion, parse_coefficient);
    validated("problem.kernel", c.kernel, parse_kernel);
    if (c.m == 0) throw ConfigError("grid.m: must be >= 1");
    if (c.n_paths == 0) throw ConfigError("grid.n_paths: must be >= 1");
    if (c.n_quad == 0) throw ConfigError("grid.n_quad: must be >= 1");
    if (!(c.tol > 0.0)) throw ConfigError("solver.tol: must be positive");
    if (c.max_iter == 0) throw ConfigError("solver.max_iter: must be >= 1");
    if (!(c.theta > 0.0 && c.theta <= 1.0)) throw ConfigError("solver.theta: must lie in (0, 1]");
    for (const auto& name : c.checks)
        if (name != "schauder" && name != "banach")
            throw ConfigError("checks.run: unknown check '" + name + "' (known: schauder, banach)");
    if (c.radius && !(*c.radius > 0.0)) throw ConfigError("checks.radius: must be positive");
    if (c.bound_samples == 0) throw ConfigError("checks.bound_samples: must be >= 1");
    if (c.min_level > c.max_level || c.max_level > 24)
        throw ConfigError("gbm.min_level, gbm.max_level: need min_level <= max_level <= 24");
    if (c.max_level - c.min_level < 1) throw ConfigError("gbm: the ladder needs at least two levels");
    for (const auto& name : c.integrands)
        if (name != "one" && name != "t" && name != "B")
            throw ConfigError("isometry.integrands: unknown integrand '" + name + "' (known: one, t, B)");
    if (!(c.iso_tolerance > 0.0)) throw ConfigError("isometry.tolerance: must be positive");
    if (c.out_dir.empty()) throw ConfigError("output.dir: must not be empty");
}

}  // namespace

const char* to_string(ProblemType t) { return t == ProblemType::sie ? "sie" : "fredholm"; }

ExperimentConfig parse_config(std::string_view text) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.message() + " at line " + std::to_string(e.line()));
    }

    ExperimentConfig c;
    for (const auto& [section, body] : tree) {
        const auto it = schema().find(section);
        if (it == schema().end()) throw ConfigError(section + ": unknown section or key outside a section");
        if (!body.data().empty()) throw ConfigError(section + ": key outside a section");
        for (const auto& [name, node] : body) {
            const std::string key = section + "." + name;
            if (!it->second.count(name)) throw ConfigError(key + ": unknown key");
            const std::string v = trim(node.data());

            if (key == "problem.type") {
                if (v == "sie") c.type = ProblemType::sie;
                else if (v == "fredholm") c.type = ProblemType::fredholm;
                else bad_value(key, v, "expected sie or fredholm");
            } else if (key == "problem.a") c.a = to_double(key, v);
            else if (key == "problem.b") c.b = to_double(key, v);
            else if (key == "problem.h") c.h = v;
            else if (key == "problem.drift") c.drift = v;
            else if (key == "problem.diffusion") c.diffusion = v;
            else if (key == "problem.lambda") c.lambda = to_double(key, v);
            else if (key == "problem.kernel") c.kernel = v;
            else if (key == "grid.m") c.m = to_u64(key, v);
            else if (key == "grid.n_paths") c.n_paths = to_u64(key, v);
            else if (key == "grid.seed") c.seed = to_u64(key, v);
            else if (key == "grid.n_quad") c.n_quad = to_u64(key, v);
            else if (key == "solver.tol") c.tol = to_double(key, v);
            else if (key == "solver.max_iter") c.max_iter = to_u64(key, v);
            else if (key == "solver.theta") c.theta = to_double(key, v);
            else if (key == "solver.initial") {
                if (v == "zero") c.initial = InitialIterate::zero;
                else if (v == "h_constant") c.initial = InitialIterate::h_constant;
                else bad_value(key, v, "expected zero or h_constant");
            } else if (key == "solver.seed_h") c.seed_h = to_u64(key, v);
            else if (key == "checks.run") c.checks = to_list(v);
            else if (key == "checks.radius") c.radius = to_double(key, v);
            else if (key == "checks.bounds") {
                if (v == "analytic") c.bounds = BoundSource::analytic;
                else if (v == "sampled") c.bounds = BoundSource::sampled;
                else bad_value(key, v, "expected analytic or sampled");
            } else if (key == "checks.allow_heuristic") c.allow_heuristic = to_bool(key, v);
            else if (key == "checks.bound_samples") c.bound_samples = to_u64(key, v);
            else if (key == "checks.bound_seed") c.bound_seed = to_u64(key, v);
            else if (key == "gbm.min_level") c.min_level = static_cast<unsigned>(to_u64(key, v));
            else if (key == "gbm.max_level") c.max_level = static_cast<unsigned>(to_u64(key, v));
            else if (key == "isometry.integrands") c.integrands = to_list(v);
            else if (key == "isometry.tolerance") c.iso_tolerance = to_double(key, v);
            else if (key == "output.dir") c.out_dir = v;
            else if (key == "run.threads") c.threads = static_cast<unsigned>(to_u64(key, v));
        }
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string to_ini(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "[problem]\n"
      << "type = " << to_string(c.type) << "\n"
      << "a = " << num(c.a) << "\n"
      << "b = " << num(c.b) << "\n"
      << "h = " << c.h << "\n"
      << "drift = " << c.drift << "\n"
      << "diffusion = " << c.diffusion << "\n"
      << "lambda = " << num(c.lambda) << "\n"
      << "kernel = " << c.kernel << "\n\n";
    o << "[grid]\n"
      << "m = " << c.m << "\n"
      << "n_paths = " << c.n_paths << "\n"
      << "seed = " << c.seed << "\n"
      << "n_quad = " << c.n_quad << "\n\n";
    o << "[solver]\n"
      << "tol = " << num(c.tol) << "\n"
      << "max_iter = " << c.max_iter << "\n"
      << "theta = " << num(c.theta) << "\n"
      << "initial = " << (c.initial == InitialIterate::zero ? "zero" : "h_constant") << "\n";
    if (c.seed_h) o << "seed_h = " << *c.seed_h << "\n";
    o << "\n[checks]\n"
      << "run = " << join(c.checks) << "\n";
    if (c.radius) o << "radius = " << num(*c.radius) << "\n";
    o << "bounds = " << (c.bounds == BoundSource::analytic ? "analytic" : "sampled") << "\n"
      << "allow_heuristic = " << (c.allow_heuristic ? "true" : "false") << "\n"
      << "bound_samples = " << c.bound_samples << "\n"
      << "bound_seed = " << c.bound_seed << "\n\n";
    o << "[gbm]\n"
      << "min_level = " << c.min_level << "\n"
      << "max_level = " << c.max_level << "\n\n";
    o << "[isometry]\n"
      << "integrands = " << join(c.integrands) << "\n"
      << "tolerance = " << num(c.iso_tolerance) << "\n\n";
    o << "[output]\n"
      << "dir = " << c.out_dir << "\n\n";
    o << "[run]\n"
      << "threads = " << c.threads << "\n";
    return o.str();
}

SieProblem ExperimentConfig::sie_problem() const {
    return SieProblem{a, b, parse_initial_law(h), parse_coefficient(drift), parse_coefficient(diffusion)};
}

FredholmProblem ExperimentConfig::fredholm_problem() const {
    return FredholmProblem{a, b, lambda, parse_kernel(kernel)};
}

PicardOptions ExperimentConfig::picard_options() const {
    PicardOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    o.initial = initial;
    o.seed_h = effective_seed_h();
    o.theta = theta;
    o.ball_radius = radius;
    return o;
}

BoundPolicy ExperimentConfig::bound_policy() const {
    return BoundPolicy{bounds, allow_heuristic, bound_samples, bound_seed};
}

}  // namespace sie::cli
