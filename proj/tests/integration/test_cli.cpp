#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sie_cli/commands.hpp"
#include "sie_cli/config.hpp"

namespace fs = std::filesystem;
using namespace sie::cli;

namespace {

fs::path tmp_root() {
    const char* env = std::getenv("SIE_TEST_TMP");
    const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "sie_cli_test";
    fs::create_directories(root);
    return root;
}

fs::path write_config(const std::string& name, const std::string& text) {
    const fs::path p = tmp_root() / (name + ".ini");
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "sie");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

Run run_command(const std::string& command, const std::string& name, const std::string& ini) {
    const fs::path cfg = write_config(name, ini);
    const fs::path out = tmp_root() / name;
    fs::remove_all(out);
    return run({command, "--config", cfg.string(), "--out", out.string()});
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

const std::string kGbm = R"([problem]
type = sie
h = constant:1
drift = linear:const:0.05
diffusion = linear:const:0.2

[grid]
m = 32
n_paths = 500
seed = 5

[checks]
run = schauder, banach
)";

}  // namespace

TEST_CASE("check passes on the GBM problem") {
    const auto r = run_command("check", "check_gbm", kGbm);
    CHECK(r.code == kExitOk);
    const fs::path out = tmp_root() / "check_gbm";
    const auto csv = slurp(out / "conditions.csv");
    CHECK(csv.find("banach_sie,pass") != std::string::npos);
    const auto text = slurp(out / "conditions.txt");
    CHECK(text.find("min_radius_status = found") != std::string::npos);
    CHECK(fs::exists(out / "config.ini"));
    CHECK(fs::exists(out / "manifest.json"));
}

TEST_CASE("failing contraction check exits 3") {
    const auto r = run_command("check", "check_fail", R"([problem]
type = sie
h = constant:1
drift = linear:const:0.5
diffusion = linear:const:0.5
[checks]
run = banach
)");
    CHECK(r.code == kExitCheckFail);
    CHECK(r.out.find("fail") != std::string::npos);
}

TEST_CASE("sampled bounds without heuristics are unavailable") {
    const auto r = run_command("check", "check_unavailable", kGbm + R"(bounds = sampled
allow_heuristic = false
bound_samples = 1000
)");
    CHECK(r.code == kExitUnavailable);

    const auto h = run_command("check", "check_heuristic", kGbm + R"(bounds = sampled
allow_heuristic = true
bound_samples = 1000
)");
    CHECK(h.code == kExitOk);
    CHECK(slurp(tmp_root() / "check_heuristic" / "conditions.csv").find("pass_heuristic") != std::string::npos);
}

TEST_CASE("config errors exit 2 and name the key") {
    const auto bad_coef = run_command("check", "bad_coef", R"([problem]
type = sie
drift = cubic:1
diffusion = constant:1
)");
    CHECK(bad_coef.code == kExitConfig);
    CHECK(bad_coef.err.find("problem.drift") != std::string::npos);

    const auto unknown_key = run_command("check", "bad_key", "[grid]\nsteps = 10\n");
    CHECK(unknown_key.code == kExitConfig);
    CHECK(unknown_key.err.find("grid.steps") != std::string::npos);

    const auto unknown_section = run_command("check", "bad_section", "[solverx]\ntol = 1\n");
    CHECK(unknown_section.code == kExitConfig);
    CHECK(unknown_section.err.find("solverx") != std::string::npos);

    const auto bad_number = run_command("check", "bad_number", "[grid]\nm = ten\n");
    CHECK(bad_number.code == kExitConfig);
    CHECK(bad_number.err.find("grid.m") != std::string::npos);

    const auto fredholm_radius = run_command("check", "fredholm_radius", R"([problem]
type = fredholm
kernel = affine:(poly:0,1):(poly:0,1):0.25
[checks]
run = schauder
)");
    CHECK(fredholm_radius.code == kExitConfig);
    CHECK(fredholm_radius.err.find("checks.radius") != std::string::npos);
}

TEST_CASE("command-line errors exit 2") {
    CHECK(run({}).code == kExitConfig);
    CHECK(run({"solve"}).code == kExitConfig);
    CHECK(run({"solve", "--config", (tmp_root() / "missing.ini").string()}).code == kExitConfig);
    CHECK(run({"frobnicate"}).code == kExitConfig);
}

TEST_CASE("divergent solve exits 5 with the full history") {
    const auto r = run_command("solve", "divergent", R"([problem]
type = sie
h = constant:1
drift = linear:const:2
diffusion = linear:const:2
[grid]
m = 32
n_paths = 500
[solver]
tol = 1e-12
max_iter = 20
)");
    CHECK(r.code == kExitNotConverged);
    const auto history = slurp(tmp_root() / "divergent" / "history.csv");
    CHECK(count_lines(history) == 21);
    CHECK(history.rfind("iter,update_norm,residual,elapsed_ms\n", 0) == 0);
}

TEST_CASE("overflow exits 6 and reports the location") {
    const auto r = run_command("solve", "overflow", R"([problem]
type = sie
h = constant:1e300
drift = linear:const:1e300
diffusion = constant:0
[grid]
m = 4
n_paths = 4
[checks]
run = banach
)");
    CHECK(r.code == kExitNumericFailure);
    CHECK(r.err.find("numeric failure at path 0, index 1") != std::string::npos);
    const auto manifest = nlohmann::json::parse(slurp(tmp_root() / "overflow" / "manifest.json"));
    CHECK(manifest["exit_code"] == kExitNumericFailure);
    CHECK(manifest.contains("error"));
}

TEST_CASE("solve writes its tables and a manifest") {
    const auto r = run_command("solve", "solve_gbm", kGbm);
    CHECK(r.code == kExitOk);
    const fs::path out = tmp_root() / "solve_gbm";
    for (const char* f : {"history.csv", "moments.csv", "solve_summary.csv", "conditions.csv", "config.ini"})
        CHECK(fs::exists(out / f));
    CHECK(count_lines(slurp(out / "moments.csv")) == 34);

    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["tool"] == "sie");
    CHECK(manifest["command"] == "solve");
    CHECK(manifest["seed"] == 5);
    CHECK(manifest["exit_code"] == 0);
    const auto ini = slurp(out / "config.ini");
    CHECK(manifest["config_hash"] == "fnv1a64:" + hex64(fnv1a64(ini)));
    bool found = false;
    for (const auto& a : manifest["artifacts"]) {
        const auto bytes = slurp(out / a["file"].get<std::string>());
        CHECK(a["bytes"] == bytes.size());
        CHECK(a["fnv1a64"] == hex64(fnv1a64(bytes)));
        found = found || a["file"] == "history.csv";
    }
    CHECK(found);
}

TEST_CASE("seed and output overrides") {
    const fs::path cfg = write_config("override", kGbm);
    const fs::path out = tmp_root() / "override_out";
    fs::remove_all(out);
    const auto r = run({"solve", "--config", cfg.string(), "--out", out.string(), "--seed", "99", "--threads", "2"});
    CHECK(r.code == kExitOk);
    const auto written = parse_config(slurp(out / "config.ini"));
    CHECK(written.seed == 99);
    CHECK(written.out_dir == out.string());
    CHECK(written.threads == 2u);
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["seed"] == 99);
    CHECK(manifest["threads"] == 2);
}

TEST_CASE("config round trip") {
    const auto c = parse_config(kGbm + "[solver]\ntol = 1e-7\ntheta = 0.5\ninitial = zero\n[run]\nthreads = 3\n");
    CHECK(c.tol == 1e-7);
    CHECK(c.theta == 0.5);
    CHECK(parse_config(to_ini(c)) == c);
    CHECK(to_ini(parse_config(to_ini(c))) == to_ini(c));

    const auto fredholm = parse_config("[problem]\ntype = fredholm\nkernel = sine:(const:1):(poly:0,1)\n");
    CHECK(parse_config(to_ini(fredholm)) == fredholm);
}

TEST_CASE("fredholm command") {
    const auto r = run_command("fredholm", "fredholm", R"([problem]
type = fredholm
kernel = affine:(poly:0,1):(poly:0,1):0.25
[grid]
n_quad = 64
[solver]
tol = 1e-13
max_iter = 100
[checks]
run = schauder, banach
radius = 2
)");
    CHECK(r.code == kExitOk);
    const auto out = tmp_root() / "fredholm";
    CHECK(count_lines(slurp(out / "solution.csv")) == 66);
    CHECK(slurp(out / "fredholm_summary.csv").find(",true,") != std::string::npos);
}

TEST_CASE("isometry command") {
    const auto r = run_command("isometry", "isometry", R"([grid]
m = 50
n_paths = 20000
[isometry]
integrands = one, t, B
tolerance = 0.05
)");
    CHECK(r.code == kExitOk);
    CHECK(count_lines(slurp(tmp_root() / "isometry" / "isometry.csv")) == 4);
}

TEST_CASE("gbm command") {
    const auto r = run_command("gbm", "gbm", kGbm + "[gbm]\nmin_level = 3\nmax_level = 5\n");
    CHECK(r.code == kExitOk);
    const auto out = tmp_root() / "gbm";
    CHECK(count_lines(slurp(out / "strong_error.csv")) == 4);
    CHECK(count_lines(slurp(out / "moment_error.csv")) == 4);

    const auto bad = run_command("gbm", "gbm_bad", R"([problem]
type = sie
drift = constant:1
diffusion = linear:const:0.2
)");
    CHECK(bad.code == kExitConfig);
    CHECK(bad.err.find("problem.drift") != std::string::npos);
}

TEST_CASE("installed binary exit codes") {
    const fs::path cfg = write_config("binary_fail", R"([problem]
type = sie
h = constant:1
drift = linear:const:0.5
diffusion = linear:const:0.5
[checks]
run = banach
)");
    const std::string cmd = std::string(SIE_CLI_PATH) + " check --config " + cfg.string() + " --out " +
                            (tmp_root() / "binary_fail").string() + " > /dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == kExitCheckFail);
    const int version = std::system((std::string(SIE_CLI_PATH) + " --version > /dev/null").c_str());
    CHECK(WEXITSTATUS(version) == 0);
}
