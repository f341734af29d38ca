#include <CLI11.hpp>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "sie/error.hpp"
#include "sie/parallel.hpp"
#include "sie_cli/commands.hpp"

#ifndef SIE_VERSION
#define SIE_VERSION "unknown"
#endif

namespace sie::cli {

namespace {

using Command = int (*)(const ExperimentConfig&, RunDirectory&, std::ostream&);

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_manifest(RunDirectory& dir, const std::string& command, const ExperimentConfig& config,
                    const std::string& started, int exit_code, const std::string& error) {
    const std::string ini = to_ini(config);
    nlohmann::ordered_json m;
    m["tool"] = "sie";
    m["version"] = SIE_VERSION;
    m["command"] = command;
    m["config_hash"] = "fnv1a64:" + hex64(fnv1a64(ini));
    m["seed"] = config.seed;
    m["seed_h"] = config.effective_seed_h();
    m["threads"] = thread_count();
    m["started_utc"] = started;
    m["finished_utc"] = utc_timestamp();
    m["exit_code"] = exit_code;
    if (!error.empty()) m["error"] = error;
    auto artifacts = nlohmann::ordered_json::array();
    for (const auto& name : dir.artifacts()) {
        const std::string bytes = slurp(dir.path(name));
        artifacts.push_back({{"file", name}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a64(bytes))}});
    }
    m["artifacts"] = artifacts;
    dir.write_text("manifest.json", m.dump(2) + "\n");
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic integral equation toolkit", "sie"};
    app.set_version_flag("--version", SIE_VERSION);
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<unsigned> threads;

    const std::pair<const char*, const char*> commands[] = {
        {"check", "Check the existence and contraction conditions"},
        {"solve", "Picard iteration on a Brownian ensemble"},
        {"gbm", "Strong and moment errors of the GBM ladder"},
        {"fredholm", "Solve the deterministic Fredholm equation"},
        {"isometry", "Monte Carlo check of the Ito isometry"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Override grid.seed");
        sub->add_option("--out", out_dir, "Override output.dir");
        sub->add_option("--threads", threads, "Worker threads (0 = hardware)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? kExitOk : kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const Command fn = command == "check"   ? cmd_check
                       : command == "solve" ? cmd_solve
                       : command == "gbm"   ? cmd_gbm
                       : command == "fredholm" ? cmd_fredholm
                                               : cmd_isometry;

    ExperimentConfig config;
    try {
        config = load_config(config_path);
        apply(config, Overrides{seed, out_dir, threads});
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    set_thread_count(config.threads);
    const std::string started = utc_timestamp();
    std::optional<RunDirectory> dir;
    int code = kExitError;
    std::string error;
    try {
        dir.emplace(config.out_dir);
        dir->write_text("config.ini", to_ini(config));
        code = fn(config, *dir, out);
    } catch (const ConfigError& e) {
        error = std::string("config error: ") + e.what();
        code = kExitConfig;
    } catch (const NumericFailure& e) {
        error = "numeric failure at path " + std::to_string(e.path()) + ", index " + std::to_string(e.index()) +
                ": " + e.what();
        code = kExitNumericFailure;
    } catch (const std::exception& e) {
        error = std::string("error: ") + e.what();
        code = kExitError;
    }
    if (!error.empty()) err << error << "\n";
    if (dir) {
        try {
            write_manifest(*dir, command, config, started, code, error);
        } catch (const std::exception& e) {
            err << "error: manifest: " << e.what() << "\n";
            if (code == kExitOk) code = kExitError;
        }
    }
    return code;
}

}  // namespace sie::cli
