#include "sie_cli/commands.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "sie/calculus.hpp"
#include "sie/error.hpp"
#include "sie/parallel.hpp"
#include "sie/paths.hpp"

namespace sie::cli {

namespace {

std::string u64(std::uint64_t v) { return std::to_string(v); }
std::string flag(bool v) { return v ? "true" : "false"; }
std::string flag(std::optional<bool> v) { return v ? flag(*v) : std::string(); }

const char* status_name(RadiusSearch::Status s) {
    switch (s) {
        case RadiusSearch::Status::found: return "found";
        case RadiusSearch::Status::infeasible: return "infeasible";
        case RadiusSearch::Status::unavailable: return "unavailable";
    }
    return "unknown";
}

void write_conditions(const CheckOutcome& outcome, RunDirectory& dir) {
    std::string csv = condition_csv_header() + "\n";
    std::string text;
    for (const auto& rep : outcome.reports) {
        csv += to_csv_row(rep) + "\n";
        if (!text.empty()) text += "\n";
        text += to_text(rep);
    }
    if (outcome.min_radius) {
        if (!text.empty()) text += "\n";
        text += "min_radius_status = " + std::string(status_name(outcome.min_radius->status)) + "\n";
        if (outcome.min_radius->status == RadiusSearch::Status::found)
            text += "min_radius = " + fmt17(outcome.min_radius->radius) + "\n";
    }
    dir.write_text("conditions.csv", csv);
    dir.write_text("conditions.txt", text);
}

void log_verdicts(const CheckOutcome& outcome, std::ostream& log) {
    for (const auto& rep : outcome.reports) {
        log << to_string(rep.theorem) << ": " << to_string(rep.verdict);
        if (const auto k = rep.value("k")) log << " (k = " << fmt17(*k) << ")";
        if (rep.verdict != Verdict::pass) log << " - " << rep.message;
        log << "\n";
    }
}

BrownianEnsemble ensemble_for(const ExperimentConfig& c) {
    return sample_brownian(make_grid(c.a, c.b, c.m), c.n_paths, c.seed);
}

}  // namespace

void apply(ExperimentConfig& config, const Overrides& o) {
    if (o.seed) config.seed = *o.seed;
    if (o.out_dir) config.out_dir = *o.out_dir;
    if (o.threads) config.threads = *o.threads;
}

CheckOutcome run_checks(const ExperimentConfig& config, bool require_radius) {
    CheckOutcome out;
    if (config.type == ProblemType::sie) {
        const auto problem = config.sie_problem();
        out.min_radius = min_radius(problem);
        for (const auto& name : config.checks) {
            if (name == "schauder") {
                double r = kMaxRadius;
                if (config.radius) r = *config.radius;
                else if (out.min_radius->status == RadiusSearch::Status::found)
                    r = std::max(out.min_radius->radius, kRadiusTolerance);
                out.reports.push_back(check_schauder(problem, r, config.bound_policy()));
            } else {
                out.reports.push_back(check_banach(problem, config.bound_policy()));
            }
        }
    } else {
        const auto problem = config.fredholm_problem();
        for (const auto& name : config.checks) {
            if (name == "schauder") {
                if (!config.radius) {
                    if (require_radius)
                        throw ConfigError("checks.radius: required for the schauder check on a fredholm problem");
                    continue;
                }
                out.reports.push_back(check_fredholm_schauder(problem, *config.radius));
            } else {
                out.reports.push_back(check_fredholm_banach(problem));
            }
        }
    }
    return out;
}

int exit_code_for(const std::vector<ConditionReport>& reports) {
    bool unavailable = false;
    for (const auto& rep : reports) {
        if (rep.verdict == Verdict::fail) return kExitCheckFail;
        if (rep.verdict == Verdict::unavailable) unavailable = true;
    }
    return unavailable ? kExitUnavailable : kExitOk;
}

int cmd_check(const ExperimentConfig& config, RunDirectory& dir, std::ostream& log) {
    const auto outcome = run_checks(config, true);
    write_conditions(outcome, dir);
    log_verdicts(outcome, log);
    return exit_code_for(outcome.reports);
}

int cmd_solve(const ExperimentConfig& config, RunDirectory& dir, std::ostream& log) {
    if (config.type != ProblemType::sie) throw ConfigError("problem.type: solve needs an sie problem");
    if (!config.checks.empty()) {
        const auto outcome = run_checks(config, false);
        write_conditions(outcome, dir);
        log_verdicts(outcome, log);
    }

    const auto problem = config.sie_problem();
    const auto ensemble = ensemble_for(config);
    const auto res = solve_picard(problem, ensemble, config.picard_options());

    CsvTable history({"iter", "update_norm", "residual", "elapsed_ms"});
    for (const auto& rec : res.history)
        history.row({u64(rec.iteration), fmt17(rec.update_norm), fmt17(rec.residual), fmt17(rec.elapsed_ms)});
    dir.write_text("history.csv", history.str());

    const auto cm = column_moments(res.solution);
    const auto ms = column_mean_squares(res.solution);
    CsvTable moments({"t", "mean", "l2_norm", "std_error"});
    for (std::size_t j = 0; j < cm.mean.size(); ++j)
        moments.row({fmt17(ensemble.grid().node(j)), fmt17(cm.mean[j]), fmt17(std::sqrt(ms[j])),
                     fmt17(cm.std_error[j])});
    dir.write_text("moments.csv", moments.str());

    CsvTable summary({"iterations", "converged", "final_residual", "final_residual_std_error", "empirical_rate",
                      "theoretical_k", "stayed_in_ball", "n_paths", "m", "seed"});
    summary.row({u64(res.iterations), flag(res.converged), fmt17(res.final_residual.value),
                 fmt17(res.final_residual.std_error), fmt17(res.empirical_rate), fmt17(res.theoretical_k),
                 flag(res.stayed_in_ball), u64(config.n_paths), u64(config.m), u64(config.seed)});
    dir.write_text("solve_summary.csv", summary.str());

    log << (res.converged ? "converged" : "not converged") << " after " << res.iterations << " iterations";
    if (!res.history.empty()) log << ", last update " << fmt17(res.history.back().update_norm);
    log << "\n";
    return res.converged ? kExitOk : kExitNotConverged;
}

double log2_slope(const std::vector<double>& dt, const std::vector<double>& error) {
    const double n = static_cast<double>(dt.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < dt.size(); ++i) {
        const double x = std::log2(dt[i]), y = std::log2(error[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int cmd_gbm(const ExperimentConfig& config, RunDirectory& dir, std::ostream& log) {
    if (config.type != ProblemType::sie) throw ConfigError("problem.type: gbm needs an sie problem");
    const auto problem = config.sie_problem();
    auto rate = [](const Coefficient& c, const char* key) {
        std::optional<double> v;
        if (c.kind() == Coefficient::Kind::linear) v = c.slope().constant_value();
        if (!v) throw ConfigError(std::string(key) + ": gbm needs a linear coefficient with a constant rate");
        return *v;
    };
    const double u = rate(problem.drift, "problem.drift");
    const double sigma = rate(problem.diffusion, "problem.diffusion");
    const double horizon = config.b - config.a;
    const double mean_exact = problem.h.mean() * std::exp(u * horizon);
    const double second_exact = problem.h.second_moment() * std::exp((2 * u + sigma * sigma) * horizon);

    const std::size_t n = config.n_paths;
    const auto h = problem.h.sample(n, config.effective_seed_h());
    auto opts = config.picard_options();

    CsvTable strong({"dt", "rms_error", "n_paths"});
    CsvTable moments({"dt", "mean", "mean_exact", "mean_std_error", "second_moment", "second_moment_exact",
                      "second_moment_std_error"});
    std::vector<double> dts, errors;
    bool all_converged = true;

    auto ensemble = sample_brownian(make_grid(config.a, config.b, std::size_t{1} << config.min_level), n, config.seed);
    for (unsigned level = config.min_level; level <= config.max_level; ++level) {
        if (level > config.min_level) ensemble = refine_brownian(ensemble, 2, config.seed + level);
        const auto res = solve_picard(problem, ensemble, opts);
        all_converged = all_converged && res.converged;
        const std::size_t m = ensemble.steps();

        std::vector<double> sq_err(n), terminal(n), terminal_sq(n);
        for (std::size_t p = 0; p < n; ++p) {
            const double x = res.solution.at(p, m);
            const double exact =
                h[p] * std::exp((u - 0.5 * sigma * sigma) * horizon + sigma * ensemble.path_value(p, m));
            sq_err[p] = (x - exact) * (x - exact);
            terminal[p] = x;
            terminal_sq[p] = x * x;
        }
        const double dt = ensemble.grid().dt();
        const double rms = std::sqrt(sample_moments(sq_err).mean);
        const auto m1 = sample_moments(terminal), m2 = sample_moments(terminal_sq);
        strong.row({fmt17(dt), fmt17(rms), u64(n)});
        moments.row({fmt17(dt), fmt17(m1.mean), fmt17(mean_exact), fmt17(m1.std_error()), fmt17(m2.mean),
                     fmt17(second_exact), fmt17(m2.std_error())});
        dts.push_back(dt);
        errors.push_back(rms);
        log << "level " << level << ": dt = " << fmt17(dt) << ", rms error = " << fmt17(rms)
            << (res.converged ? "" : " (not converged)") << "\n";
    }
    const double slope = log2_slope(dts, errors);
    dir.write_text("strong_error.csv", strong.str());
    dir.write_text("moment_error.csv", moments.str());
    CsvTable summary({"strong_slope", "levels", "n_paths", "all_converged"});
    summary.row({fmt17(slope), u64(dts.size()), u64(n), flag(all_converged)});
    dir.write_text("gbm_summary.csv", summary.str());
    log << "strong log2-slope = " << fmt17(slope) << "\n";
    return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_fredholm(const ExperimentConfig& config, RunDirectory& dir, std::ostream& log) {
    if (config.type != ProblemType::fredholm) throw ConfigError("problem.type: fredholm needs a fredholm problem");
    const auto outcome = run_checks(config, false);
    write_conditions(outcome, dir);
    log_verdicts(outcome, log);

    const auto problem = config.fredholm_problem();
    const auto res = solve_fredholm(problem, config.n_quad, config.tol, config.max_iter, config.radius);

    CsvTable solution({"x", "u"});
    for (std::size_t i = 0; i < res.solution.nodes.size(); ++i)
        solution.row({fmt17(res.solution.nodes[i]), fmt17(res.solution.values[i])});
    dir.write_text("solution.csv", solution.str());

    CsvTable history({"iter", "update_norm"});
    for (std::size_t i = 0; i < res.history.size(); ++i) history.row({u64(i + 1), fmt17(res.history[i])});
    dir.write_text("fredholm_history.csv", history.str());

    const double bound = (problem.b - problem.a) * std::abs(problem.lambda) * problem.kernel.u_lipschitz(problem.interval());
    CsvTable summary({"iterations", "converged", "residual", "observed_rate", "contraction_bound", "in_ball"});
    summary.row({u64(res.iterations), flag(res.converged), fmt17(res.residual), fmt17(res.observed_rate),
                 fmt17(bound), flag(res.in_ball)});
    dir.write_text("fredholm_summary.csv", summary.str());

    log << (res.converged ? "converged" : "not converged") << " after " << res.iterations << " iterations\n";
    return res.converged ? kExitOk : kExitNotConverged;
}

int cmd_isometry(const ExperimentConfig& config, RunDirectory& dir, std::ostream& log) {
    const auto ensemble = ensemble_for(config);
    CsvTable table({"integrand", "lhs", "rhs", "rel_error", "diff_std_error", "z_score", "tolerance", "pass"});
    bool all_pass = true;
    for (const auto& name : config.integrands) {
        const auto integrand = name == "one" ? AdaptedProcess::constant(ensemble.grid(), ensemble.n_paths(), 1.0)
                               : name == "t" ? time_process(ensemble.grid(), ensemble.n_paths())
                                             : brownian_process(ensemble);
        const auto rep = isometry_check(integrand, ensemble, config.iso_tolerance);
        all_pass = all_pass && rep.pass;
        table.row({name, fmt17(rep.lhs), fmt17(rep.rhs), fmt17(rep.rel_error), fmt17(rep.diff_std_error),
                   fmt17(rep.z_score()), fmt17(rep.tolerance), flag(rep.pass)});
        log << name << ": lhs = " << fmt17(rep.lhs) << ", rhs = " << fmt17(rep.rhs) << ", z = " << fmt17(rep.z_score())
            << (rep.pass ? "" : " FAIL") << "\n";
    }
    dir.write_text("isometry.csv", table.str());
    return all_pass ? kExitOk : kExitCheckFail;
}

}  // namespace sie::cli
