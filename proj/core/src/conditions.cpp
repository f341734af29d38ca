#include "sie/conditions.hpp"

#include <cmath>
#include <cstdio>

#include "sie/error.hpp"
#include "sie/rng.hpp"

namespace sie {

// ------------------------------------------------------------------ InitialLaw

InitialLaw InitialLaw::constant(double x0) {
    if (!std::isfinite(x0)) throw Error(ErrorKind::non_finite_input, "initial value is not finite");
    return InitialLaw(Kind::constant, x0, 0.0);
}

InitialLaw InitialLaw::normal(double mean, double variance) {
    if (!std::isfinite(mean) || !std::isfinite(variance) || variance < 0.0)
        throw Error(ErrorKind::invalid_argument, "normal law needs finite mean and variance >= 0");
    return InitialLaw(Kind::normal, mean, variance);
}

InitialLaw InitialLaw::lognormal(double mu, double sigma2) {
    if (!std::isfinite(mu) || !std::isfinite(sigma2) || sigma2 < 0.0)
        throw Error(ErrorKind::invalid_argument, "lognormal law needs finite mu and sigma2 >= 0");
    return InitialLaw(Kind::lognormal, mu, sigma2);
}

double InitialLaw::mean() const {
    switch (kind_) {
        case Kind::constant: return p1_;
        case Kind::normal: return p1_;
        case Kind::lognormal: return std::exp(p1_ + 0.5 * p2_);
    }
    return 0.0;
}

double InitialLaw::second_moment() const {
    switch (kind_) {
        case Kind::constant: return p1_ * p1_;
        case Kind::normal: return p1_ * p1_ + p2_;
        case Kind::lognormal: return std::exp(2.0 * p1_ + 2.0 * p2_);
    }
    return 0.0;
}

std::vector<double> InitialLaw::sample(std::size_t n, std::uint64_t seed) const {
    std::vector<double> out(n, p1_);
    if (kind_ == Kind::constant) return out;
    const CounterRng rng(seed, RngDomain::initial_law);
    const double sd = std::sqrt(p2_);
    for (std::size_t p = 0; p < n; ++p) {
        const double z = rng.normal_pair(static_cast<std::uint32_t>(p), 0)[0];
        out[p] = kind_ == Kind::normal ? p1_ + sd * z : std::exp(p1_ + sd * z);
    }
    return out;
}

std::string InitialLaw::descriptor() const {
    using descriptor::format_number;
    switch (kind_) {
        case Kind::constant: return "constant:" + format_number(p1_);
        case Kind::normal: return "normal:" + format_number(p1_) + "," + format_number(p2_);
        case Kind::lognormal: return "lognormal:" + format_number(p1_) + "," + format_number(p2_);
    }
    return {};
}

InitialLaw parse_initial_law(std::string_view text) {
    descriptor::Cursor cur(text);
    const auto name = cur.word();
    cur.expect(":");
    const double first = cur.number();
    std::optional<InitialLaw> law;
    if (name == "constant") {
        law = InitialLaw::constant(first);
    } else if (name == "normal" || name == "lognormal") {
        cur.expect(",");
        const double second = cur.number();
        if (second < 0.0) cur.fail("variance must be non-negative");
        law = name == "normal" ? InitialLaw::normal(first, second) : InitialLaw::lognormal(first, second);
    } else {
        cur.fail("unknown initial law '" + std::string(name) + "'");
    }
    if (!cur.done()) cur.fail("trailing characters");
    return *law;
}

void SieProblem::validate() const {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw Error(ErrorKind::invalid_interval, "problem needs finite a < b");
}

// --------------------------------------------------------------------- reports

const char* to_string(Theorem t) {
    switch (t) {
        case Theorem::schauder_sie: return "schauder_sie";
        case Theorem::banach_sie: return "banach_sie";
        case Theorem::schauder_fredholm: return "schauder_fredholm";
        case Theorem::banach_fredholm: return "banach_fredholm";
    }
    return "unknown";
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::pass_heuristic: return "pass_heuristic";
        case Verdict::fail: return "fail";
        case Verdict::unavailable: return "unavailable";
    }
    return "unknown";
}

std::string ConditionReport::inequality() const {
    switch (theorem) {
        case Theorem::schauder_sie: return "required_radius <= r";
        case Theorem::banach_sie: return "k_squared < 1";
        case Theorem::schauder_fredholm: return "lambda_M <= r";
        case Theorem::banach_fredholm: return "contraction < 1";
    }
    return {};
}

std::optional<double> ConditionReport::value(std::string_view name) const {
    for (const auto* list : {&inputs, &intermediates})
        for (const auto& [key, v] : *list)
            if (key == name) return v;
    return std::nullopt;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string to_text(const ConditionReport& report) {
    std::string out;
    out += "theorem = " + std::string(to_string(report.theorem)) + "\n";
    out += "verdict = " + std::string(to_string(report.verdict)) + "\n";
    out += "inequality = " + report.inequality() + "\n";
    for (const auto* list : {&report.inputs, &report.intermediates})
        for (const auto& [key, v] : *list) out += key + " = " + fmt17(v) + "\n";
    out += "message = " + report.message + "\n";
    return out;
}

std::string condition_csv_header() { return "theorem,verdict,intermediates"; }

std::string to_csv_row(const ConditionReport& report) {
    std::string fields;
    for (const auto* list : {&report.inputs, &report.intermediates}) {
        for (const auto& [key, v] : *list) {
            if (!fields.empty()) fields += ";";
            fields += key + "=" + fmt17(v);
        }
    }
    return std::string(to_string(report.theorem)) + "," + to_string(report.verdict) + ",\"" + fields + "\"";
}

// ---------------------------------------------------------------------- checks

namespace {

struct CoefficientBounds {
    BoundInfo drift;
    BoundInfo diffusion;
    bool heuristic = false;
};

CoefficientBounds gather_bounds(const SieProblem& problem, double r, const BoundPolicy& policy) {
    CoefficientBounds out;
    if (policy.source == BoundSource::analytic) {
        out.drift = analytic_bounds(problem.drift, problem.interval(), r);
        out.diffusion = analytic_bounds(problem.diffusion, problem.interval(), r);
    } else {
        out.drift = estimate_bounds(problem.drift, problem.interval(), r, policy.n_samples, policy.seed);
        out.diffusion =
            estimate_bounds(problem.diffusion, problem.interval(), r, policy.n_samples, policy.seed + 1);
        out.heuristic = true;
    }
    return out;
}

// Shared verdict rule: heuristic bounds only count when the policy allows them.
Verdict decide(bool holds, bool heuristic, const BoundPolicy& policy, std::string& message) {
    if (heuristic && !policy.allow_heuristic) {
        message = "bounds are sampled heuristics and the policy requires analytic bounds";
        return Verdict::unavailable;
    }
    if (!holds) return Verdict::fail;
    if (heuristic) {
        message = "inequality holds with sampled (heuristic) bounds";
        return Verdict::pass_heuristic;
    }
    return Verdict::pass;
}

double schauder_lhs(double second_moment, double len, double d) {
    return 3.0 * second_moment + 3.0 * (1.0 + len) * len * d * d;
}

}  // namespace

ConditionReport check_schauder(const SieProblem& problem, double r, const BoundPolicy& policy) {
    problem.validate();
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::invalid_argument, "radius must be positive");
    ConditionReport rep;
    rep.theorem = Theorem::schauder_sie;
    rep.inputs = {{"a", problem.a}, {"b", problem.b}, {"r", r}};

    const auto bounds = gather_bounds(problem, r, policy);
    const double eh2 = problem.h.second_moment();
    rep.intermediates.emplace_back("second_moment_h", eh2);
    if (!bounds.drift.sup_on_ball || !bounds.diffusion.sup_on_ball) {
        rep.verdict = Verdict::unavailable;
        rep.message = "no sup bound available for a coefficient";
        return rep;
    }
    const double d = std::max(*bounds.drift.sup_on_ball, *bounds.diffusion.sup_on_ball);
    const double lhs = schauder_lhs(eh2, problem.b - problem.a, d);
    const double required = std::sqrt(lhs);
    rep.intermediates.emplace_back("sup_drift", *bounds.drift.sup_on_ball);
    rep.intermediates.emplace_back("sup_diffusion", *bounds.diffusion.sup_on_ball);
    rep.intermediates.emplace_back("d", d);
    rep.intermediates.emplace_back("lhs", lhs);
    rep.intermediates.emplace_back("rhs", r * r);
    rep.intermediates.emplace_back("required_radius", required);
    rep.verdict = decide(required <= r, bounds.heuristic, policy, rep.message);
    if (rep.message.empty())
        rep.message = rep.verdict == Verdict::pass ? "A maps the r-ball into itself" : "3E[h^2] + 3(1+b-a)(b-a)d^2 exceeds r^2";
    return rep;
}

ConditionReport check_banach(const SieProblem& problem, const BoundPolicy& policy) {
    problem.validate();
    ConditionReport rep;
    rep.theorem = Theorem::banach_sie;
    rep.inputs = {{"a", problem.a}, {"b", problem.b}};

    // The Lipschitz constants do not depend on a radius; 1 only sets the
    // sampling box for the heuristic route.
    const auto bounds = gather_bounds(problem, 1.0, policy);
    if (!bounds.drift.lipschitz || !bounds.diffusion.lipschitz) {
        rep.verdict = Verdict::unavailable;
        rep.message = "no Lipschitz constant available for a coefficient";
        return rep;
    }
    const double k1 = *bounds.drift.lipschitz;
    const double k2 = *bounds.diffusion.lipschitz;
    const double c = std::max(k1, k2);
    const double len = problem.b - problem.a;
    const double k_squared = 2.0 * c * c * (1.0 + len) * len;
    rep.intermediates = {{"k1", k1}, {"k2", k2}, {"c", c}, {"k_squared", k_squared}, {"k", std::sqrt(k_squared)}};
    rep.verdict = decide(k_squared < 1.0, bounds.heuristic, policy, rep.message);
    if (rep.message.empty())
        rep.message = rep.verdict == Verdict::pass ? "A is k-contractive" : "2c^2(1+b-a)(b-a) is not below 1";
    return rep;
}

ConditionReport check_fredholm_schauder(const FredholmProblem& problem, double r) {
    problem.validate();
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::invalid_argument, "radius must be positive");
    ConditionReport rep;
    rep.theorem = Theorem::schauder_fredholm;
    rep.inputs = {{"a", problem.a}, {"b", problem.b}, {"lambda", problem.lambda}, {"r", r}};
    const double max_f = problem.kernel.max_abs(problem.interval(), r);
    const double m = max_f / (problem.b - problem.a);
    const double lambda_m = std::abs(problem.lambda) * m;
    rep.intermediates = {{"max_abs_F", max_f}, {"M", m}, {"lambda_M", lambda_m}};
    rep.verdict = lambda_m <= r ? Verdict::pass : Verdict::fail;
    rep.message = rep.verdict == Verdict::pass ? "T maps the r-ball into itself" : "|lambda| M exceeds r";
    return rep;
}

ConditionReport check_fredholm_banach(const FredholmProblem& problem) {
    problem.validate();
    ConditionReport rep;
    rep.theorem = Theorem::banach_fredholm;
    rep.inputs = {{"a", problem.a}, {"b", problem.b}, {"lambda", problem.lambda}};
    const double l = problem.kernel.u_lipschitz(problem.interval());
    const double contraction = (problem.b - problem.a) * std::abs(problem.lambda) * l;
    rep.intermediates = {{"L", l}, {"contraction", contraction}};
    rep.verdict = contraction < 1.0 ? Verdict::pass : Verdict::fail;
    rep.message = rep.verdict == Verdict::pass ? "T is a contraction" : "(b-a)|lambda| L is not below 1";
    return rep;
}

RadiusSearch min_radius(const SieProblem& problem) {
    problem.validate();
    const double eh2 = problem.h.second_moment();
    const double len = problem.b - problem.a;
    bool unavailable = false;
    auto passes = [&](double r) {
        const auto sf = sup_bound(problem.drift, problem.interval(), r);
        const auto ss = sup_bound(problem.diffusion, problem.interval(), r);
        if (!sf || !ss) {
            unavailable = true;
            return false;
        }
        return std::sqrt(schauder_lhs(eh2, len, std::max(*sf, *ss))) <= r;
    };

    RadiusSearch out;
    if (passes(0.0)) {
        out.status = RadiusSearch::Status::found;
        out.radius = 0.0;
        return out;
    }
    if (!passes(kMaxRadius)) {
        out.status = unavailable ? RadiusSearch::Status::unavailable : RadiusSearch::Status::infeasible;
        return out;
    }
    double lo = 0.0;
    double hi = kMaxRadius;
    while (hi - lo > kRadiusTolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (passes(mid) ? hi : lo) = mid;
    }
    out.status = RadiusSearch::Status::found;
    out.radius = hi;
    return out;
}

}  // namespace sie
