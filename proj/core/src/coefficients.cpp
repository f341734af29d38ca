#include "sie/coefficients.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "sie/error.hpp"
#include "sie/rng.hpp"

namespace sie {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Interior maxima of |g| are located by root isolation; values within a few
// ulps of the located peak can round above it, so they get a small pad.
constexpr double kPeakPad = 1.0 + 8.0 * kEps;

double horner(std::span<const double> c, double s) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * s + c[k];
    return acc;
}

std::vector<double> derivative(std::span<const double> c) {
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
    return d;
}

std::vector<double> trim(std::vector<double> c) {
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    return c;
}

// Real roots of the polynomial in (a, b). Critical points of p split the
// interval into monotone pieces; each sign change is bisected to full precision.
std::vector<double> roots_in(const std::vector<double>& coeffs, double a, double b) {
    const auto c = trim(coeffs);
    std::vector<double> roots;
    if (c.size() <= 1) return roots;
    if (c.size() == 2) {
        const double r = -c[0] / c[1];
        if (r > a && r < b) roots.push_back(r);
        return roots;
    }
    std::vector<double> cuts{a};
    for (double r : roots_in(derivative(c), a, b)) cuts.push_back(r);
    cuts.push_back(b);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        double lo = cuts[k];
        double hi = cuts[k + 1];
        double flo = horner(c, lo);
        const double fhi = horner(c, hi);
        if (flo == 0.0) {
            if (lo > a && lo < b && (roots.empty() || roots.back() != lo)) roots.push_back(lo);
            continue;
        }
        if ((flo < 0.0) == (fhi < 0.0) || fhi == 0.0) continue;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            const double fm = horner(c, mid);
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push_back(0.5 * (lo + hi));
    }
    return roots;
}

void require_finite_number(double v, const char* what) {
    if (!std::isfinite(v)) throw Error(ErrorKind::non_finite_input, std::string(what) + " is not finite");
}

}  // namespace

// ---------------------------------------------------------------- TimeFunction

TimeFunction TimeFunction::constant(double c) {
    require_finite_number(c, "time-function constant");
    return TimeFunction(Constant{c});
}

TimeFunction TimeFunction::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) throw Error(ErrorKind::invalid_argument, "polynomial needs a coefficient");
    for (double c : coeffs) require_finite_number(c, "polynomial coefficient");
    return TimeFunction(Polynomial{std::move(coeffs)});
}

TimeFunction TimeFunction::sinusoid(double amplitude, double frequency, double phase) {
    require_finite_number(amplitude, "sinusoid amplitude");
    require_finite_number(frequency, "sinusoid frequency");
    require_finite_number(phase, "sinusoid phase");
    return TimeFunction(Sinusoid{amplitude, frequency, phase});
}

double TimeFunction::operator()(double s) const {
    switch (form_.index()) {
        case 0: return std::get<Constant>(form_).value;
        case 1: return horner(std::get<Polynomial>(form_).coeffs, s);
        default: {
            const auto& w = std::get<Sinusoid>(form_);
            return w.amplitude * std::sin(w.frequency * s + w.phase);
        }
    }
}

double TimeFunction::max_abs(Interval iv) const {
    if (const auto* c = std::get_if<Constant>(&form_)) return std::abs(c->value);
    if (const auto* poly = std::get_if<Polynomial>(&form_)) {
        const auto coeffs = trim(poly->coeffs);
        if (coeffs.size() <= 1) return coeffs.empty() ? 0.0 : std::abs(coeffs[0]);
        double best = std::max(std::abs(horner(coeffs, iv.a)), std::abs(horner(coeffs, iv.b)));
        for (double r : roots_in(derivative(coeffs), iv.a, iv.b))
            best = std::max(best, std::abs(horner(coeffs, r)) * kPeakPad);
        return best;
    }
    const auto& w = std::get<Sinusoid>(form_);
    const double amp = std::abs(w.amplitude);
    double lo = w.frequency * iv.a + w.phase;
    double hi = w.frequency * iv.b + w.phase;
    if (lo > hi) std::swap(lo, hi);
    // |sin| peaks at pi/2 + k pi.
    const double k = std::ceil((lo - std::numbers::pi / 2) / std::numbers::pi);
    if (std::numbers::pi / 2 + k * std::numbers::pi <= hi) return amp;
    return std::max(std::abs((*this)(iv.a)), std::abs((*this)(iv.b)));
}

std::optional<double> TimeFunction::constant_value() const {
    if (const auto* c = std::get_if<Constant>(&form_)) return c->value;
    if (const auto* poly = std::get_if<Polynomial>(&form_)) {
        const auto coeffs = trim(poly->coeffs);
        if (coeffs.size() <= 1) return coeffs.empty() ? 0.0 : coeffs[0];
        return std::nullopt;
    }
    const auto& w = std::get<Sinusoid>(form_);
    if (w.amplitude == 0.0) return 0.0;
    if (w.frequency == 0.0) return w.amplitude * std::sin(w.phase);
    return std::nullopt;
}

std::string TimeFunction::descriptor() const {
    using descriptor::format_number;
    if (const auto* c = std::get_if<Constant>(&form_)) return "const:" + format_number(c->value);
    if (const auto* poly = std::get_if<Polynomial>(&form_)) {
        std::string out = "poly:";
        for (std::size_t k = 0; k < poly->coeffs.size(); ++k) {
            if (k) out += ",";
            out += format_number(poly->coeffs[k]);
        }
        return out;
    }
    const auto& w = std::get<Sinusoid>(form_);
    return "sin:" + format_number(w.amplitude) + "," + format_number(w.frequency) + "," +
           format_number(w.phase);
}

// ----------------------------------------------------------------- Coefficient

Coefficient Coefficient::constant(double c) {
    require_finite_number(c, "constant coefficient");
    Coefficient out;
    out.kind_ = Kind::constant;
    out.value_ = c;
    return out;
}

Coefficient Coefficient::linear(TimeFunction g) {
    Coefficient out;
    out.kind_ = Kind::linear;
    out.slope_ = std::make_shared<const TimeFunction>(std::move(g));
    return out;
}

Coefficient Coefficient::affine(TimeFunction alpha, TimeFunction beta) {
    Coefficient out;
    out.kind_ = Kind::affine;
    out.slope_ = std::make_shared<const TimeFunction>(std::move(alpha));
    out.offset_ = std::make_shared<const TimeFunction>(std::move(beta));
    return out;
}

Coefficient Coefficient::clipped(Coefficient inner, double bound) {
    if (!std::isfinite(bound) || bound < 0.0)
        throw Error(ErrorKind::invalid_argument, "clip bound must be finite and non-negative");
    Coefficient out;
    out.kind_ = Kind::clipped;
    out.value_ = bound;
    out.inner_ = std::make_shared<const Coefficient>(std::move(inner));
    return out;
}

double Coefficient::evaluate(double s, double x) const {
    if (!std::isfinite(s) || !std::isfinite(x))
        throw Error(ErrorKind::non_finite_input, "coefficient evaluated at a non-finite point");
    return evaluate_unchecked(s, x);
}

double Coefficient::evaluate_unchecked(double s, double x) const {
    switch (kind_) {
        case Kind::constant: return value_;
        case Kind::linear: return (*slope_)(s)*x;
        case Kind::affine: return (*slope_)(s)*x + (*offset_)(s);
        case Kind::clipped: return std::clamp(inner_->evaluate_unchecked(s, x), -value_, value_);
    }
    return 0.0;
}

std::string Coefficient::descriptor() const {
    using descriptor::format_number;
    switch (kind_) {
        case Kind::constant: return "constant:" + format_number(value_);
        case Kind::linear: return "linear:" + slope_->descriptor();
        case Kind::affine: return "affine:(" + slope_->descriptor() + "):(" + offset_->descriptor() + ")";
        case Kind::clipped: return "clipped:" + format_number(value_) + ":(" + inner_->descriptor() + ")";
    }
    return {};
}

GridCoefficient::GridCoefficient(const Coefficient& coef, std::span<const double> nodes)
    : kind_(coef.kind()), value_(0.0) {
    switch (kind_) {
        case Coefficient::Kind::constant: value_ = coef.constant_value(); break;
        case Coefficient::Kind::affine:
            offset_.resize(nodes.size());
            for (std::size_t j = 0; j < nodes.size(); ++j) offset_[j] = coef.offset()(nodes[j]);
            [[fallthrough]];
        case Coefficient::Kind::linear:
            slope_.resize(nodes.size());
            for (std::size_t j = 0; j < nodes.size(); ++j) slope_[j] = coef.slope()(nodes[j]);
            break;
        case Coefficient::Kind::clipped:
            value_ = coef.clip_bound();
            inner_ = std::make_unique<GridCoefficient>(coef.inner(), nodes);
            break;
    }
}

double GridCoefficient::operator()(std::size_t j, double x) const {
    switch (kind_) {
        case Coefficient::Kind::constant: return value_;
        case Coefficient::Kind::linear: return slope_[j] * x;
        case Coefficient::Kind::affine: return slope_[j] * x + offset_[j];
        case Coefficient::Kind::clipped: return std::clamp((*inner_)(j, x), -value_, value_);
    }
    return 0.0;
}

// ---------------------------------------------------------------------- bounds

const char* to_string(Provenance p) {
    return p == Provenance::analytic ? "analytic" : "sampled-heuristic";
}

std::optional<double> lipschitz_constant(const Coefficient& coef, Interval iv) {
    switch (coef.kind()) {
        case Coefficient::Kind::constant: return 0.0;
        case Coefficient::Kind::linear:
        case Coefficient::Kind::affine: return coef.slope().max_abs(iv);
        case Coefficient::Kind::clipped: return lipschitz_constant(coef.inner(), iv);
    }
    return std::nullopt;
}

std::optional<double> sup_bound(const Coefficient& coef, Interval iv, double r) {
    if (!(r >= 0.0)) throw Error(ErrorKind::invalid_argument, "ball radius must be non-negative");
    switch (coef.kind()) {
        case Coefficient::Kind::constant: return std::abs(coef.constant_value());
        case Coefficient::Kind::linear: return coef.slope().max_abs(iv) * r;
        case Coefficient::Kind::affine: return coef.slope().max_abs(iv) * r + coef.offset().max_abs(iv);
        case Coefficient::Kind::clipped: {
            const auto inner = sup_bound(coef.inner(), iv, r);
            return inner ? std::min(coef.clip_bound(), *inner) : coef.clip_bound();
        }
    }
    return std::nullopt;
}

BoundInfo analytic_bounds(const Coefficient& coef, Interval iv, double r) {
    BoundInfo info;
    info.radius = r;
    info.lipschitz = lipschitz_constant(coef, iv);
    info.sup_on_ball = sup_bound(coef, iv, r);
    info.provenance = Provenance::analytic;
    return info;
}

BoundInfo estimate_bounds(const Coefficient& coef, Interval iv, double r, std::size_t n_samples,
                          std::uint64_t seed) {
    if (n_samples == 0) throw Error(ErrorKind::invalid_argument, "need at least one sample");
    if (!(r >= 0.0)) throw Error(ErrorKind::invalid_argument, "ball radius must be non-negative");
    const CounterRng rng(seed, RngDomain::bounds);
    const double width = iv.b - iv.a;
    const double xr = r > 0.0 ? r : 1.0;

    double sup = 0.0;
    double lip = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const auto u = rng.uniform_pair(0, k);
        const double s = iv.a + width * (1.0 - u[0]);
        const double x = r * (2.0 * u[1] - 1.0);
        sup = std::max(sup, std::abs(coef.evaluate(s, x)));

        const auto v = rng.uniform_pair(1, 2 * k);
        const auto w = rng.uniform_pair(1, 2 * k + 1);
        const double s2 = iv.a + width * (1.0 - v[0]);
        const double x1 = xr * (2.0 * v[1] - 1.0);
        const double x2 = xr * (2.0 * w[0] - 1.0);
        if (x1 != x2) {
            const double q = std::abs(coef.evaluate(s2, x1) - coef.evaluate(s2, x2)) / std::abs(x1 - x2);
            lip = std::max(lip, q);
        }
    }
    BoundInfo info;
    info.radius = r;
    info.lipschitz = lip;
    info.sup_on_ball = sup;
    info.provenance = Provenance::sampled_heuristic;
    return info;
}

// ----------------------------------------------------------------- descriptors

namespace descriptor {

bool Cursor::consume(std::string_view token) {
    if (text_.substr(pos_, token.size()) == token) {
        pos_ += token.size();
        return true;
    }
    return false;
}

void Cursor::expect(std::string_view token) {
    if (!consume(token)) fail("expected '" + std::string(token) + "'");
}

double Cursor::number() {
    std::size_t start = pos_;
    if (start < text_.size() && text_[start] == '+') ++start;
    double v = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + text_.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr == first) fail("expected a number");
    if (!std::isfinite(v)) fail("number must be finite");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return v;
}

std::string_view Cursor::word() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-'))
        ++pos_;
    if (pos_ == start) fail("expected a name");
    return text_.substr(start, pos_ - start);
}

void Cursor::fail(const std::string& what) const {
    throw Error(ErrorKind::parse_error,
                what + " at position " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
}

TimeFunction time_function(Cursor& cur) {
    if (cur.consume("(")) {
        auto tf = time_function(cur);
        cur.expect(")");
        return tf;
    }
    const auto name = cur.word();
    cur.expect(":");
    if (name == "const") return TimeFunction::constant(cur.number());
    if (name == "poly") {
        std::vector<double> coeffs{cur.number()};
        while (cur.consume(",")) coeffs.push_back(cur.number());
        return TimeFunction::polynomial(std::move(coeffs));
    }
    if (name == "sin") {
        const double amp = cur.number();
        cur.expect(",");
        const double freq = cur.number();
        cur.expect(",");
        const double phase = cur.number();
        return TimeFunction::sinusoid(amp, freq, phase);
    }
    cur.fail("unknown time function '" + std::string(name) + "'");
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

Coefficient coefficient(Cursor& cur) {
    if (cur.consume("(")) {
        auto c = coefficient(cur);
        cur.expect(")");
        return c;
    }
    const auto name = cur.word();
    cur.expect(":");
    if (name == "constant") return Coefficient::constant(cur.number());
    if (name == "linear") return Coefficient::linear(time_function(cur));
    if (name == "affine") {
        auto alpha = time_function(cur);
        cur.expect(":");
        auto beta = time_function(cur);
        return Coefficient::affine(std::move(alpha), std::move(beta));
    }
    if (name == "clipped") {
        const double bound = cur.number();
        if (bound < 0.0) cur.fail("clip bound must be non-negative");
        cur.expect(":");
        return Coefficient::clipped(coefficient(cur), bound);
    }
    cur.fail("unknown coefficient kind '" + std::string(name) + "'");
}

}  // namespace

}  // namespace descriptor

Coefficient parse_coefficient(std::string_view text) {
    descriptor::Cursor cur(text);
    auto c = descriptor::coefficient(cur);
    if (!cur.done()) cur.fail("trailing characters");
    return c;
}

TimeFunction parse_time_function(std::string_view text) {
    descriptor::Cursor cur(text);
    auto tf = descriptor::time_function(cur);
    if (!cur.done()) cur.fail("trailing characters");
    return tf;
}

}  // namespace sie
