#include "ma_radial/nonlinearity.hpp"

#include "ma_radial/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ma_radial {

const char* to_string(LimitKind k) {
    switch (k) {
    case LimitKind::zero: return "zero";
    case LimitKind::finite: return "finite";
    case LimitKind::infinite: return "inf";
    case LimitKind::undetermined: return "undetermined";
    }
    return "?";
}

std::string ExtendedLimit::describe() const {
    if (kind == LimitKind::finite) {
        std::ostringstream os;
        os.precision(6);
        os << value;
        return os.str();
    }
    return to_string(kind);
}

Nonlinearity Nonlinearity::builtin(const std::string& family, std::vector<double> params) {
    auto need = [&](std::size_t n) {
        if (params.size() != n)
            throw DomainError("family '" + family + "' expects " + std::to_string(n) +
                              " parameter(s), got " + std::to_string(params.size()));
    };
    Nonlinearity nl;
    nl.source_ = Family{family, params};
    if (family == "power") {
        need(1);
        const double p = params[0];
        if (!(p >= 0.0) || !std::isfinite(p)) throw DomainError("power exponent must be >= 0");
        nl.fn_ = [p](double x) { return std::pow(x, p); };
        nl.label_ = "x^" + std::to_string(p);
    } else if (family == "constant") {
        need(1);
        const double c = params[0];
        if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("constant must be >= 0");
        nl.fn_ = [c](double) { return c; };
        nl.positive_ = c > 0.0;
        nl.label_ = std::to_string(c);
    } else if (family == "linear") {
        if (params.empty()) params.push_back(1.0);
        need(1);
        const double a = params[0];
        if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("linear slope must be >= 0");
        nl.source_ = Family{family, params};
        nl.fn_ = [a](double x) { return a * x; };
        nl.positive_ = a > 0.0;
        nl.label_ = "linear";
    } else if (family == "ratio_bump") {
        need(0);
        nl.fn_ = [](double x) { return x * x / (1.0 + x * x); };
        nl.label_ = "x^2/(1+x^2)";
    } else if (family == "exp_minus_one") {
        need(0);
        nl.fn_ = [](double x) { return std::expm1(x); };
        nl.label_ = "exp(x)-1";
    } else {
        throw DomainError("unknown nonlinearity family '" + family + "'");
    }
    return nl;
}

Nonlinearity Nonlinearity::parse(const std::string& text) {
    Expression expr = Expression::parse(text);
    Nonlinearity nl;
    nl.fn_ = [expr](double x) { return expr(x); };
    nl.source_ = expr;
    nl.label_ = text;

    // Positivity is only needed where the solver evaluates, so bad probes warn.
    for (int k = -24; k <= 24; ++k) {
        const double x = std::ldexp(1.0, k);
        const double y = expr(x);
        if (!std::isfinite(y) || y < 0.0) {
            std::ostringstream os;
            os << "expression evaluates to " << y << " at x=" << x;
            nl.warnings_.push_back(os.str());
        }
        if (!(y > 0.0)) nl.positive_ = false;
    }
    const double y0 = expr(0.0);
    if (!std::isfinite(y0) || y0 < 0.0) {
        std::ostringstream os;
        os << "expression evaluates to " << y0 << " at x=0";
        nl.warnings_.push_back(os.str());
    }
    return nl;
}

Nonlinearity Nonlinearity::custom(std::function<double(double)> fn, std::string label,
                                  bool positive) {
    Nonlinearity nl;
    nl.fn_ = std::move(fn);
    nl.source_ = Family{"custom", {}};
    nl.label_ = std::move(label);
    nl.positive_ = positive;
    return nl;
}

double Nonlinearity::operator()(double x) const {
    if (!(x >= 0.0)) throw DomainError("nonlinearity evaluated at negative or NaN argument");
    const double y = fn_(x);
    if (!std::isfinite(y) || y < 0.0) {
        std::ostringstream os;
        os << "nonlinearity '" << label_ << "' returned " << y << " at x=" << x;
        throw InvalidNonlinearity(os.str());
    }
    return y;
}

Nonlinearity Nonlinearity::with_limits(DeclaredLimits limits) const {
    Nonlinearity copy = *this;
    if (limits.q0) limits.q0->declared = true;
    if (limits.qinf) limits.qinf->declared = true;
    copy.declared_ = std::move(limits);
    return copy;
}

double eval(const Nonlinearity& nl, double x) { return nl(x); }

Nonlinearity parse_expression(const std::string& text) { return Nonlinearity::parse(text); }

double envelope(const Nonlinearity& nl, double t, int resolution) {
    if (!(t >= 0.0)) throw DomainError("envelope requires t >= 0");
    if (resolution < 2) throw DomainError("envelope resolution must be >= 2");
    // Overflow to +inf is a legitimate running maximum; NaN and negative values still throw.
    auto value = [&nl](double x) {
        const double y = nl.raw(x);
        return y == std::numeric_limits<double>::infinity() ? y : nl(x);
    };
    if (t == 0.0) return value(0.0);

    const double h = t / resolution;
    double best = value(t);
    int arg = resolution;
    for (int i = 0; i < resolution; ++i) {
        const double y = value(i * h);
        if (y > best) {
            best = y;
            arg = i;
        }
    }
    if (arg == 0 || arg == resolution || std::isinf(best)) return best;

    // One golden-section pass on the bracket around the discrete argmax.
    constexpr double inv_phi = 0.6180339887498949;
    double a = (arg - 1) * h;
    double b = (arg + 1) * h;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = value(c);
    double fd = value(d);
    for (int it = 0; it < 60 && (b - a) > 1e-14 * t; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = value(d);
        }
    }
    return std::max({best, fc, fd});
}

Nonlinearity envelope_function(const Nonlinearity& nl, int resolution) {
    Nonlinearity base = nl;
    return Nonlinearity::custom(
        [base, resolution](double t) { return envelope(base, t, resolution); },
        "envelope(" + nl.label() + ")", nl.positive());
}

ExtendedLimit asymptotic_quotient(const Nonlinearity& nl, int N, End end,
                                  const QuotientConfig& cfg) {
    if (N < 1) throw DomainError("dimension N must be >= 1");
    const auto& declared = end == End::zero ? nl.declared_limits().q0 : nl.declared_limits().qinf;
    if (declared) return *declared;

    ExtendedLimit out;
    std::vector<double> q;
    q.reserve(static_cast<std::size_t>(cfg.probes));
    for (int k = 1; k <= cfg.probes; ++k) {
        const double x = std::ldexp(1.0, end == End::zero ? -k : k);
        // x^N can under/overflow for large N; divide in log space when it does.
        // Overflow of f itself (e.g. exponential growth) is an infinite quotient.
        const double y = nl.raw(x);
        if (std::isnan(y) || y < 0.0) (void)nl(x);
        double quotient = y / std::pow(x, N);
        if (std::isfinite(y) && (!std::isfinite(quotient) || (quotient == 0.0 && y > 0.0)))
            quotient = std::exp(std::log(y) - N * std::log(x));
        out.evidence.emplace_back(x, quotient);
        q.push_back(quotient);
    }

    const int w = std::min(cfg.window, cfg.probes);
    const auto tail = std::vector<double>(q.end() - w, q.end());
    const double log_step = std::log(2.0);

    auto log_slopes_all = [&](auto pred) {
        for (int i = 1; i < w; ++i) {
            if (!(tail[i] > 0.0) || !(tail[i - 1] > 0.0)) return false;
            const double slope = (std::log(tail[i]) - std::log(tail[i - 1])) / log_step;
            // Moving toward zero the log x step is negative.
            const double oriented = end == End::zero ? -slope : slope;
            if (!pred(oriented)) return false;
        }
        return true;
    };

    const bool nondecreasing = std::is_sorted(tail.begin(), tail.end());
    const bool nonincreasing = std::is_sorted(tail.rbegin(), tail.rend());
    const bool all_above = std::all_of(tail.begin(), tail.end(),
                                       [&](double v) { return v > cfg.infinite_threshold; });
    const bool all_below = std::all_of(tail.begin(), tail.end(),
                                       [&](double v) { return v < cfg.zero_threshold; });

    if ((all_above && nondecreasing) ||
        (nondecreasing && log_slopes_all([&](double s) {
             // q ~ x^s: diverges when s > 0 toward infinity, s < 0 toward zero.
             return end == End::infinity ? s >= cfg.min_log_slope : s <= -cfg.min_log_slope;
         }))) {
        out.kind = LimitKind::infinite;
        return out;
    }
    if ((all_below && nonincreasing) ||
        (nonincreasing && log_slopes_all([&](double s) {
             return end == End::infinity ? s <= -cfg.min_log_slope : s >= cfg.min_log_slope;
         }))) {
        out.kind = LimitKind::zero;
        return out;
    }

    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    if (std::isfinite(*hi) && *hi - *lo <= cfg.finite_rel_tol * std::fabs(*hi)) {
        out.kind = LimitKind::finite;
        out.value = tail.back();
        return out;
    }
    out.kind = LimitKind::undetermined;
    return out;
}

} // namespace ma_radial
