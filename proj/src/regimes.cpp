#include "ma_radial/regimes.hpp"

#include "ma_radial/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ma_radial {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double kVLo = 1e-6;
constexpr double kVHi = 1e6;

struct PartName {
    Part part;
    const char* tag;
};

constexpr PartName kPartNames[] = {
    {Part::T1a, "T1a"}, {Part::T1b, "T1b"}, {Part::T2a, "T2a"}, {Part::T2b, "T2b"},
    {Part::T2c, "T2c"}, {Part::T2d, "T2d"}, {Part::T2e, "T2e"}, {Part::T2f, "T2f"},
};

std::vector<double> geometric(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
    v.front() = lo;
    v.back() = hi;
    return v;
}

// h(x) / x^N in log space when the direct quotient leaves double range.
double quotient(double y, double x, int N) {
    const double q = y / std::pow(x, N);
    if (std::isfinite(q) && (q > 0.0 || y == 0.0)) return q;
    return std::exp(std::log(y) - N * std::log(x));
}

std::string evidence_tail(const char* name, const ExtendedLimit& lim) {
    std::ostringstream os;
    os << name << " is undetermined; last quotients:";
    const std::size_t n = lim.evidence.size();
    for (std::size_t i = n > 5 ? n - 5 : 0; i < n; ++i)
        os << " (" << lim.evidence[i].first << ", " << lim.evidence[i].second << ")";
    return os.str();
}

// Running envelope quotient sup and its per-cell upper bound; cells are sampled at 8 points.
void sup_quotient(const Nonlinearity& h, int N, const std::vector<double>& v, double& plain,
                  double& bracket) {
    double running = envelope(h, v.front(), 256);
    plain = quotient(running, v.front(), N);
    bracket = plain;
    for (std::size_t k = 1; k < v.size(); ++k) {
        for (int j = 1; j <= 8; ++j) {
            const double x = v[k - 1] + (v[k] - v[k - 1]) * j / 8.0;
            running = std::max(running, h.raw(x));
        }
        if (!std::isfinite(running))
            throw DomainError("envelope quotient of '" + h.label() + "' is unbounded on the search grid");
        plain = std::max(plain, quotient(running, v[k], N));
        // The envelope is nondecreasing, so on [v_{k-1}, v_k] it is at most running / v_{k-1}^N.
        bracket = std::max(bracket, quotient(running, v[k - 1], N));
    }
}

void inf_quotient(const Nonlinearity& h, int N, const std::vector<double>& v, double& plain,
                  double& bracket) {
    plain = inf;
    bracket = inf;
    double prev = h.raw(v.front());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double y = h.raw(v[k]);
        if (!std::isfinite(y)) {
            prev = y;
            continue;
        }
        if (y < 0.0) throw InvalidNonlinearity("nonlinearity '" + h.label() + "' is negative on the search grid");
        plain = std::min(plain, quotient(y, v[k], N));
        if (k > 0 && std::isfinite(prev)) bracket = std::min(bracket, quotient(std::min(prev, y), v[k], N));
        prev = y;
    }
    bracket = std::min(bracket, plain);
}

bool evaluates(const Nonlinearity& h, double x, double& y) {
    y = h.raw(x);
    return std::isfinite(y) && y >= 0.0;
}

} // namespace

const char* to_string(Part part) {
    for (const auto& n : kPartNames)
        if (n.part == part) return n.tag;
    return "?";
}

Part part_from_string(const std::string& tag) {
    for (const auto& n : kPartNames)
        if (tag == n.tag) return n.part;
    throw DomainError("unknown regime '" + tag + "'");
}

const char* to_string(Provenance p) {
    switch (p) {
    case Provenance::unconditional: return "unconditional";
    case Provenance::certificate: return "certificate";
    case Provenance::grid_constant: return "grid_constant";
    case Provenance::unavailable: return "unavailable";
    }
    return "?";
}

bool RegimeReport::applies(Part part) const {
    return std::find(applicable_parts.begin(), applicable_parts.end(), part) != applicable_parts.end();
}

const PartWindow* RegimeReport::window(Part part) const {
    for (const auto& w : windows)
        if (w.part == part) return &w;
    return nullptr;
}

std::pair<int, int> RegimeReport::predicted_count(double lambda) const {
    int lo = 0, hi = -1;
    for (const auto& w : windows) {
        if (!(lambda > w.lo && lambda < w.hi)) continue;
        if (w.nonexistence) hi = 0;
        else lo = std::max(lo, w.min_count);
    }
    return {lo, hi};
}

WindowEstimate nonexistence_window(const ProblemSpec& p, Part part, int resolution) {
    if (part != Part::T2e && part != Part::T2f)
        throw DomainError("nonexistence windows exist only for T2e and T2f");
    if (resolution < 2) throw DomainError("resolution must be >= 2");
    const int N = p.N;
    const ExtendedLimit lims[2][2] = {
        {asymptotic_quotient(p.f, N, End::zero), asymptotic_quotient(p.f, N, End::infinity)},
        {asymptotic_quotient(p.g, N, End::zero), asymptotic_quotient(p.g, N, End::infinity)},
    };
    for (const auto& pair : lims) {
        for (const auto& l : pair) {
            if (part == Part::T2e && !l.is_bounded())
                throw DomainError("T2e needs all four quotient limits finite");
            if (part == Part::T2f && !l.is_positive())
                throw DomainError("T2f needs all four quotient limits positive");
        }
    }

    WindowEstimate out;
    out.part = part;
    out.v_lo = kVLo;
    out.v_hi = kVHi;
    out.points = resolution;
    const auto v = geometric(kVLo, kVHi, resolution);
    const Nonlinearity* maps[2] = {&p.f, &p.g};

    if (part == Part::T2e) {
        double eN = 0.0, eN_c = 0.0;
        for (int i = 0; i < 2; ++i) {
            double plain = 0.0, bracket = 0.0;
            sup_quotient(*maps[i], N, v, plain, bracket);
            for (const auto& l : lims[i]) {
                const double lv = l.kind == LimitKind::finite ? l.value : 0.0;
                plain = std::max(plain, lv);
                bracket = std::max(bracket, lv);
            }
            eN = std::max(eN, plain);
            eN_c = std::max(eN_c, bracket);
        }
        if (!(eN > 0.0)) throw DomainError("envelope quotients vanish on the search grid");
        out.epsilon = std::pow(eN, 1.0 / N);
        out.epsilon_conservative = std::pow(eN_c, 1.0 / N);
        out.lambda0 = std::pow(1.0 / (2.0 * out.epsilon), N);
        out.lambda0_conservative = std::pow(1.0 / (2.0 * out.epsilon_conservative), N);
    } else {
        double eN = inf, eN_c = inf;
        for (int i = 0; i < 2; ++i) {
            double plain = inf, bracket = inf;
            inf_quotient(*maps[i], N, v, plain, bracket);
            for (const auto& l : lims[i]) {
                if (l.kind != LimitKind::finite) continue;
                plain = std::min(plain, l.value);
                bracket = std::min(bracket, l.value);
            }
            eN = std::min(eN, plain);
            eN_c = std::min(eN_c, bracket);
        }
        if (!(eN > 0.0) || !std::isfinite(eN))
            throw DomainError("quotient infimum is not positive and finite on the search grid");
        const double gamma = gamma_constant(N);
        out.epsilon = std::pow(eN, 1.0 / N);
        out.epsilon_conservative = std::pow(eN_c, 1.0 / N);
        out.lambda0 = std::pow(1.0 / (gamma * out.epsilon), N);
        out.lambda0_conservative = std::pow(1.0 / (gamma * out.epsilon_conservative), N);
    }
    return out;
}

ShellCertificate expansion_certificate(const ProblemSpec& p, int points) {
    if (points < 2) throw DomainError("certificate grid needs at least 2 points");
    const int N = p.N;
    const double gamma = gamma_constant(N);
    ShellCertificate out;
    out.lambda0 = inf;
    for (double r : geometric(kVLo, kVHi, points)) {
        double m_hat = inf;
        bool ok = true;
        for (int i = 0; i <= 128 && ok; ++i) {
            const double t = r / 8.0 + (r - r / 8.0) * i / 128.0;
            double yf = 0.0, yg = 0.0;
            ok = evaluates(p.f, t, yf) && evaluates(p.g, t, yg);
            m_hat = std::min({m_hat, yf, yg});
        }
        if (!ok || !(m_hat > 0.0)) continue;
        const double lam = std::exp(N * std::log(r / (4.0 * gamma)) - std::log(m_hat));
        if (lam < out.lambda0) {
            out.lambda0 = lam;
            out.radius = r;
            out.found = true;
        }
    }
    return out;
}

ShellCertificate compression_certificate(const ProblemSpec& p, int points) {
    if (points < 2) throw DomainError("certificate grid needs at least 2 points");
    const int N = p.N;
    ShellCertificate out;
    const Nonlinearity sum = Nonlinearity::custom(
        [&p](double t) { return p.f.raw(t) + p.g.raw(t); }, "f+g");
    for (double r : geometric(kVLo, kVHi, points)) {
        double M_hat = 0.0;
        try {
            M_hat = envelope(sum, r, 256);
        } catch (const Error&) {
            continue;
        }
        const double lam = M_hat > 0.0 ? std::exp(N * std::log(r / 2.0) - std::log(M_hat)) : inf;
        if (lam > out.lambda0) {
            out.lambda0 = lam;
            out.radius = r;
            out.found = true;
        }
    }
    return out;
}

RegimeReport classify(const ProblemSpec& p, const QuotientConfig& qcfg) {
    RegimeReport rep;
    const int N = p.N;
    rep.f0 = asymptotic_quotient(p.f, N, End::zero, qcfg);
    rep.g0 = asymptotic_quotient(p.g, N, End::zero, qcfg);
    rep.f_inf = asymptotic_quotient(p.f, N, End::infinity, qcfg);
    rep.g_inf = asymptotic_quotient(p.g, N, End::infinity, qcfg);
    const std::pair<const char*, const ExtendedLimit*> named[] = {
        {"f0", &rep.f0}, {"g0", &rep.g0}, {"f_inf", &rep.f_inf}, {"g_inf", &rep.g_inf}};
    for (const auto& [name, lim] : named)
        if (lim->kind == LimitKind::undetermined) throw UndeterminedLimit(evidence_tail(name, *lim));

    rep.positive = p.f.positive() && p.g.positive();
    const bool zero0 = rep.f0.is_zero() && rep.g0.is_zero();
    const bool zeroI = rep.f_inf.is_zero() && rep.g_inf.is_zero();
    const bool inf0 = rep.f0.is_infinite() && rep.g0.is_infinite();
    const bool infI = rep.f_inf.is_infinite() && rep.g_inf.is_infinite();

    auto add = [&](PartWindow w) {
        rep.applicable_parts.push_back(w.part);
        rep.windows.push_back(std::move(w));
    };

    if (zero0 && infI)
        add({Part::T1a, 0.0, inf, std::nullopt, 1, false, Provenance::unconditional,
             "a nontrivial solution exists for all lambda > 0"});
    if (inf0 && zeroI)
        add({Part::T1b, 0.0, inf, std::nullopt, 1, false, Provenance::unconditional,
             "a nontrivial solution exists for all lambda > 0"});
    if (!rep.positive) return rep;

    std::optional<ShellCertificate> expand, compress;
    auto expansion = [&]() -> const ShellCertificate& {
        if (!expand) expand = expansion_certificate(p);
        return *expand;
    };
    auto compression = [&]() -> const ShellCertificate& {
        if (!compress) compress = compression_certificate(p);
        return *compress;
    };
    auto above = [&](Part part, int count, const char* text) {
        const auto& c = expansion();
        PartWindow w{part, c.found ? c.lambda0 : inf, inf, std::nullopt, count, false,
                     c.found ? Provenance::certificate : Provenance::unavailable, text};
        if (c.found) w.lambda0 = c.lambda0;
        add(std::move(w));
    };
    auto below = [&](Part part, int count, const char* text) {
        const auto& c = compression();
        PartWindow w{part, 0.0, c.found ? c.lambda0 : 0.0, std::nullopt, count, false,
                     c.found ? Provenance::certificate : Provenance::unavailable, text};
        if (c.found) w.lambda0 = c.lambda0;
        add(std::move(w));
    };

    if (zero0 || zeroI) above(Part::T2a, 1, "a nontrivial solution exists for lambda > lambda0");
    if (inf0 || infI) below(Part::T2b, 1, "a nontrivial solution exists for 0 < lambda < lambda0");
    if (zero0 && zeroI) above(Part::T2c, 2, "two nontrivial solutions exist for lambda > lambda0");
    if (inf0 && infI) below(Part::T2d, 2, "two nontrivial solutions exist for 0 < lambda < lambda0");

    const bool all_bounded = rep.f0.is_bounded() && rep.g0.is_bounded() && rep.f_inf.is_bounded() &&
                             rep.g_inf.is_bounded();
    const bool all_positive = rep.f0.is_positive() && rep.g0.is_positive() &&
                              rep.f_inf.is_positive() && rep.g_inf.is_positive();
    if (all_bounded) {
        const WindowEstimate e = nonexistence_window(p, Part::T2e);
        add({Part::T2e, 0.0, e.lambda0_conservative, e.lambda0, 0, true, Provenance::grid_constant,
             "no nontrivial solution for 0 < lambda < lambda0"});
    }
    if (all_positive) {
        const WindowEstimate e = nonexistence_window(p, Part::T2f);
        add({Part::T2f, e.lambda0_conservative, inf, e.lambda0, 0, true, Provenance::grid_constant,
             "no nontrivial solution for lambda > lambda0"});
    }
    return rep;
}

} // namespace ma_radial
