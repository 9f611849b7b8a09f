#include "ma_radial/radial_operator.hpp"

#include "ma_radial/error.hpp"
#include "ma_radial/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ma_radial {

namespace {

// Lagrange weights at t for the (up to) four nodes starting at `first`.
RadialGrid::Sample make_sample(std::span<const double> nodes, std::size_t panel, double t,
                               Interpolation interp) {
    RadialGrid::Sample smp;
    smp.t = t;
    if (interp == Interpolation::linear) {
        const double a = nodes[panel], b = nodes[panel + 1];
        const double u = (t - a) / (b - a);
        smp.first = panel;
        smp.w = {1.0 - u, u, 0.0, 0.0};
        return smp;
    }
    const std::size_t last_first = nodes.size() - 4;
    smp.first = std::min(panel > 0 ? panel - 1 : 0, last_first);
    for (std::size_t k = 0; k < 4; ++k) {
        double L = 1.0;
        for (std::size_t m = 0; m < 4; ++m) {
            if (m == k) continue;
            L *= (t - nodes[smp.first + m]) / (nodes[smp.first + k] - nodes[smp.first + m]);
        }
        smp.w[k] = L;
    }
    return smp;
}

} // namespace

RadialGrid::RadialGrid(std::vector<double> nodes, QuadratureRule rule)
    : nodes_(std::move(nodes)), rule_(rule) {
    if (nodes_.size() < 9) throw DomainError("radial grid needs at least 8 intervals");
    if (nodes_.front() != 0.0 || nodes_.back() != 1.0)
        throw DomainError("radial grid must start at 0 and end at 1");
    if (rule_.refinement < 1) throw DomainError("quadrature refinement must be >= 1");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        const double h = nodes_[i] - nodes_[i - 1];
        if (!(h > 0.0)) throw DomainError("radial grid nodes must be strictly increasing");
        max_h_ = std::max(max_h_, h);
    }
    const bool has_quarters =
        std::binary_search(nodes_.begin(), nodes_.end(), 0.25) &&
        std::binary_search(nodes_.begin(), nodes_.end(), 0.75);
    if (!has_quarters) throw DomainError("radial grid must contain the nodes 1/4 and 3/4");

    const auto k = static_cast<std::size_t>(rule_.refinement);
    samples_.reserve(2 * k * (nodes_.size() - 1) + 1);
    for (std::size_t j = 0; j + 1 < nodes_.size(); ++j) {
        const double a = nodes_[j], h = (nodes_[j + 1] - a) / double(k);
        for (std::size_t i = 0; i < k; ++i) {
            const double left = i == 0 ? a : a + h * double(i);
            samples_.push_back(make_sample(nodes_, j, left, rule_.interpolation));
            samples_.push_back(make_sample(nodes_, j, left + 0.5 * h, rule_.interpolation));
        }
        // Node samples reproduce the node value exactly.
        samples_[2 * k * j] = {a, j, {1.0, 0.0, 0.0, 0.0}};
    }
    samples_.push_back({1.0, nodes_.size() - 1, {1.0, 0.0, 0.0, 0.0}});
}

RadialGrid RadialGrid::uniform(int intervals, QuadratureRule rule) {
    if (intervals < 8) throw DomainError("radial grid needs at least 8 intervals");
    std::vector<double> nodes(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i <= intervals; ++i) nodes[static_cast<std::size_t>(i)] = double(i) / intervals;
    nodes.back() = 1.0;
    const bool exact = intervals % 4 == 0;
    if (!exact) {
        nodes.push_back(0.25);
        nodes.push_back(0.75);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    }
    RadialGrid grid(std::move(nodes), rule);
    grid.uniform_ = exact;
    return grid;
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes, QuadratureRule rule) {
    return RadialGrid(std::move(nodes), rule);
}

std::string RadialGrid::rule_tag() const {
    return std::string("simpson/") + std::to_string(rule_.refinement) +
           (rule_.interpolation == Interpolation::cubic ? "/cubic" : "/linear");
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double pair_norm(const StatePair& s) { return sup_norm(s.v1) + sup_norm(s.v2); }

double sup_distance(const StatePair& a, const StatePair& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::fabs(a.v1[i] - b.v1[i]));
        d = std::max(d, std::fabs(a.v2[i] - b.v2[i]));
    }
    return d;
}

double pair_distance(const StatePair& a, const StatePair& b) {
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d1 = std::max(d1, std::fabs(a.v1[i] - b.v1[i]));
        d2 = std::max(d2, std::fabs(a.v2[i] - b.v2[i]));
    }
    return d1 + d2;
}

ProblemSpec::ProblemSpec(int dim, double lam, Nonlinearity f_, Nonlinearity g_)
    : N(dim), lambda(lam), f(std::move(f_)), g(std::move(g_)) {
    if (N < 1) throw DomainError("dimension N must be >= 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive");
}

ProblemSpec ProblemSpec::with_lambda(double lam) const { return ProblemSpec(N, lam, f, g); }

namespace {

// One component of T: `source` is the state fed to `nl` (v2 for T^1, v1 for T^2).
void apply_component(const ProblemSpec& p, const RadialGrid& grid, const Nonlinearity& nl,
                     std::span<const double> source, std::vector<double>& out) {
    const auto samples = grid.samples();
    const std::size_t m = samples.size();      // 2 * panels + 1
    const std::size_t panels = (m - 1) / 2;
    const auto k = static_cast<std::size_t>(grid.rule().refinement);
    const int N = p.N;
    const double inv_N = 1.0 / N;

    std::vector<double> q(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& smp = samples[i];
        double v = 0.0;
        for (std::size_t c = 0; c < 4 && smp.first + c < source.size(); ++c)
            v += smp.w[c] * source[smp.first + c];
        const double weight = N == 1 ? 1.0 : N * std::pow(smp.t, N - 1);
        q[i] = weight * nl(std::max(v, 0.0));
    }

    // Radicand F = (lambda I)^{1/N} at sub-nodes and sub-midpoints.
    auto root = [&](double inner) { return std::pow(p.lambda * std::max(inner, 0.0), inv_N); };
    std::vector<double> F(m);
    F[0] = 0.0;
    double inner = 0.0;
    for (std::size_t i = 0; i < panels; ++i) {
        const double h = samples[2 * i + 2].t - samples[2 * i].t;
        const double ql = q[2 * i], qm = q[2 * i + 1], qr = q[2 * i + 2];
        const double next = inner + h / 6.0 * (ql + 4.0 * qm + qr);
        const double half = inner + h / 24.0 * (5.0 * ql + 8.0 * qm - qr);
        F[2 * i + 1] = root(std::clamp(half, inner, next));
        F[2 * i + 2] = root(next);
        inner = next;
    }

    out.assign(grid.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = panels; i-- > 0;) {
        const double h = samples[2 * i + 2].t - samples[2 * i].t;
        acc += h / 6.0 * (F[2 * i] + 4.0 * F[2 * i + 1] + F[2 * i + 2]);
        if (i % k == 0) out[i / k] = acc;
    }
    out.back() = 0.0;
}

void check_state(const RadialGrid& grid, const StatePair& s) {
    if (s.v1.size() != grid.size() || s.v2.size() != grid.size())
        throw DomainError("state length does not match grid");
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(s.v1[i] >= 0.0) || !(s.v2[i] >= 0.0))
            throw DomainError("state has a negative or NaN entry at node " + std::to_string(i));
    }
}

} // namespace

StatePair apply_T(const ProblemSpec& p, const RadialGrid& grid, const StatePair& s) {
    check_state(grid, s);
    StatePair out;
    apply_component(p, grid, p.f, s.v2, out.v1);
    apply_component(p, grid, p.g, s.v1, out.v2);
    return out;
}

double gamma_constant(int N, double tol) {
    if (N < 1) throw DomainError("dimension N must be >= 1");
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    const double a_pow = std::pow(0.25, N);
    const double inv_N = 1.0 / N;
    auto integrand = [&](double s) { return std::pow(std::max(std::pow(s, N) - a_pow, 0.0), inv_N); };
    return 0.25 * adaptive_simpson(integrand, 0.25, 0.75, 4.0 * tol, 60).value;
}

ConeReport cone_check(const StatePair& s, const RadialGrid& grid, double tol, const ConeShape& shape) {
    if (s.v1.size() != grid.size() || s.v2.size() != grid.size())
        throw DomainError("state length does not match grid");
    ConeReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    rep.concavity_margin = std::numeric_limits<double>::infinity();
    for (const auto* v : {&s.v1, &s.v2}) {
        const double norm = sup_norm(*v);
        double inner_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid[i];
            const double x = (*v)[i];
            rep.worst_margin = std::min(rep.worst_margin, x);
            if (t >= shape.inner_lo && t <= shape.inner_hi) inner_min = std::min(inner_min, x);
            rep.concavity_margin = std::min(rep.concavity_margin, x - std::min(t, 1.0 - t) * norm);
        }
        rep.worst_margin = std::min(rep.worst_margin, inner_min - shape.fraction * norm);
    }
    rep.member = rep.worst_margin >= -tol;
    return rep;
}

WeakBounds weak_bounds(const ProblemSpec& p, double r, int resolution) {
    if (!(r > 0.0)) throw DomainError("shell radius must be positive");
    if (resolution < 2) throw DomainError("resolution must be >= 2");
    WeakBounds wb;
    wb.m_hat = std::numeric_limits<double>::infinity();
    const double lo = r / 8.0;
    for (int i = 0; i <= resolution; ++i) {
        const double t = lo + (r - lo) * i / resolution;
        wb.m_hat = std::min(wb.m_hat, std::min(p.f(t), p.g(t)));
    }
    const Nonlinearity sum = Nonlinearity::custom(
        [&p](double t) { return p.f(t) + p.g(t); }, "f+g");
    wb.M_hat = envelope(sum, r, resolution);

    const double scale = std::pow(p.lambda, 1.0 / p.N);
    wb.lower = 4.0 * scale * gamma_constant(p.N) * std::pow(wb.m_hat, 1.0 / p.N);
    wb.upper = 2.0 * scale * std::pow(wb.M_hat, 1.0 / p.N);
    return wb;
}

StatePair shell_seed(const RadialGrid& grid, double r) {
    StatePair s = StatePair::zeros(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) s.v1[i] = s.v2[i] = 0.5 * r * (1.0 - grid[i]);
    return s;
}

} // namespace ma_radial
