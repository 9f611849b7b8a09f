#include "ma_radial/solver.hpp"

#include "ma_radial/error.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

namespace ma_radial {

void SolverConfig::validate() const {
    if (!(tol_residual > 0.0)) throw DomainError("tol_residual must be positive");
    if (max_iter < 1) throw DomainError("max_iter must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw DomainError("damping must lie in (0, 1]");
    if (!(dedupe_tol > 0.0)) throw DomainError("dedupe_tol must be positive");
    for (std::size_t i = 0; i < seed_radii.size(); ++i) {
        if (!(seed_radii[i] > 0.0)) throw DomainError("seed radii must be positive");
        if (i > 0 && !(seed_radii[i] > seed_radii[i - 1]))
            throw DomainError("seed radii must be strictly increasing");
    }
    if (alpha_box.lo1 < 0.0 || alpha_box.lo2 < 0.0 || !(alpha_box.hi1 > alpha_box.lo1) ||
        !(alpha_box.hi2 > alpha_box.lo2))
        throw DomainError("alpha box must be a nonempty rectangle in the nonnegative quadrant");
    if (shoot_seeds_per_axis < 1) throw DomainError("shoot_seeds_per_axis must be positive");
    if (shoot_coarse_intervals < 8) throw DomainError("shoot_coarse_intervals must be >= 8");
}

double SolverConfig::oracle_tolerance(double h, double amplitude) const {
    return std::max(10.0 * tol_residual, oracle_h2_coeff * h * h) * std::max(1.0, amplitude);
}

const char* to_string(SolveMethod m) {
    switch (m) {
    case SolveMethod::picard: return "picard";
    case SolveMethod::shell: return "shell";
    case SolveMethod::shoot: return "shoot";
    }
    return "?";
}

namespace {

bool all_finite(const StatePair& s) {
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!std::isfinite(s.v1[i]) || !std::isfinite(s.v2[i])) return false;
    return true;
}

void clamp_nonnegative(StatePair& s) {
    for (auto* v : {&s.v1, &s.v2})
        for (double& x : *v) x = std::max(x, 0.0);
}

double amplitude(const StatePair& s) { return std::max(sup_norm(s.v1), sup_norm(s.v2)); }

// Fills the oracle residual from a forward march seeded at the state's own center values.
void attach_oracle(const ProblemSpec& p, const RadialGrid& grid, SolveReport& rep) {
    rep.alpha1 = rep.state.v1.front();
    rep.alpha2 = rep.state.v2.front();
    try {
        const ForwardResult fw = forward_integrate(p, rep.alpha1, rep.alpha2, grid);
        rep.residual_oracle = sup_distance(fw.state, rep.state);
    } catch (const Error& e) {
        rep.residual_oracle = std::numeric_limits<double>::infinity();
        rep.note = e.what();
    }
}

void classify_components(SolveReport& rep, double dedupe_tol) {
    rep.norm = pair_norm(rep.state);
    rep.trivial = rep.norm < dedupe_tol;
    const bool z1 = sup_norm(rep.state.v1) < 0.5 * dedupe_tol;
    const bool z2 = sup_norm(rep.state.v2) < 0.5 * dedupe_tol;
    rep.half_trivial = !rep.trivial && (z1 != z2);
}

struct Mat2 {
    double a, b, c, d; // [[a, b], [c, d]]
    double det() const { return a * d - b * c; }
};

// sigma_min / sigma_max of a 2x2 matrix.
double singular_ratio(const Mat2& m) {
    const double fro2 = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
    if (fro2 == 0.0) return 0.0;
    const double det = std::fabs(m.det());
    const double disc = std::sqrt(std::max(fro2 * fro2 - 4.0 * det * det, 0.0));
    const double smax2 = 0.5 * (fro2 + disc);
    const double smin2 = std::max(0.5 * (fro2 - disc), 0.0);
    // smin2 loses precision when tiny; det / smax is the stable form.
    const double smax = std::sqrt(smax2);
    return std::min(std::sqrt(smin2), det / smax) / smax;
}

struct BoundaryEval {
    std::array<double, 2> g{};
    bool ok = false;
};

BoundaryEval boundary_map(const ProblemSpec& p, const RadialGrid& grid, const MarchOptions& opts,
                          double a1, double a2) {
    BoundaryEval out;
    try {
        const ForwardResult fw = forward_integrate(p, a1, a2, grid, opts);
        out.g = {fw.end1, fw.end2};
        out.ok = std::isfinite(fw.end1) && std::isfinite(fw.end2);
    } catch (const Error&) {
        out.ok = false;
    }
    return out;
}

double fd_step(double a) { return std::max(1e-7 * std::fabs(a), 1e-12); }

bool jacobian(const ProblemSpec& p, const RadialGrid& grid, const MarchOptions& opts, double a1,
              double a2, const std::array<double, 2>& g0, Mat2& J) {
    const double h1 = fd_step(a1), h2 = fd_step(a2);
    const BoundaryEval e1 = boundary_map(p, grid, opts, a1 + h1, a2);
    const BoundaryEval e2 = boundary_map(p, grid, opts, a1, a2 + h2);
    if (!e1.ok || !e2.ok) return false;
    J = {(e1.g[0] - g0[0]) / h1, (e2.g[0] - g0[0]) / h2, (e1.g[1] - g0[1]) / h1,
         (e2.g[1] - g0[1]) / h2};
    return true;
}

struct NewtonOutcome {
    double a1 = 0.0, a2 = 0.0;
    bool converged = false;
    bool singular = false;
    Mat2 J{};
    int iterations = 0;
};

double residual_scale(double a1, double a2) { return 1e-13 + 1e-11 * std::max(a1, a2); }

NewtonOutcome newton(const ProblemSpec& p, const RadialGrid& grid, const MarchOptions& opts,
                     double a1, double a2, int max_iter, double singular_tol) {
    NewtonOutcome out{a1, a2};
    BoundaryEval cur = boundary_map(p, grid, opts, a1, a2);
    if (!cur.ok) return out;
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it + 1;
        const double gnorm = std::max(std::fabs(cur.g[0]), std::fabs(cur.g[1]));
        Mat2 J{};
        const bool have_jacobian = jacobian(p, grid, opts, out.a1, out.a2, cur.g, J);
        if (have_jacobian) out.J = J;
        if (gnorm <= residual_scale(out.a1, out.a2)) {
            out.converged = true;
            return out;
        }
        if (!have_jacobian) return out;
        const double det = J.det();
        if (singular_ratio(J) < 1e-3 * singular_tol || det == 0.0) {
            out.singular = true;
            return out;
        }
        const double d1 = -(J.d * cur.g[0] - J.b * cur.g[1]) / det;
        const double d2 = -(-J.c * cur.g[0] + J.a * cur.g[1]) / det;

        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
            const double n1 = std::max(out.a1 + t * d1, 0.0);
            const double n2 = std::max(out.a2 + t * d2, 0.0);
            const BoundaryEval trial = boundary_map(p, grid, opts, n1, n2);
            if (!trial.ok) continue;
            const double tn = std::max(std::fabs(trial.g[0]), std::fabs(trial.g[1]));
            if (tn < (1.0 - 1e-4 * t) * gnorm || tn <= residual_scale(n1, n2)) {
                out.a1 = n1;
                out.a2 = n2;
                cur = trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) return out;
    }
    const double gnorm = std::max(std::fabs(cur.g[0]), std::fabs(cur.g[1]));
    out.converged = gnorm <= residual_scale(out.a1, out.a2);
    return out;
}

std::vector<double> seed_axis(double lo, double hi, int n) {
    std::vector<double> axis(static_cast<std::size_t>(n));
    if (n == 1) {
        axis[0] = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        return axis;
    }
    const bool geometric = lo > 0.0 && hi / lo > 100.0;
    for (int i = 0; i < n; ++i) {
        const double t = double(i) / (n - 1);
        axis[static_cast<std::size_t>(i)] =
            geometric ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    }
    return axis;
}

// Keeps the lower-residual report when two lie within `tol` in the pair norm.
void dedupe(std::vector<SolveReport>& reports, double tol) {
    std::sort(reports.begin(), reports.end(),
              [](const SolveReport& a, const SolveReport& b) { return a.norm < b.norm; });
    std::vector<SolveReport> kept;
    for (auto& r : reports) {
        auto dup = std::find_if(kept.begin(), kept.end(), [&](const SolveReport& k) {
            return pair_distance(k.state, r.state) < tol;
        });
        if (dup == kept.end()) {
            kept.push_back(std::move(r));
        } else if (r.residual_fixed_point < dup->residual_fixed_point) {
            *dup = std::move(r);
        }
    }
    reports = std::move(kept);
}

} // namespace

SolveReport picard_solve(const ProblemSpec& p, const RadialGrid& grid, const StatePair& initial,
                         const SolverConfig& cfg) {
    cfg.validate();
    if (initial.v1.size() != grid.size() || initial.v2.size() != grid.size())
        throw DomainError("initial state length does not match grid");

    StatePair s = initial;
    clamp_nonnegative(s);
    SolveReport rep;
    rep.method = SolveMethod::picard;
    rep.state = s;
    rep.residual_fixed_point = std::numeric_limits<double>::infinity();

    double damping = cfg.damping;
    double prev_res = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= cfg.max_iter; ++k) {
        StatePair Ts;
        try {
            Ts = apply_T(p, grid, s);
        } catch (const InvalidNonlinearity& e) {
            rep.diverged = true;
            rep.note = e.what();
            break;
        }
        rep.iterations = k;
        if (!all_finite(Ts)) {
            rep.diverged = true;
            rep.note = "non-finite iterate";
            break;
        }
        const double res = sup_distance(Ts, s);
        if (res < rep.residual_fixed_point) {
            rep.residual_fixed_point = res;
            rep.state = s;
        }
        if (res <= cfg.tol_residual) {
            rep.converged = true;
            break;
        }
        if (res > prev_res && damping == 1.0) damping = 0.5;
        prev_res = res;

        for (std::size_t i = 0; i < s.size(); ++i) {
            s.v1[i] = (1.0 - damping) * s.v1[i] + damping * Ts.v1[i];
            s.v2[i] = (1.0 - damping) * s.v2[i] + damping * Ts.v2[i];
        }
        clamp_nonnegative(s);
        if (pair_norm(s) > 1e15) {
            rep.diverged = true;
            rep.note = "iterate norm exceeded 1e15";
            break;
        }
    }
    classify_components(rep, cfg.dedupe_tol);
    attach_oracle(p, grid, rep);
    return rep;
}

namespace {

struct March {
    std::vector<double> x1, x2; // unclamped values at grid nodes
    std::optional<double> crossing1, crossing2;
};

March march(const ProblemSpec& p, double alpha1, double alpha2, const RadialGrid& grid, int substeps,
            bool odd) {
    const std::size_t n = grid.size();
    const int N = p.N;
    const double inv_N = 1.0 / N;
    auto weight = [N](double t) { return N == 1 ? 1.0 : N * std::pow(t, N - 1); };
    auto slope = [&](double inner) {
        if (odd) return -std::copysign(std::pow(p.lambda * std::fabs(inner), inv_N), inner);
        return -std::pow(p.lambda * std::max(inner, 0.0), inv_N);
    };
    auto extend = [odd](const Nonlinearity& nl, double x) {
        if (x >= 0.0) return nl(x);
        return odd ? -nl(-x) : nl(0.0);
    };
    auto source_f = [&](double x) { return extend(p.f, x); };
    auto source_g = [&](double x) { return extend(p.g, x); };

    March out;
    out.x1.resize(n);
    out.x2.resize(n);
    double x1 = alpha1, x2 = alpha2;
    double I1 = 0.0, I2 = 0.0; // inner integrals without lambda
    double d1 = 0.0, d2 = 0.0; // v' at the current point
    double q1 = weight(0.0) * source_f(x2);
    double q2 = weight(0.0) * source_g(x1);
    out.x1[0] = x1;
    out.x2[0] = x2;

    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double h = (grid[j + 1] - grid[j]) / substeps;
        for (int sub = 0; sub < substeps; ++sub) {
            const double r0 = grid[j] + h * sub;
            const double r1 = sub + 1 == substeps ? grid[j + 1] : r0 + h;
            const double w = weight(r1);
            // Implicit trapezoid, solved by fixed-point correction from an Euler predictor.
            double y1 = x1 + h * d1, y2 = x2 + h * d2;
            double J1 = I1, J2 = I2, e1 = d1, e2 = d2, s1 = q1, s2 = q2;
            for (int it = 0; it < 50; ++it) {
                s1 = w * source_f(y2);
                s2 = w * source_g(y1);
                J1 = I1 + 0.5 * h * (q1 + s1);
                J2 = I2 + 0.5 * h * (q2 + s2);
                e1 = slope(J1);
                e2 = slope(J2);
                const double n1 = x1 + 0.5 * h * (d1 + e1);
                const double n2 = x2 + 0.5 * h * (d2 + e2);
                const double change = std::max(std::fabs(n1 - y1), std::fabs(n2 - y2));
                y1 = n1;
                y2 = n2;
                if (change <= 1e-15 * (1.0 + std::max(std::fabs(y1), std::fabs(y2)))) break;
            }
            if (!std::isfinite(y1) || !std::isfinite(y2))
                throw InvalidNonlinearity("non-finite integrand during forward integration");
            if (!out.crossing1 && x1 > 0.0 && y1 <= 0.0) out.crossing1 = r0 + h * x1 / (x1 - y1);
            if (!out.crossing2 && x2 > 0.0 && y2 <= 0.0) out.crossing2 = r0 + h * x2 / (x2 - y2);
            x1 = y1;
            x2 = y2;
            I1 = J1;
            I2 = J2;
            d1 = e1;
            d2 = e2;
            q1 = s1;
            q2 = s2;
        }
        out.x1[j + 1] = x1;
        out.x2[j + 1] = x2;
    }
    return out;
}

} // namespace

ForwardResult forward_integrate(const ProblemSpec& p, double alpha1, double alpha2,
                                const RadialGrid& grid, const MarchOptions& opts) {
    if (!(alpha1 >= 0.0) || !(alpha2 >= 0.0)) throw DomainError("center values must be >= 0");
    if (opts.substeps < 1) throw DomainError("substeps must be >= 1");
    March m = march(p, alpha1, alpha2, grid, opts.substeps, opts.odd_extension);
    if (opts.richardson) {
        const March fine = march(p, alpha1, alpha2, grid, 2 * opts.substeps, opts.odd_extension);
        for (std::size_t i = 0; i < m.x1.size(); ++i) {
            m.x1[i] = (4.0 * fine.x1[i] - m.x1[i]) / 3.0;
            m.x2[i] = (4.0 * fine.x2[i] - m.x2[i]) / 3.0;
        }
        m.crossing1 = fine.crossing1;
        m.crossing2 = fine.crossing2;
    }
    ForwardResult out;
    out.state = StatePair::zeros(grid.size());
    for (std::size_t i = 0; i < m.x1.size(); ++i) {
        out.state.v1[i] = std::max(m.x1[i], 0.0);
        out.state.v2[i] = std::max(m.x2[i], 0.0);
    }
    out.end1 = m.x1.back();
    out.end2 = m.x2.back();
    out.crossing1 = m.crossing1;
    out.crossing2 = m.crossing2;
    return out;
}

ShootResult boundary_shoot(const ProblemSpec& p, const AlphaBox& box, const SolverConfig& cfg,
                           const RadialGrid& grid) {
    SolverConfig checked = cfg;
    checked.alpha_box = box;
    checked.validate();

    const int coarse_M = std::min(cfg.shoot_coarse_intervals, grid.intervals());
    const RadialGrid coarse = RadialGrid::uniform(coarse_M);

    ShootResult out;
    std::vector<std::array<double, 2>> coarse_roots;
    const auto ax1 = seed_axis(box.lo1, box.hi1, cfg.shoot_seeds_per_axis);
    const auto ax2 = seed_axis(box.lo2, box.hi2, cfg.shoot_seeds_per_axis);
    for (double s1 : ax1) {
        for (double s2 : ax2) {
            const NewtonOutcome nw = newton(p, coarse, MarchOptions::single(), s1, s2, cfg.newton_max_iter, cfg.singular_tol);
            if (nw.singular) {
                ++out.singular_seeds;
                continue;
            }
            if (!nw.converged) {
                ++out.failed_seeds;
                continue;
            }
            const bool seen = std::any_of(coarse_roots.begin(), coarse_roots.end(), [&](const auto& r) {
                const double scale = std::max({1e-9, std::fabs(r[0]), std::fabs(r[1])});
                return std::max(std::fabs(r[0] - nw.a1), std::fabs(r[1] - nw.a2)) <= 1e-6 * scale;
            });
            if (!seen) coarse_roots.push_back({nw.a1, nw.a2});
        }
    }

    for (const auto& root : coarse_roots) {
        const NewtonOutcome fine = newton(p, grid, MarchOptions{}, root[0], root[1], cfg.newton_max_iter, cfg.singular_tol);
        if (!fine.converged) {
            ++out.failed_seeds;
            continue;
        }
        SolveReport rep;
        rep.method = SolveMethod::shoot;
        rep.iterations = fine.iterations;
        rep.alpha1 = fine.a1;
        rep.alpha2 = fine.a2;
        const ForwardResult fw = forward_integrate(p, fine.a1, fine.a2, grid);
        rep.state = fw.state;
        rep.residual_oracle = std::max(std::fabs(fw.end1), std::fabs(fw.end2));
        rep.state.v1.back() = 0.0;
        rep.state.v2.back() = 0.0;
        rep.residual_fixed_point = sup_distance(apply_T(p, grid, rep.state), rep.state);
        rep.converged = true;
        rep.degenerate = singular_ratio(fine.J) < cfg.singular_tol;
        classify_components(rep, cfg.dedupe_tol);
        out.roots.push_back(std::move(rep));
    }
    dedupe(out.roots, cfg.dedupe_tol);
    return out;
}

ShellSample shell_ratio(const ProblemSpec& p, const RadialGrid& grid, double rho, const StatePair* warm) {
    if (!(rho > 0.0)) throw DomainError("shell radius must be positive");
    ShellSample out;
    out.rho = rho;
    StatePair w = shell_seed(grid, rho);
    if (warm != nullptr && pair_norm(*warm) > 0.0) {
        w = *warm;
        const double scale = rho / pair_norm(w);
        for (auto* v : {&w.v1, &w.v2})
            for (double& x : *v) x *= scale;
    }
    for (int it = 0; it < 400; ++it) {
        StatePair Tw = apply_T(p, grid, w);
        const double n = pair_norm(Tw);
        if (!(n > 0.0) || !std::isfinite(n)) {
            out.ratio = std::isfinite(n) ? 0.0 : std::numeric_limits<double>::infinity();
            out.shape = w;
            return out;
        }
        const double scale = rho / n;
        for (auto* v : {&Tw.v1, &Tw.v2})
            for (double& x : *v) x *= scale;
        const double change = sup_distance(Tw, w);
        w = std::move(Tw);
        if (change <= 1e-14 * rho) break;
    }
    out.ratio = pair_norm(apply_T(p, grid, w)) / rho;
    out.shape = std::move(w);
    return out;
}

MultiStartResult multi_start(const ProblemSpec& p, const RadialGrid& grid, const SolverConfig& cfg) {
    cfg.validate();
    if (cfg.seed_radii.empty()) throw DomainError("multi_start needs at least one seed radius");
    MultiStartResult out;
    std::vector<SolveReport> candidates;

    for (double r : cfg.seed_radii) {
        SolveReport rep = picard_solve(p, grid, shell_seed(grid, r), cfg);
        out.attempts.push_back({r, SolveMethod::picard, rep.converged, rep.trivial,
                                rep.residual_fixed_point, rep.note});
        if (rep.converged && !rep.trivial) candidates.push_back(std::move(rep));
    }

    // Shell scan: a sign change of ratio - 1 between adjacent shells brackets a fixed point.
    std::vector<double> radii = cfg.seed_radii;
    for (int k = 0; k < cfg.shell_extensions; ++k) {
        radii.insert(radii.begin(), radii.front() / 8.0);
        radii.push_back(radii.back() * 8.0);
    }
    std::vector<ShellSample> samples;
    samples.reserve(radii.size());
    try {
        for (double r : radii) {
            samples.push_back(shell_ratio(p, grid, r, samples.empty() ? nullptr : &samples.back().shape));
        }
    } catch (const Error& e) {
        out.attempts.push_back({0.0, SolveMethod::shell, false, false, 0.0, e.what()});
    }

    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const double g_lo = samples[i].ratio - 1.0;
        const double g_hi = samples[i + 1].ratio - 1.0;
        if (!std::isfinite(g_lo) || !std::isfinite(g_hi) || g_lo * g_hi > 0.0 || g_lo == g_hi) continue;
        StatePair warm = samples[i].shape;
        ShellSample last;
        auto phi = [&](double log_rho) {
            last = shell_ratio(p, grid, std::exp(log_rho), &warm);
            warm = last.shape;
            return last.ratio - 1.0;
        };
        SeedAttempt attempt{samples[i].rho, SolveMethod::shell, false, false, 0.0, {}};
        try {
            std::uintmax_t max_iter = 200;
            const auto bracket = boost::math::tools::toms748_solve(
                phi, std::log(samples[i].rho), std::log(samples[i + 1].rho), g_lo, g_hi,
                boost::math::tools::eps_tolerance<double>(50), max_iter);
            const double log_rho = 0.5 * (bracket.first + bracket.second);
            phi(log_rho);
            SolveReport rep;
            rep.method = SolveMethod::shell;
            rep.state = last.shape;
            rep.iterations = static_cast<int>(max_iter);
            rep.residual_fixed_point = sup_distance(apply_T(p, grid, rep.state), rep.state);
            rep.converged = rep.residual_fixed_point <= cfg.tol_residual;
            classify_components(rep, cfg.dedupe_tol);
            attach_oracle(p, grid, rep);
            attempt.converged = rep.converged;
            attempt.trivial = rep.trivial;
            attempt.residual = rep.residual_fixed_point;
            if (rep.converged && !rep.trivial) candidates.push_back(std::move(rep));
        } catch (const std::exception& e) {
            attempt.note = e.what();
        }
        out.attempts.push_back(std::move(attempt));
    }

    const double h = grid.max_spacing();
    for (auto& c : candidates) {
        if (c.residual_oracle <= cfg.oracle_tolerance(h, amplitude(c.state))) {
            out.solutions.push_back(std::move(c));
        } else {
            out.attempts.push_back({c.norm, c.method, false, false, c.residual_fixed_point,
                                    "rejected by forward-integration oracle"});
        }
    }
    dedupe(out.solutions, cfg.dedupe_tol);
    return out;
}

TrivialLinearization trivial_linearization(const ProblemSpec& p, const RadialGrid& grid, double probe) {
    TrivialLinearization out;
    if (p.f(0.0) != 0.0 || p.g(0.0) != 0.0) return out;
    out.applicable = true;
    // Difference quotients about (probe, probe) on the odd continuation, so trajectories
    // that change sign stay on the linearized branch.
    MarchOptions opts;
    opts.odd_extension = true;
    const double h = 0.5 * probe;
    const ForwardResult c0 = forward_integrate(p, probe, probe, grid, opts);
    const ForwardResult c1 = forward_integrate(p, probe + h, probe, grid, opts);
    const ForwardResult c2 = forward_integrate(p, probe, probe + h, grid, opts);
    const Mat2 J{(c1.end1 - c0.end1) / h, (c2.end1 - c0.end1) / h, (c1.end2 - c0.end2) / h,
                 (c2.end2 - c0.end2) / h};
    out.det = J.det();
    out.min_singular_ratio = singular_ratio(J);
    return out;
}

} // namespace ma_radial
