#include "ma_radial/sweep.hpp"

#include "ma_radial/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <thread>

namespace ma_radial {

namespace {

double amplitude(const StatePair& s) { return std::max(sup_norm(s.v1), sup_norm(s.v2)); }

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += "; ";
        out += p;
    }
    return out;
}

std::optional<int> count_at(const ProblemTemplate& t, double lambda, const RadialGrid& grid,
                            const SolverConfig& cfg) {
    return evaluate_lambda(t, lambda, grid, cfg).count;
}

int sign_at(const ProblemTemplate& t, double lambda, const RadialGrid& grid) {
    return trivial_linearization(t.at(lambda), grid).sign();
}

} // namespace

const char* to_string(ThresholdKind k) {
    return k == ThresholdKind::count ? "count" : "linearization";
}

unsigned worker_count(unsigned requested) {
    unsigned n = requested;
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MA_RADIAL_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

SweepPoint evaluate_lambda(const ProblemTemplate& t, double lambda, const RadialGrid& grid,
                           const SolverConfig& cfg) {
    SweepPoint pt;
    pt.lambda = lambda;
    std::vector<std::string> undetermined;
    try {
        const ProblemSpec p = t.at(lambda);
        const double h = grid.max_spacing();

        const TrivialLinearization lin = trivial_linearization(p, grid);
        if (lin.applicable) {
            pt.linearization_sign = lin.sign();
            if (lin.min_singular_ratio < cfg.singular_tol)
                undetermined.push_back("trivial state is degenerate (singular linearization)");
        }

        const ShootResult shoot = boundary_shoot(p, cfg.alpha_box, cfg, grid);
        std::vector<const SolveReport*> roots;
        for (const auto& r : shoot.roots) {
            if (r.trivial) continue;
            if (r.degenerate) {
                undetermined.push_back("singular boundary-map Jacobian at a root");
                continue;
            }
            if (r.residual_fixed_point > cfg.oracle_tolerance(h, amplitude(r.state))) {
                undetermined.push_back("shoot root fails the fixed-point check");
                continue;
            }
            roots.push_back(&r);
            pt.solutions.push_back({r.norm, r.alpha1, r.alpha2, r.half_trivial});
        }

        const MultiStartResult ms = multi_start(p, grid, cfg);
        pt.picard_solutions = static_cast<int>(ms.solutions.size());
        for (const auto& s : ms.solutions) {
            const double tol = cfg.dedupe_tol * std::max(1.0, amplitude(s.state));
            const bool embedded = std::any_of(roots.begin(), roots.end(), [&](const SolveReport* r) {
                return pair_distance(r->state, s.state) <= tol;
            });
            if (!embedded) {
                std::ostringstream os;
                os << "multi_start solution of norm " << s.norm << " has no matching shoot root";
                undetermined.push_back(os.str());
            }
        }
        if (undetermined.empty()) pt.count = static_cast<int>(pt.solutions.size());
    } catch (const std::exception& e) {
        undetermined.push_back(e.what());
    }
    pt.note = join(undetermined);
    return pt;
}

Threshold threshold_bisect(const ProblemTemplate& t, double lo, double hi, const RadialGrid& grid,
                           const SolverConfig& cfg, double tol_lambda, Detector detector) {
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("bracket must satisfy 0 < lo < hi");
    if (!(tol_lambda > 0.0)) throw DomainError("tol_lambda must be positive");

    Threshold th;
    std::optional<int> c_lo, c_hi;
    if (detector != Detector::linearization) {
        c_lo = count_at(t, lo, grid, cfg);
        c_hi = count_at(t, hi, grid, cfg);
    }
    const bool count_changes = c_lo && c_hi && *c_lo != *c_hi;
    int s_lo = 0, s_hi = 0;
    if (detector == Detector::linearization || (detector == Detector::automatic && !count_changes)) {
        s_lo = sign_at(t, lo, grid);
        s_hi = sign_at(t, hi, grid);
    }
    const bool sign_changes = s_lo != 0 && s_hi != 0 && s_lo != s_hi;

    if (detector == Detector::count || (detector == Detector::automatic && count_changes)) {
        if (!count_changes) throw DomainError("solution counts at the bracket ends do not differ");
        th.kind = ThresholdKind::count;
        while (hi - lo > tol_lambda) {
            const double mid = 0.5 * (lo + hi);
            const std::optional<int> c = count_at(t, mid, grid, cfg);
            if (c && *c == *c_lo) {
                lo = mid;
                continue;
            }
            // Keep the first change point; a third value means counts are not monotone here.
            if (c && *c != *c_hi) th.non_monotone = true;
            hi = mid;
        }
    } else {
        if (!sign_changes)
            throw DomainError("neither the solution count nor the trivial-state determinant changes across the bracket");
        th.kind = ThresholdKind::linearization;
        while (hi - lo > tol_lambda) {
            const double mid = 0.5 * (lo + hi);
            const int s = sign_at(t, mid, grid);
            if (s == s_lo) lo = mid;
            else hi = mid;
        }
    }
    th.lo = lo;
    th.hi = hi;
    th.lambda_star = 0.5 * (lo + hi);
    th.refined = true;
    return th;
}

SweepReport lambda_sweep(const ProblemTemplate& t, const std::vector<double>& lambdas,
                         const RadialGrid& grid, const SolverConfig& cfg, const SweepOptions& opts) {
    if (lambdas.empty()) throw DomainError("lambda grid is empty");
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0) || !std::isfinite(lambdas[i])) throw DomainError("lambda values must be positive");
        if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw DomainError("lambda values must be increasing");
    }
    cfg.validate();

    SweepReport rep;
    rep.lambdas = lambdas;
    try {
        rep.regime = classify(t.at(lambdas.front()));
    } catch (const Error&) {
        // Undetermined limits: counts are still charted, without certified ranges.
    }

    std::vector<SweepPoint> points(lambdas.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < lambdas.size(); i = next++)
            points[i] = evaluate_lambda(t, lambdas[i], grid, cfg);
    };
    const unsigned n = std::min<unsigned>(worker_count(opts.threads), static_cast<unsigned>(lambdas.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned k = 1; k < n; ++k) pool.emplace_back(work);
        work();
    }

    for (const auto& pt : points) {
        rep.counts.push_back(pt.count);
        rep.solutions.push_back(pt.solutions);
        rep.notes.push_back(pt.note);
    }

    // The trivial-state determinant is +1 near lambda = 0; only its first flip to -1 is the
    // principal crossing where positive solutions bifurcate. Later flips belong to
    // sign-changing modes.
    bool principal_seen = false;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const auto& a = points[i];
        const auto& b = points[i + 1];
        if (a.linearization_sign < 0) principal_seen = true;
        std::optional<Detector> det;
        if (a.count && b.count && *a.count != *b.count) det = Detector::count;
        else if (!principal_seen && a.linearization_sign > 0 && b.linearization_sign < 0)
            det = Detector::linearization;
        if (!det) continue;
        Threshold th;
        th.kind = *det == Detector::count ? ThresholdKind::count : ThresholdKind::linearization;
        th.lo = a.lambda;
        th.hi = b.lambda;
        th.lambda_star = 0.5 * (a.lambda + b.lambda);
        if (opts.bisect) th = threshold_bisect(t, a.lambda, b.lambda, grid, cfg, opts.tol_lambda, *det);
        rep.thresholds.push_back(th);
    }

    if (rep.regime) {
        for (const auto& pt : points) {
            if (!pt.count) continue;
            const auto [min, max] = rep.regime->predicted_count(pt.lambda);
            if (*pt.count < min || (max >= 0 && *pt.count > max)) {
                std::ostringstream os;
                os << "lambda=" << pt.lambda << ": count " << *pt.count << " outside the certified range ["
                   << min << ", " << (max < 0 ? std::string("inf") : std::to_string(max)) << "]";
                rep.violations.push_back(os.str());
            }
        }
    }
    return rep;
}

} // namespace ma_radial
