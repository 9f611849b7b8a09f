#include "ma_radial/error.hpp"
#include "ma_radial/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace ma_radial;

namespace {

const RadialGrid& grid512() {
    static const RadialGrid g = RadialGrid::uniform(512);
    return g;
}

ProblemSpec constant_problem(int N, double lambda, double c = 1.0) {
    return ProblemSpec(N, lambda, Nonlinearity::constant(c), Nonlinearity::constant(c));
}

// v(1) for -v'' = lambda h(v), v(0) = alpha, v'(0) = 0, by RK4; non-finite runs count as negative.
double endpoint_rk4(const std::function<double(double)>& h, double lambda, double alpha, int steps = 20000) {
    double v = alpha, w = 0.0;
    const double dt = 1.0 / steps;
    auto acc = [&](double x) { return -lambda * h(x); };
    for (int i = 0; i < steps; ++i) {
        const double k1v = w, k1w = acc(v);
        const double k2v = w + 0.5 * dt * k1w, k2w = acc(v + 0.5 * dt * k1v);
        const double k3v = w + 0.5 * dt * k2w, k3w = acc(v + 0.5 * dt * k2v);
        const double k4v = w + dt * k3w, k4w = acc(v + dt * k3v);
        v += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
        w += dt / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
        if (!std::isfinite(v)) return -1.0;
    }
    return v;
}

// Symmetric center value by bisection on the sign of v(1).
double symmetric_root(const std::function<double(double)>& h, double lambda, double lo, double hi) {
    double flo = endpoint_rk4(h, lambda, lo);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = endpoint_rk4(h, lambda, mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double amplitude(const StatePair& s) { return std::max(sup_norm(s.v1), sup_norm(s.v2)); }

} // namespace

TEST_CASE("config validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.damping = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.seed_radii = {1.0, 0.5};
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = {};
    cfg.tol_residual = 0.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("Picard on a constant map converges to 1 - r^2") {
    const RadialGrid& g = grid512();
    const SolveReport rep = picard_solve(constant_problem(1, 2.0), g, shell_seed(g, 3.0), SolverConfig{});
    CHECK(rep.converged);
    CHECK(rep.iterations <= 2);
    CHECK(rep.residual_fixed_point <= 1e-10);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        err = std::max({err, std::fabs(rep.state.v1[i] - (1 - g[i] * g[i])), std::fabs(rep.state.v2[i] - (1 - g[i] * g[i]))});
    CHECK(err <= 1e-10);
    CHECK(rep.norm == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("Picard from zero keeps the trivial solution") {
    const RadialGrid& g = grid512();
    const ProblemSpec p(1, 3.0, Nonlinearity::power(2), Nonlinearity::ratio_bump());
    const SolveReport rep = picard_solve(p, g, StatePair::zeros(g.size()), SolverConfig{});
    CHECK(rep.converged);
    CHECK(rep.trivial);
    CHECK(rep.residual_fixed_point == 0.0);
}

TEST_CASE("Picard reports divergence for a supercritical linear map") {
    const RadialGrid& g = grid512();
    const ProblemSpec p(1, 40.0, Nonlinearity::linear(), Nonlinearity::linear());
    const SolveReport rep = picard_solve(p, g, shell_seed(g, 1.0), SolverConfig{});
    CHECK_FALSE(rep.converged);
    CHECK(rep.diverged);
}

TEST_CASE("constant nonlinearity: center value (lambda c)^{1/N} / 2") {
    const RadialGrid& g = grid512();
    for (int N : {1, 2, 3}) {
        const double lambda = 1.7, c = 0.6;
        SolverConfig cfg;
        cfg.seed_radii = {0.5, 4.0};
        const MultiStartResult ms = multi_start(constant_problem(N, lambda, c), g, cfg);
        REQUIRE(ms.solutions.size() == 1);
        CHECK(ms.solutions[0].state.v1[0] == doctest::Approx(0.5 * std::pow(lambda * c, 1.0 / N)).epsilon(1e-10));
    }
}

TEST_CASE("forward integration closed forms") {
    const RadialGrid& g = grid512();
    {
        const ForwardResult fw = forward_integrate(constant_problem(1, 1.0), 0.5, 0.5, g);
        CHECK(std::fabs(fw.end1) <= 1e-13);
        CHECK(std::fabs(fw.end2) <= 1e-13);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(fw.state.v1[i] == doctest::Approx(0.5 - 0.5 * g[i] * g[i]));
    }
    {
        const ProblemSpec p(1, 2.0, Nonlinearity::linear(), Nonlinearity::ratio_bump());
        const ForwardResult fw = forward_integrate(p, 0.0, 0.0, g);
        CHECK(fw.end1 == 0.0);
        CHECK(amplitude(fw.state) == 0.0);
    }
    CHECK_THROWS_AS(forward_integrate(constant_problem(1, 1.0), -1.0, 0.0, g), DomainError);
}

TEST_CASE("eigenfunction march and oracle constant calibration") {
    const RadialGrid& g = grid512();
    const double h = g.max_spacing();
    const ProblemSpec p(1, M_PI * M_PI / 4.0, Nonlinearity::linear(), Nonlinearity::linear());
    const ForwardResult fw = forward_integrate(p, 1.0, 1.0, g);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::fabs(fw.state.v1[i] - std::cos(0.5 * M_PI * g[i])));
    CHECK(std::fabs(fw.end1) <= h * h);
    CHECK(err <= h * h);
    // The calibrated constant stays below the configured one, so the oracle bound is conservative.
    const double C = err / (h * h);
    MESSAGE("calibrated oracle constant C = ", C);
    CHECK(C <= SolverConfig{}.oracle_h2_coeff);
}

TEST_CASE("square nonlinearity: Picard, shoot and an independent 1-D oracle agree") {
    const RadialGrid& g = grid512();
    const ProblemSpec p(1, 1.0, Nonlinearity::power(2), Nonlinearity::power(2));
    const double alpha = symmetric_root([](double v) { return v * v; }, 1.0, 0.1, 50.0);

    const ShootResult shoot = boundary_shoot(p, AlphaBox::square(0.1, 50.0), SolverConfig{}, g);
    int nontrivial = 0;
    for (const auto& r : shoot.roots) {
        if (r.trivial) continue;
        ++nontrivial;
        CHECK(r.alpha1 == doctest::Approx(r.alpha2).epsilon(1e-9));
        CHECK(r.alpha1 == doctest::Approx(alpha).epsilon(1e-7));
        CHECK(r.residual_fixed_point <= 1e-6);
    }
    CHECK(nontrivial >= 1);

    SolverConfig cfg;
    const MultiStartResult ms = multi_start(p, g, cfg);
    REQUIRE(ms.solutions.size() == 1);
    const SolveReport& s = ms.solutions[0];
    CHECK(s.state.v1[0] == doctest::Approx(alpha).epsilon(1e-7));
    CHECK(s.residual_oracle <= 1e-6);
    CHECK(cone_check(s.state, g).member);
}

TEST_CASE("boundary_shoot examples") {
    const RadialGrid& g = grid512();
    const ShootResult c = boundary_shoot(constant_problem(1, 2.0), AlphaBox{}, SolverConfig{}, g);
    REQUIRE(c.roots.size() == 1);
    CHECK(c.roots[0].alpha1 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(c.roots[0].alpha2 == doctest::Approx(1.0).epsilon(1e-10));

    const ProblemSpec lin(1, 1.0, Nonlinearity::linear(), Nonlinearity::linear());
    const ShootResult l = boundary_shoot(lin, AlphaBox{}, SolverConfig{}, g);
    for (const auto& r : l.roots) CHECK(r.trivial);
}

TEST_CASE("multi_start examples") {
    const RadialGrid& g = grid512();
    SolverConfig cfg;
    cfg.seed_radii = {0.5, 1.0, 4.0};
    const MultiStartResult c = multi_start(constant_problem(1, 2.0), g, cfg);
    REQUIRE(c.solutions.size() == 1);
    CHECK(c.solutions[0].norm == doctest::Approx(2.0).epsilon(1e-10));

    const ProblemSpec lin(1, 1.0, Nonlinearity::linear(), Nonlinearity::linear());
    CHECK(multi_start(lin, g, cfg).solutions.empty());

    cfg.seed_radii = {0.25, 1.0, 8.0, 32.0};
    const ProblemSpec bump(1, 600.0, Nonlinearity::ratio_bump(), Nonlinearity::ratio_bump());
    const MultiStartResult b = multi_start(bump, g, cfg);
    REQUIRE(b.solutions.size() >= 2);
    CHECK(b.solutions.front().norm < 2.0);
    CHECK(b.solutions.back().norm > 2.0);
    for (std::size_t i = 0; i + 1 < b.solutions.size(); ++i)
        CHECK(pair_distance(b.solutions[i].state, b.solutions[i + 1].state) >= cfg.dedupe_tol);
    for (const auto& s : b.solutions) {
        CHECK(s.residual_oracle <= cfg.oracle_tolerance(g.max_spacing(), amplitude(s.state)));
        CHECK(cone_check(s.state, g).member);
    }
}

TEST_CASE("trivial-state linearization changes sign at the principal eigenvalue") {
    const RadialGrid& g = grid512();
    auto lin = [&](double lambda) {
        return trivial_linearization(ProblemSpec(1, lambda, Nonlinearity::linear(), Nonlinearity::linear()), g);
    };
    CHECK(lin(2.0).sign() > 0);
    CHECK(lin(3.0).sign() < 0);
    // Closed form of the symmetric entry product: cos(sqrt(lambda)) cosh(sqrt(lambda)).
    CHECK(lin(2.0).det == doctest::Approx(std::cos(std::sqrt(2.0)) * std::cosh(std::sqrt(2.0))).epsilon(1e-4));
    CHECK(lin(M_PI * M_PI / 4.0).min_singular_ratio < 1e-4);
    CHECK_FALSE(trivial_linearization(constant_problem(1, 1.0), g).applicable);
}
