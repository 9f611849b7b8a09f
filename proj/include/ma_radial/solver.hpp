#pragma once

#include "ma_radial/radial_operator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ma_radial {

/// Rectangle of center values (alpha1, alpha2) searched by the shooting oracle.
struct AlphaBox {
    double lo1 = 1e-4, hi1 = 1e4;
    double lo2 = 1e-4, hi2 = 1e4;

    static AlphaBox square(double lo, double hi) { return {lo, hi, lo, hi}; }
};

struct SolverConfig {
    double tol_residual = 1e-8;
    int max_iter = 500;
    double damping = 1.0;
    std::vector<double> seed_radii{0.01, 0.25, 1.0, 8.0, 32.0, 256.0};
    double dedupe_tol = 1e-4;

    AlphaBox alpha_box{};
    int shoot_seeds_per_axis = 16;
    int shoot_coarse_intervals = 128;
    int newton_max_iter = 80;
    /// Shell scan is extended by factors of 8 beyond the outermost seeds, this many times.
    int shell_extensions = 7;
    /// Relative smallest singular value below which a boundary-map Jacobian counts as singular.
    double singular_tol = 1e-4;
    /// Oracle agreement bound: max(10 tol_residual, oracle_h2_coeff h^2) times max(1, amplitude).
    double oracle_h2_coeff = 1.0;

    void validate() const;
    double oracle_tolerance(double h, double amplitude) const;
};

enum class SolveMethod { picard, shell, shoot };

const char* to_string(SolveMethod m);

struct SolveReport {
    StatePair state;
    double residual_fixed_point = 0.0; // sup |T(s) - s|
    double residual_oracle = 0.0;      // forward-integration mismatch
    double norm = 0.0;                 // pair norm
    int iterations = 0;
    bool converged = false;
    bool trivial = false;
    bool diverged = false;
    bool half_trivial = false;  // exactly one component identically zero
    bool degenerate = false;    // boundary-map Jacobian singular at the root
    double alpha1 = 0.0, alpha2 = 0.0;
    SolveMethod method = SolveMethod::picard;
    std::string note;
};

/// Damped Picard iteration s <- (1 - d) s + d T(s), clamped at 0.
SolveReport picard_solve(const ProblemSpec& p, const RadialGrid& grid, const StatePair& initial,
                         const SolverConfig& cfg);

struct ForwardResult {
    StatePair state;  // clamped at 0 after a crossing
    double end1 = 0.0; // v1(1) before clamping
    double end2 = 0.0;
    std::optional<double> crossing1; // first radius where v1 reaches 0
    std::optional<double> crossing2;
};

/// Step control for the forward march: `substeps` implicit-trapezoid steps per grid
/// interval; with `richardson` a second march at twice the substeps is combined as
/// (4 fine - coarse) / 3.
struct MarchOptions {
    int substeps = 4;
    bool richardson = true;
    /// Continue f, g oddly to negative arguments instead of clamping; used only to
    /// linearize about the trivial state, where trajectories change sign.
    bool odd_extension = false;

    static MarchOptions single() { return {1, false, false}; }
};

/// Marches the initial-value form from r = 0 with v_i(0) = alpha_i:
/// v1' = -(lambda int_0^r N t^{N-1} f(v2) dt)^{1/N}, and symmetrically for v2.
ForwardResult forward_integrate(const ProblemSpec& p, double alpha1, double alpha2,
                                const RadialGrid& grid, const MarchOptions& opts = {});

struct ShootResult {
    std::vector<SolveReport> roots;
    int singular_seeds = 0;
    int failed_seeds = 0;
};

/// Roots of (alpha1, alpha2) -> (v1(1), v2(1)) by damped Newton from a seed lattice.
ShootResult boundary_shoot(const ProblemSpec& p, const AlphaBox& box, const SolverConfig& cfg,
                           const RadialGrid& grid);

struct SeedAttempt {
    double radius = 0.0;
    SolveMethod method = SolveMethod::picard;
    bool converged = false;
    bool trivial = false;
    double residual = 0.0;
    std::string note;
};

struct MultiStartResult {
    std::vector<SolveReport> solutions; // nontrivial, oracle-validated, sorted by norm
    std::vector<SeedAttempt> attempts;
};

/// Picard from every seed shell plus shell-bracketed fixed points, deduplicated.
MultiStartResult multi_start(const ProblemSpec& p, const RadialGrid& grid, const SolverConfig& cfg);

/// Fixed point restricted to the shell ||s|| = rho: s <- rho T(s) / ||T(s)||.
/// Returns the ratio ||T(s)|| / rho for the converged shape.
struct ShellSample {
    double rho = 0.0;
    double ratio = 0.0;
    StatePair shape;
};

ShellSample shell_ratio(const ProblemSpec& p, const RadialGrid& grid, double rho,
                        const StatePair* warm = nullptr);

/// Boundary-map Jacobian at the trivial state, by difference quotients at alpha = probe.
struct TrivialLinearization {
    bool applicable = false; // f(0) = g(0) = 0
    double det = 0.0;
    double min_singular_ratio = 0.0; // sigma_min / sigma_max
    int sign() const { return det > 0 ? 1 : (det < 0 ? -1 : 0); }
};

TrivialLinearization trivial_linearization(const ProblemSpec& p, const RadialGrid& grid,
                                           double probe = 1e-7);

} // namespace ma_radial
