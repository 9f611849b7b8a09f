#pragma once

#include "ma_radial/regimes.hpp"
#include "ma_radial/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ma_radial {

/// A problem with lambda left open.
struct ProblemTemplate {
    int N = 1;
    Nonlinearity f;
    Nonlinearity g;

    static ProblemTemplate of(const ProblemSpec& p) { return {p.N, p.f, p.g}; }
    ProblemSpec at(double lambda) const { return ProblemSpec(N, lambda, f, g); }
};

struct SolutionSummary {
    double norm = 0.0;
    double alpha1 = 0.0, alpha2 = 0.0;
    bool half_trivial = false;

    bool operator==(const SolutionSummary&) const = default;
};

/// Outcome at one lambda. An empty count means Undetermined, with the reason in `note`.
struct SweepPoint {
    double lambda = 0.0;
    std::optional<int> count;
    std::vector<SolutionSummary> solutions; // shoot roots, sorted by norm
    int picard_solutions = 0;               // multi_start cross-check
    int linearization_sign = 0;             // sign of the trivial-state Jacobian, 0 if n/a
    std::string note;
};

enum class ThresholdKind { count, linearization };

const char* to_string(ThresholdKind k);

struct Threshold {
    double lambda_star = 0.0;
    double lo = 0.0, hi = 0.0;  // final bracket
    ThresholdKind kind = ThresholdKind::count;
    bool non_monotone = false;
    bool refined = false;       // bisected to tolerance

    bool operator==(const Threshold&) const = default;
};

struct SweepReport {
    std::vector<double> lambdas;
    std::vector<std::optional<int>> counts;
    std::vector<std::vector<SolutionSummary>> solutions;
    std::vector<Threshold> thresholds;
    std::optional<RegimeReport> regime;
    std::vector<std::string> notes;      // per lambda, empty when nothing to say
    std::vector<std::string> violations; // counts contradicting a certified regime window

    bool operator==(const SweepReport&) const = default;
};

struct SweepOptions {
    bool bisect = false;
    double tol_lambda = 1e-4;
    /// Worker cap; 0 takes MA_RADIAL_THREADS or the hardware concurrency.
    unsigned threads = 0;
};

/// Counts at one lambda: shoot roots are authoritative, multi_start solutions must embed in
/// them, and singular Jacobians (at a root or at the trivial state) leave the count undetermined.
SweepPoint evaluate_lambda(const ProblemTemplate& t, double lambda, const RadialGrid& grid,
                           const SolverConfig& cfg);

SweepReport lambda_sweep(const ProblemTemplate& t, const std::vector<double>& lambdas,
                         const RadialGrid& grid, const SolverConfig& cfg, const SweepOptions& opts = {});

enum class Detector { automatic, count, linearization };

/// Bisects (lo, hi) until its width is at most tol_lambda. `automatic` uses a count change
/// when both end counts are determined and differ, else a sign change of the trivial-state
/// Jacobian determinant. Throws DomainError when neither changes across the bracket.
Threshold threshold_bisect(const ProblemTemplate& t, double lo, double hi, const RadialGrid& grid,
                           const SolverConfig& cfg, double tol_lambda, Detector detector = Detector::automatic);

/// Worker count after applying MA_RADIAL_THREADS.
unsigned worker_count(unsigned requested = 0);

} // namespace ma_radial
