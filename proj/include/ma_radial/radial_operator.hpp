#pragma once

#include "ma_radial/nonlinearity.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace ma_radial {

enum class Interpolation { linear, cubic };

/// How the operator integrates between nodes: each interval is split into `refinement`
/// Simpson sub-panels and the state is interpolated onto them.
struct QuadratureRule {
    int refinement = 4;
    Interpolation interpolation = Interpolation::cubic;

    /// One Simpson panel per interval with linear interpolation.
    static QuadratureRule plain() { return {1, Interpolation::linear}; }
};

/// Strictly increasing nodes on [0, 1]; 1/4 and 3/4 are always nodes.
class RadialGrid {
public:
    /// Interpolation stencil onto one sub-grid sample point.
    struct Sample {
        double t = 0.0;
        std::size_t first = 0; // first node of the stencil
        std::array<double, 4> w{};
    };

    /// M equal intervals, with 1/4 and 3/4 inserted when M is not a multiple of 4.
    static RadialGrid uniform(int intervals = 512, QuadratureRule rule = {});
    static RadialGrid from_nodes(std::vector<double> nodes, QuadratureRule rule = {});

    std::span<const double> nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    int intervals() const noexcept { return static_cast<int>(nodes_.size()) - 1; }
    double operator[](std::size_t i) const { return nodes_[i]; }
    double max_spacing() const noexcept { return max_h_; }
    /// Every node is a uniform-grid node (no inserted quarter points).
    bool is_uniform() const noexcept { return uniform_; }

    const QuadratureRule& rule() const noexcept { return rule_; }
    std::string rule_tag() const;

    /// Sub-grid samples: even index 2i is sub-node i, odd index is a sub-panel midpoint.
    /// Sub-node j * refinement coincides with node j.
    std::span<const Sample> samples() const noexcept { return samples_; }

private:
    RadialGrid(std::vector<double> nodes, QuadratureRule rule);

    std::vector<double> nodes_;
    QuadratureRule rule_;
    std::vector<Sample> samples_;
    double max_h_ = 0.0;
    bool uniform_ = false;
};

/// (v1, v2) sampled at grid nodes.
struct StatePair {
    std::vector<double> v1;
    std::vector<double> v2;

    static StatePair zeros(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)}; }
    std::size_t size() const noexcept { return v1.size(); }
};

/// Sup norm of one component.
double sup_norm(std::span<const double> v);

/// ||(v1, v2)|| = ||v1|| + ||v2||.
double pair_norm(const StatePair& s);

/// max(||a1 - b1||, ||a2 - b2||)
double sup_distance(const StatePair& a, const StatePair& b);

/// ||(a1 - b1, a2 - b2)|| in the pair norm.
double pair_distance(const StatePair& a, const StatePair& b);

struct ProblemSpec {
    int N = 1;
    double lambda = 1.0;
    Nonlinearity f;
    Nonlinearity g;

    ProblemSpec(int dim, double lam, Nonlinearity f_, Nonlinearity g_);

    ProblemSpec with_lambda(double lam) const;
};

/// Evaluates T_lambda = (T^1, T^2) on the grid.
///
/// T^1(r) = int_r^1 ( lambda int_0^s N t^{N-1} f(v2(t)) dt )^{1/N} ds, and T^2 likewise
/// with g(v1). Both nested integrals are cumulated sub-panel by sub-panel with Simpson's
/// rule; the inner integral at sub-panel midpoints comes from the quadratic through the
/// panel's three samples. Throws DomainError on a negative state entry.
StatePair apply_T(const ProblemSpec& p, const RadialGrid& grid, const StatePair& s);

/// Gamma = (1/4) int_{1/4}^{3/4} (s^N - 4^{-N})^{1/N} ds to absolute tolerance `tol`.
double gamma_constant(int N, double tol = 1e-13);

/// Cone geometry; the defaults are the quarter-interval cone.
struct ConeShape {
    double inner_lo = 0.25;
    double inner_hi = 0.75;
    double fraction = 0.25;
};

struct ConeReport {
    bool member = false;
    double worst_margin = 0.0;      // smallest slack among the cone inequalities
    double concavity_margin = 0.0;  // min over nodes of v(t) - min(t, 1-t) ||v||
};

ConeReport cone_check(const StatePair& s, const RadialGrid& grid, double tol = 1e-9,
                      const ConeShape& shape = {});

struct WeakBounds {
    double m_hat = 0.0; // min over [r/8, r] of min(f, g)
    double M_hat = 0.0; // max over [0, r] of f + g
    double lower = 0.0; // 4 lambda^{1/N} Gamma m_hat^{1/N}
    double upper = 0.0; // 2 lambda^{1/N} M_hat^{1/N}
};

WeakBounds weak_bounds(const ProblemSpec& p, double r, int resolution = 512);

/// The in-cone seed (r/2)(1 - t) on both components; its pair norm is r.
StatePair shell_seed(const RadialGrid& grid, double r);

} // namespace ma_radial
