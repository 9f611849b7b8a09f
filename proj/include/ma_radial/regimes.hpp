#pragma once

#include "ma_radial/radial_operator.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ma_radial {

/// Existence regimes; the T1 parts hold for every lambda, the T2 parts need f, g > 0 on x > 0.
enum class Part { T1a, T1b, T2a, T2b, T2c, T2d, T2e, T2f };

const char* to_string(Part part);
Part part_from_string(const std::string& tag);

/// How a window endpoint was obtained.
enum class Provenance {
    unconditional,   // no lambda restriction
    certificate,     // sufficient lambda0 from weak-bound shells; not sharp
    grid_constant,   // lambda0 from the epsilon constant on a geometric grid
    unavailable      // lambda0 exists but no certificate was found on the search grid
};

const char* to_string(Provenance p);

struct PartWindow {
    Part part = Part::T1a;
    double lo = 0.0;                 // open interval (lo, hi) in lambda
    double hi = 0.0;                 // may be +inf
    std::optional<double> lambda0;
    int min_count = 0;               // guaranteed solutions inside the window
    bool nonexistence = false;       // the window holds no nontrivial solution
    Provenance provenance = Provenance::unconditional;
    std::string guarantee;

    bool operator==(const PartWindow&) const = default;
};

struct RegimeReport {
    ExtendedLimit f0, g0, f_inf, g_inf;
    bool positive = false;           // f, g > 0 on the probed x > 0
    std::vector<Part> applicable_parts;
    std::vector<PartWindow> windows;

    bool applies(Part part) const;
    const PartWindow* window(Part part) const;

    /// Solution count bounds implied at lambda: {min, max}; max < 0 means unbounded.
    std::pair<int, int> predicted_count(double lambda) const;

    bool operator==(const RegimeReport&) const = default;
};

/// Quotient limits of f and g and every regime whose hypotheses hold verbatim.
/// Throws UndeterminedLimit when any of the four limits cannot be classified.
RegimeReport classify(const ProblemSpec& p, const QuotientConfig& qcfg = {});

struct WindowEstimate {
    Part part = Part::T2e;
    double epsilon = 0.0;              // (extremal quotient)^{1/N} over the grid
    double lambda0 = 0.0;
    /// Bracketed variant: sup-quotients bounded from above per grid cell (T2e) or
    /// inf-quotients from below (T2f); its window is never larger than the plain one.
    double epsilon_conservative = 0.0;
    double lambda0_conservative = 0.0;
    double v_lo = 0.0, v_hi = 0.0;
    int points = 0;
};

/// lambda0 bounding the nonexistence window of T2e, (0, lambda0), or T2f, (lambda0, inf).
/// T2e: eps^N = max over f, g of sup_v envelope(v) / v^N and lambda0 = (1 / (2 eps))^N.
/// T2f: eps^N = min over f, g of inf_v h(v) / v^N and lambda0 = (1 / (Gamma eps))^N.
/// The extremum runs over `resolution` geometric points in [1e-6, 1e6] plus finite limits.
WindowEstimate nonexistence_window(const ProblemSpec& p, Part part, int resolution = 2401);

struct ShellCertificate {
    double lambda0 = 0.0;  // T2a: inf over r; T2b: sup over r
    double radius = 0.0;   // shell achieving it
    bool found = false;
};

/// Smallest lambda with 4 lambda^{1/N} Gamma m_hat_r^{1/N} > r for some grid shell r.
ShellCertificate expansion_certificate(const ProblemSpec& p, int points = 241);

/// Largest lambda with 2 lambda^{1/N} M_hat_r^{1/N} < r for some grid shell r.
ShellCertificate compression_certificate(const ProblemSpec& p, int points = 241);

} // namespace ma_radial
