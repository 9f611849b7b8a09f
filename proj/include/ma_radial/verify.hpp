#pragma once

#include "ma_radial/radial_operator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ma_radial {

enum class Suite { lemmas, operator_, oracle };

const char* to_string(Suite s);
Suite suite_from_string(const std::string& name);

/// One property over all trials; margins are signed slacks, negative means violated.
struct PropertyResult {
    std::string name;
    double worst_margin = 0.0;
    int checked = 0;
    int failures = 0;
    std::string worst_case; // description of the trial with the worst margin

    bool passed() const { return failures == 0; }
};

struct VerifyReport {
    Suite suite = Suite::lemmas;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<PropertyResult> properties;
    double seconds = 0.0;

    bool passed() const;
};

/// Randomized property suite:
///   lemmas   cone preservation, monotone output, boundary value, concavity bound,
///            weak-bound sandwich, strong lower bound, envelope monotonicity and dominance;
///   operator homogeneity in lambda, mesh-halving order, closed-form agreement;
///   oracle   Picard/shell solutions against shoot roots, and the reverse residuals.
/// Throws DomainError when trials < 1.
VerifyReport run_suite(Suite suite, int trials, std::uint64_t seed, int grid_intervals = 512);

} // namespace ma_radial
