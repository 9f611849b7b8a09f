#pragma once

#include "ma_radial/sweep.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace ma_radial {

/// A problem file: N, optional lambda, f and g, optional grid and solver overrides.
/// Schema in docs/problem-file.md.
struct ProblemFile {
    int N = 1;
    std::optional<double> lambda;
    Nonlinearity f = Nonlinearity::constant(1.0);
    Nonlinearity g = Nonlinearity::constant(1.0);
    int grid_intervals = 512;
    SolverConfig solver;

    ProblemTemplate problem_template() const { return {N, f, g}; }
    /// Throws ValidationError when lambda is absent.
    ProblemSpec spec() const;
    RadialGrid grid() const { return RadialGrid::uniform(grid_intervals); }
};

/// Throws ValidationError; JSON syntax errors carry line and column.
ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::filesystem::path& path);

/// Round-trippable encodings. Non-finite numbers are written as the strings "inf", "-inf", "nan".
nlohmann::json to_json(const ExtendedLimit& lim);
ExtendedLimit limit_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RegimeReport& rep);
RegimeReport regime_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SweepReport& rep);
SweepReport sweep_from_json(const nlohmann::json& j);

/// Columns lambda,count,norms; count is an integer or "undetermined", norms are
/// semicolon-joined with 17 significant digits.
std::string sweep_to_csv(const SweepReport& rep);
/// Restores lambdas, counts and solution norms (center values are not in the CSV).
SweepReport sweep_from_csv(const std::string& text);

std::string thresholds_to_csv(const std::vector<Threshold>& thresholds);

/// Columns solution,r,v1,v2, one row per solution and node.
std::string solutions_to_csv(const RadialGrid& grid, const std::vector<SolveReport>& sols);
nlohmann::json solutions_to_json(const RadialGrid& grid, const std::vector<SolveReport>& sols);

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace ma_radial
