#pragma once

#include "ma_radial/expression.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ma_radial {

enum class LimitKind { zero, finite, infinite, undetermined };

const char* to_string(LimitKind k);

/// Which end of (0, inf) an asymptotic quotient is taken at.
enum class End { zero, infinity };

/// Estimated or declared value of lim f(x)/x^N.
struct ExtendedLimit {
    LimitKind kind = LimitKind::undetermined;
    double value = 0.0; // meaningful for finite only
    std::vector<std::pair<double, double>> evidence; // (probe x, quotient)
    bool declared = false;

    static ExtendedLimit zero() { return {LimitKind::zero, 0.0, {}, false}; }
    static ExtendedLimit finite(double v) { return {LimitKind::finite, v, {}, false}; }
    static ExtendedLimit infinite() { return {LimitKind::infinite, 0.0, {}, false}; }

    bool is_zero() const { return kind == LimitKind::zero || (kind == LimitKind::finite && value == 0.0); }
    bool is_infinite() const { return kind == LimitKind::infinite; }
    bool is_bounded() const { return kind == LimitKind::zero || kind == LimitKind::finite; }
    bool is_positive() const {
        return kind == LimitKind::infinite || (kind == LimitKind::finite && value > 0.0);
    }

    std::string describe() const;

    bool operator==(const ExtendedLimit&) const = default;
};

struct DeclaredLimits {
    std::optional<ExtendedLimit> q0;
    std::optional<ExtendedLimit> qinf;
};

/// Builtin families accepted in problem files.
struct Family {
    std::string name; // power, constant, linear, ratio_bump, exp_minus_one
    std::vector<double> params;
};

/// A nonnegative scalar map on [0, inf).
class Nonlinearity {
public:
    using Source = std::variant<Family, Expression>;

    static Nonlinearity builtin(const std::string& family, std::vector<double> params = {});
    static Nonlinearity power(double p) { return builtin("power", {p}); }
    static Nonlinearity constant(double c) { return builtin("constant", {c}); }
    static Nonlinearity linear() { return builtin("linear"); }
    static Nonlinearity ratio_bump() { return builtin("ratio_bump"); }
    static Nonlinearity exp_minus_one() { return builtin("exp_minus_one"); }

    /// Parses `text` and probes it for negativity; probe failures are kept in warnings().
    static Nonlinearity parse(const std::string& text);

    /// Wraps an arbitrary evaluator (tests and envelope-derived maps).
    static Nonlinearity custom(std::function<double(double)> fn, std::string label,
                               bool positive = true);

    /// f(x); throws DomainError for x < 0 and InvalidNonlinearity for bad values.
    double operator()(double x) const;

    /// Unchecked evaluation for hot loops where x >= 0 is already guaranteed.
    double raw(double x) const { return fn_(x); }

    Nonlinearity with_limits(DeclaredLimits limits) const;

    const Source& source() const noexcept { return source_; }
    const DeclaredLimits& declared_limits() const noexcept { return declared_; }
    bool positive() const noexcept { return positive_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    const std::string& label() const noexcept { return label_; }

private:
    Nonlinearity() = default;

    std::function<double(double)> fn_;
    Source source_;
    DeclaredLimits declared_;
    bool positive_ = true;
    std::vector<std::string> warnings_;
    std::string label_;
};

double eval(const Nonlinearity& nl, double x);

Nonlinearity parse_expression(const std::string& text);

/// max f on [0, t] from a (resolution+1)-point grid plus a golden-section refinement.
double envelope(const Nonlinearity& nl, double t, int resolution = 256);

/// The envelope as a Nonlinearity of its own.
Nonlinearity envelope_function(const Nonlinearity& nl, int resolution = 256);

struct QuotientConfig {
    int probes = 40;          // x = 2^-k or 2^k, k = 1..probes
    int window = 5;           // trailing probes inspected
    double infinite_threshold = 1e8;
    double zero_threshold = 1e-8;
    double finite_rel_tol = 1e-3;
    double min_log_slope = 0.1; // d log q / d log x beyond which a trend counts as divergent
};

/// Declared limit if present, else an estimate of lim f(x)/x^N at the given end.
ExtendedLimit asymptotic_quotient(const Nonlinearity& nl, int N, End end,
                                  const QuotientConfig& cfg = {});

} // namespace ma_radial
