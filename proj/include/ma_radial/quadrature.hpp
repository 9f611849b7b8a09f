#pragma once

#include <functional>

namespace ma_radial {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
};

/// Adaptive Simpson with Richardson correction; splits until |S2 - S1| <= 15 tol locally.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double tol, int max_depth = 50);

} // namespace ma_radial
