#include "ma_radial/quadrature.hpp"

#include "ma_radial/error.hpp"

#include <cmath>

namespace ma_radial {

namespace {

struct Panel {
    double a, b, fa, fm, fb, whole;
};

double refine(const std::function<double(double)>& f, const Panel& p, double tol, int depth,
              QuadratureResult& acc) {
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m);
    const double rm = 0.5 * (m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    acc.evaluations += 2;
    const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    const double delta = left + right - p.whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        acc.error_estimate += std::fabs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return refine(f, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1, acc) +
           refine(f, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1, acc);
}

} // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double tol, int max_depth) {
    if (!(tol > 0.0)) throw DomainError("quadrature tolerance must be positive");
    QuadratureResult out;
    if (a == b) return out;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    out.evaluations = 3;
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    out.value = refine(f, {a, b, fa, fm, fb, whole}, tol, max_depth, out);
    return out;
}

} // namespace ma_radial
