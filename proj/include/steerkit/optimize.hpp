#pragma once

// Small 1-D optimization helpers used where closed-form optima degenerate
// (flat or singular directions) and for grid minima refinement.

#include <cmath>
#include <limits>
#include <utility>

namespace steerkit::detail {

// Golden-section maximum of f on [lo, hi]; assumes f is unimodal there.
// Returns (argmax, max).  Tolerance is on the argument interval.
template <class F>
std::pair<double, double> golden_section_max(F&& f, double lo, double hi, double xtol = 1e-10) {
    constexpr double inv_gr = 0.6180339887498949;  // 1/golden ratio
    double a = lo, b = hi;
    double x1 = b - inv_gr * (b - a);
    double x2 = a + inv_gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > xtol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_gr * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_gr * (b - a);
            f1 = f(x1);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

// Coarse scan of n+1 points on [lo, hi] followed by golden-section
// refinement inside the bracketing pair of cells around the best sample.
// Points where f returns -inf (undefined) are skipped.
template <class F>
std::pair<double, double> grid_golden_max(F&& f, double lo, double hi, int n, double xtol = 1e-10) {
    double best_x = lo;
    double best_v = -std::numeric_limits<double>::infinity();
    const double step = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + step * i;
        const double v = f(x);
        if (v > best_v) {
            best_v = v;
            best_x = x;
        }
    }
    if (!std::isfinite(best_v)) return {best_x, best_v};
    const double a = std::max(lo, best_x - step);
    const double b = std::min(hi, best_x + step);
    auto [xr, vr] = golden_section_max(f, a, b, xtol);
    return vr > best_v ? std::pair{xr, vr} : std::pair{best_x, best_v};
}

// Vertex of the parabola through three samples; falls back to the middle
// point when the curvature is too small to trust (flat functions).
inline double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d1 = (y1 - y0) / (x1 - x0);
    const double d2 = (y2 - y1) / (x2 - x1);
    const double curv = (d2 - d1) / (x2 - x0);
    if (std::abs(curv) < 1e-14) return x1;
    const double vx = 0.5 * (x0 + x1) - d1 / (2.0 * curv);
    // keep the vertex inside the bracket
    if (vx < x0 || vx > x2) return x1;
    return vx;
}

}  // namespace steerkit::detail
