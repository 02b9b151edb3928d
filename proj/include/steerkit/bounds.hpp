#pragma once

// Threshold curves p(alpha): the smallest mixing weight at which each
// detection criterion is met with equality.  Entanglement and CHSH
// thresholds are closed-form; the steering thresholds are found by
// bisection on the optimized F.

#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "steerkit/chsh.hpp"
#include "steerkit/core.hpp"
#include "steerkit/steering.hpp"

namespace steerkit::bounds {

enum class Kind { entanglement, steering_II, steering_I, chsh };

// One threshold curve; a missing threshold means the criterion cannot be
// met even at p = 1 (the criterion is unreachable at that alpha).
struct Curve {
    Kind kind = Kind::entanglement;
    std::vector<std::pair<double, std::optional<double>>> points;
};

namespace detail_bounds {

inline double steering_f(Kind kind, double alpha, double eta, double p) {
    const core::StateParams s{alpha, p, eta, 0.0};
    return kind == Kind::steering_I ? steering::scenario_I(s).f_value
                                    : steering::scenario_II(s).f_value;
}

// F grows with p from 1/2 at p = 0; bisect the crossing with the limit.
inline std::optional<double> bisect_steering(Kind kind, double alpha, double eta, double lim,
                                             double tol) {
    const double f_top = steering_f(kind, alpha, eta, 1.0);
    if (f_top < lim - 1e-12) return std::nullopt;
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (steering_f(kind, alpha, eta, mid) >= lim ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail_bounds

// Smallest p at which the criterion holds with equality:
//   entanglement: concurrence reaches zero from above,
//                 p = 1 / (1 + 4 |2 eta - 1| sqrt(alpha(1-alpha)))
//   chsh:         S = 2, p = 1 / sqrt(1 + 4 (2 eta - 1)^2 alpha(1-alpha))
//   steering I/II: optimized F meets the scenario limit (bisection).
inline std::optional<double> p_threshold(Kind kind, double alpha, double eta,
                                         double bisect_tol = 1e-9) {
    const core::StateParams probe{alpha, 1.0, eta, 0.0};  // validates alpha, eta
    const double root = std::sqrt(probe.alpha * (1.0 - probe.alpha));
    switch (kind) {
        case Kind::entanglement:
            return 1.0 / (1.0 + 4.0 * std::abs(2.0 * eta - 1.0) * root);
        case Kind::chsh: {
            const double g = core::interference_amplitude(probe);
            return 1.0 / std::sqrt(1.0 + g * g);
        }
        case Kind::steering_I:
            return detail_bounds::bisect_steering(kind, alpha, eta,
                                                  steering::lhs_limit(steering::Scenario::I),
                                                  bisect_tol);
        case Kind::steering_II:
            return detail_bounds::bisect_steering(kind, alpha, eta,
                                                  steering::lhs_limit(steering::Scenario::II),
                                                  bisect_tol);
    }
    throw std::invalid_argument("unknown bound kind");
}

// All four curves on a shared alpha grid, ordered as the hierarchy
// entanglement <= steering II <= steering I <= chsh (checked by tests).
inline std::array<Curve, 4> hierarchy_curves(double eta, const std::vector<double>& alpha_grid) {
    std::array<Curve, 4> out{Curve{Kind::entanglement, {}}, Curve{Kind::steering_II, {}},
                             Curve{Kind::steering_I, {}}, Curve{Kind::chsh, {}}};
    for (auto& curve : out) {
        curve.points.reserve(alpha_grid.size());
        for (double a : alpha_grid) curve.points.emplace_back(a, p_threshold(curve.kind, a, eta));
    }
    return out;
}

// Published bounds on the relevant Grothendieck constant give the window of
// mixing weights where a Werner state is entangled yet provably Bell-local
// under projective measurements: p in (1/1.4644, 1/1.4261).
inline std::pair<double, double> grothendieck_window() {
    return {1.0 / 1.4644, 1.0 / 1.4261};
}

}  // namespace steerkit::bounds
