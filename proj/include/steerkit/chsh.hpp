#pragma once

// CHSH Bell quantity for the state family, with closed-form maximal value
// and maximizing measurement angles.

#include <cmath>
#include <utility>

#include "steerkit/core.hpp"

namespace steerkit::chsh {

struct Settings {
    core::MeasurementSetting a, a_prime, b, b_prime;
};

struct Result {
    double s_value = 0.0;
    Settings settings;
    bool violates = false;  // s_value > 2
};

// S = | -E(a,b) + E(a,b') + E(a',b) + E(a',b') |.
// The minus sign sits on the (a,b) pair so that the optimal angles below,
// with theta_b on the larger atan branch, reach the maximum.  Relabeling
// b <-> b' moves the minus to (a,b'); the maximum over settings is the same
// either way (covered by a property test).
inline double value(const core::StateParams& s, const Settings& st) {
    const auto e = [&](const core::MeasurementSetting& x, const core::MeasurementSetting& y) {
        return core::correlation(s, x, y);
    };
    return std::abs(-e(st.a, st.b) + e(st.a, st.b_prime) + e(st.a_prime, st.b) +
                    e(st.a_prime, st.b_prime));
}

// Maximal S over measurement settings: 2 p sqrt(1 + 4 (2 eta - 1)^2 alpha (1 - alpha)).
inline double max_value(const core::StateParams& s) {
    const double g = core::interference_amplitude(s);
    return 2.0 * s.p * std::sqrt(1.0 + g * g);
}

// Maximizing angles for the second qubit with the first fixed at
// theta_a = 0, theta_a' = pi/2:
//   theta_b  = 2 atan( (sqrt(g^2+1) + 1) / g )
//   theta_b' = 2 atan( (sqrt(g^2+1) - 1) / g )
// with g = |interference amplitude|.  When g = 0 the arguments degenerate;
// the atan limits give (pi, 0), which still attains the maximum 2p.
inline std::pair<double, double> optimal_bob_angles(const core::StateParams& s) {
    const double g = std::abs(core::interference_amplitude(s));
    if (g == 0.0) return {pi, 0.0};
    const double r = std::sqrt(g * g + 1.0);
    return {2.0 * std::atan((r + 1.0) / g), 2.0 * std::atan((r - 1.0) / g)};
}

// Assembles the maximizing settings and the maximal value.  The second
// qubit's azimuth is chosen so the interference term enters with its full
// magnitude: azimuth phi for a positive amplitude, phi + pi for a negative
// one.  For phi = pi this is the reflection theta -> -theta of the phi = 0
// angles, in canonical form.
inline Result maximize(const core::StateParams& s) {
    const auto [tb, tbp] = optimal_bob_angles(s);
    const double g = core::interference_amplitude(s);
    const double azimuth = g >= 0.0 ? s.phi : s.phi + pi;
    Result r;
    r.settings = Settings{core::MeasurementSetting{0.0, 0.0},
                          core::MeasurementSetting{pi / 2.0, 0.0},
                          core::MeasurementSetting{tb, azimuth},
                          core::MeasurementSetting{tbp, azimuth}};
    r.s_value = max_value(s);
    r.violates = r.s_value > 2.0;
    return r;
}

}  // namespace steerkit::chsh
