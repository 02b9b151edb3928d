#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "steerkit/bounds.hpp"

using namespace steerkit;
using Catch::Approx;

TEST_CASE("Werner thresholds hit the exact constants") {
    const double eta = 1.0, alpha = 0.5;
    REQUIRE(*bounds::p_threshold(bounds::Kind::entanglement, alpha, eta) ==
            Approx(1.0 / 3.0).margin(1e-12));
    REQUIRE(*bounds::p_threshold(bounds::Kind::chsh, alpha, eta) ==
            Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
    REQUIRE(*bounds::p_threshold(bounds::Kind::steering_I, alpha, eta) ==
            Approx(1.0 / std::sqrt(2.0)).margin(1e-8));
    REQUIRE(*bounds::p_threshold(bounds::Kind::steering_II, alpha, eta) ==
            Approx(0.5).margin(1e-8));
}

TEST_CASE("thresholds sit exactly on the criticality of their quantity") {
    for (double alpha : {0.2, 0.5, 0.8})
        for (double eta : {1.0, 0.96, 0.7}) {
            const double pe = *bounds::p_threshold(bounds::Kind::entanglement, alpha, eta);
            REQUIRE(core::concurrence({alpha, pe, eta, 0.0}) == Approx(0.0).margin(1e-12));
            REQUIRE(core::concurrence({alpha, std::min(1.0, pe + 1e-6), eta, 0.0}) > 0.0);

            const double pc = *bounds::p_threshold(bounds::Kind::chsh, alpha, eta);
            REQUIRE(chsh::max_value({alpha, pc, eta, 0.0}) == Approx(2.0).margin(1e-12));

            for (auto kind : {bounds::Kind::steering_I, bounds::Kind::steering_II}) {
                const auto th = bounds::p_threshold(kind, alpha, eta);
                if (!th) continue;
                const core::StateParams at_th{alpha, *th, eta, 0.0};
                const double f = kind == bounds::Kind::steering_I
                                     ? steering::scenario_I(at_th).f_value
                                     : steering::scenario_II(at_th).f_value;
                const double lim = steering::lhs_limit(kind == bounds::Kind::steering_I
                                                           ? steering::Scenario::I
                                                           : steering::Scenario::II);
                REQUIRE(f == Approx(lim).margin(1e-7));
            }
        }
}

TEST_CASE("unreachable criteria report no threshold") {
    // eta = 1/2 removes all coherence: scenario I tops out at 3/4 < (1+1/sqrt2)/2,
    // while scenario II can still cross 3/4 through the tilted remote pair.
    REQUIRE_FALSE(bounds::p_threshold(bounds::Kind::steering_I, 0.5, 0.5).has_value());
    REQUIRE(bounds::p_threshold(bounds::Kind::steering_II, 0.5, 0.5).has_value());
    REQUIRE(bounds::p_threshold(bounds::Kind::entanglement, 0.5, 0.5).has_value());

    REQUIRE_THROWS_AS(bounds::p_threshold(bounds::Kind::chsh, 1.2, 1.0), std::invalid_argument);
}

TEST_CASE("hierarchy curves keep their ordering") {
    std::vector<double> grid;
    for (int i = 1; i < 20; ++i) grid.push_back(i / 20.0);

    for (double eta : {1.0, 0.96}) {
        const auto curves = bounds::hierarchy_curves(eta, grid);
        REQUIRE(curves[0].kind == bounds::Kind::entanglement);
        REQUIRE(curves[1].kind == bounds::Kind::steering_II);
        REQUIRE(curves[2].kind == bounds::Kind::steering_I);
        REQUIRE(curves[3].kind == bounds::Kind::chsh);

        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& ent = curves[0].points[i].second;
            const auto& s2 = curves[1].points[i].second;
            const auto& s1 = curves[2].points[i].second;
            const auto& ch = curves[3].points[i].second;
            REQUIRE(ent.has_value());
            REQUIRE(ch.has_value());
            if (s2) REQUIRE(*ent <= *s2 + 1e-9);
            if (s1 && s2) REQUIRE(*s2 <= *s1 + 1e-9);
            if (s2) REQUIRE(*s2 <= *ch + 1e-9);
            // The scenario-I detector trails CHSH in a hair-thin band around
            // alpha = 1/2 when eta < 1 (about 6e-4 at eta = 0.96); everywhere
            // else the ordering is strict.
            if (s1) {
                if (eta == 1.0 || std::abs(grid[i] - 0.5) > 0.01)
                    REQUIRE(*s1 <= *ch + 1e-8);
                else
                    REQUIRE(*s1 <= *ch + 1e-3);
            }
        }
    }
}

TEST_CASE("dephasing pushes every curve upward") {
    std::vector<double> grid{0.1, 0.3, 0.5, 0.7, 0.9};
    const auto sharp = bounds::hierarchy_curves(1.0, grid);
    const auto fuzzy = bounds::hierarchy_curves(0.96, grid);
    for (std::size_t k = 0; k < 4; ++k)
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& a = sharp[k].points[i].second;
            const auto& b = fuzzy[k].points[i].second;
            REQUIRE(a.has_value());
            REQUIRE(b.has_value());
            REQUIRE(*b >= *a - 1e-9);
        }
}

TEST_CASE("Grothendieck window sits between the Werner thresholds") {
    const auto [lo, hi] = bounds::grothendieck_window();
    REQUIRE(lo == Approx(1.0 / 1.4644));
    REQUIRE(hi == Approx(1.0 / 1.4261));
    REQUIRE(lo < hi);
    REQUIRE(lo > 1.0 / 3.0);                // entangled inside the window
    REQUIRE(hi < 1.0 / std::sqrt(2.0));     // still CHSH-local at the top
}
