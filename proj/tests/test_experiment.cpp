#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "steerkit/chsh.hpp"
#include "steerkit/sim.hpp"
#include "steerkit/steering.hpp"

using namespace steerkit;
using Catch::Approx;

namespace {

const core::StateParams bench_state{0.5, 0.90, 0.96, pi};

sim::Config cfg_with(std::uint64_t seed, double mean = 5500.0) {
    sim::Config c;
    c.seed = seed;
    c.mean_total_counts = mean;
    return c;
}

}  // namespace

TEST_CASE("seed derivation is deterministic and spreads streams") {
    REQUIRE(sim::derive_seed(42, 0) == sim::derive_seed(42, 0));
    REQUIRE(sim::derive_seed(42, 0) != sim::derive_seed(42, 1));
    REQUIRE(sim::derive_seed(42, 0) != sim::derive_seed(43, 0));
}

TEST_CASE("simulated counts are reproducible byte for byte") {
    const auto a = core::sigma_z_setting;
    const auto b = core::sigma_z_setting;
    const auto c1 = sim::simulate_counts(bench_state, a, b, cfg_with(7));
    const auto c2 = sim::simulate_counts(bench_state, a, b, cfg_with(7));
    REQUIRE(c1.c00 == c2.c00);
    REQUIRE(c1.c01 == c2.c01);
    REQUIRE(c1.c10 == c2.c10);
    REQUIRE(c1.c11 == c2.c11);

    const auto c3 = sim::simulate_counts(bench_state, a, b, cfg_with(8));
    REQUIRE((c1.c00 != c3.c00 || c1.c01 != c3.c01 || c1.c10 != c3.c10 || c1.c11 != c3.c11));
}

TEST_CASE("count totals follow the configuration") {
    auto cfg = cfg_with(11);
    cfg.multinomial_totals = true;
    const auto c = sim::simulate_counts(bench_state, core::sigma_z_setting, core::sigma_z_setting,
                                        cfg);
    REQUIRE(c.total() == 5500);

    auto bad = cfg_with(11, -5.0);
    REQUIRE_THROWS_AS(
        sim::simulate_counts(bench_state, core::sigma_z_setting, core::sigma_z_setting, bad),
        std::invalid_argument);
}

TEST_CASE("only polarizer-plane settings are simulable") {
    const core::MeasurementSetting off_plane{pi / 2.0, pi / 3.0};
    REQUIRE_THROWS_AS(
        sim::simulate_counts(bench_state, off_plane, core::sigma_z_setting, cfg_with(1)),
        unsupported_setting);

    // azimuth pi is the negative half of the plane
    const auto c = sim::simulate_counts(bench_state, core::MeasurementSetting{0.7, pi},
                                        core::sigma_z_setting, cfg_with(1));
    REQUIRE(c.theta_a == Approx(-0.7));
    REQUIRE(c.theta_b == Approx(0.0).margin(1e-15));
}

TEST_CASE("probability estimates track the counts") {
    sim::CoincidenceCounts c;
    c.c00 = 10;
    c.c01 = 30;
    c.c10 = 40;
    c.c11 = 20;
    const auto jp = sim::estimate_probabilities(c);
    REQUIRE(jp.p00 == Approx(0.1));
    REQUIRE(jp.p01 == Approx(0.3));
    REQUIRE(jp.p10 == Approx(0.4));
    REQUIRE(jp.p11 == Approx(0.2));

    sim::CoincidenceCounts empty;
    REQUIRE_THROWS_AS(sim::estimate_probabilities(empty), zero_denominator);
    REQUIRE_THROWS_AS(c.at(2, 0), std::invalid_argument);
}

TEST_CASE("visibility estimation in both bases") {
    // huge sample so the estimate pins the exact value
    const auto cz = sim::simulate_counts(bench_state, core::sigma_z_setting,
                                         core::sigma_z_setting, cfg_with(3, 4e6));
    const auto vz = sim::estimate_visibility(cz);
    REQUIRE(vz.value == Approx(bench_state.p).margin(5.0 * vz.sigma));
    REQUIRE(vz.sigma > 0.0);
    REQUIRE(vz.sigma < 1e-3);

    const auto cx = sim::simulate_counts(bench_state, core::sigma_x_setting,
                                         core::sigma_x_setting, cfg_with(4, 4e6));
    const auto vx = sim::estimate_visibility(cx);
    const double exact_vx = core::visibilities(bench_state).vx;
    REQUIRE(vx.value == Approx(exact_vx).margin(5.0 * vx.sigma));

    // the negative-signed x angle is the same basis
    const auto cx2 = sim::simulate_counts(bench_state, core::MeasurementSetting{pi / 2.0, pi},
                                          core::sigma_x_setting, cfg_with(5, 1e5));
    REQUIRE_NOTHROW(sim::estimate_visibility(cx2));

    const auto tilted = sim::simulate_counts(bench_state, core::MeasurementSetting{0.3, 0.0},
                                             core::sigma_z_setting, cfg_with(6));
    REQUIRE_THROWS_AS(sim::estimate_visibility(tilted), angle_mismatch);
}

TEST_CASE("degenerate counts flag a collapsed sigma") {
    core::StateParams pure{0.5, 1.0, 1.0, 0.0};
    const auto c = sim::simulate_counts(pure, core::sigma_z_setting, core::sigma_z_setting,
                                        cfg_with(5));
    REQUIRE(c.c01 == 0);
    REQUIRE(c.c10 == 0);
    const auto v = sim::estimate_visibility(c);
    REQUIRE(v.value == Approx(1.0));
    REQUIRE(v.sigma == 0.0);
    REQUIRE(v.degenerate);
}

TEST_CASE("CHSH estimation against the exact value") {
    const auto opt = chsh::maximize(bench_state);
    const std::uint64_t master = 2718;
    const auto ab = sim::simulate_counts(bench_state, opt.settings.a, opt.settings.b,
                                         cfg_with(sim::derive_seed(master, 0), 1e6));
    const auto abp = sim::simulate_counts(bench_state, opt.settings.a, opt.settings.b_prime,
                                          cfg_with(sim::derive_seed(master, 1), 1e6));
    const auto apb = sim::simulate_counts(bench_state, opt.settings.a_prime, opt.settings.b,
                                          cfg_with(sim::derive_seed(master, 2), 1e6));
    const auto apbp = sim::simulate_counts(bench_state, opt.settings.a_prime,
                                           opt.settings.b_prime,
                                           cfg_with(sim::derive_seed(master, 3), 1e6));
    const auto est = sim::estimate_chsh(ab, abp, apb, apbp);
    REQUIRE(est.value == Approx(opt.s_value).margin(5.0 * est.sigma));
    REQUIRE(est.sigma > 0.0);
    REQUIRE(est.sigma < 2.5e-3);

    // wrong ordering of the four count sets is rejected
    REQUIRE_THROWS_AS(sim::estimate_chsh(ab, apb, abp, apbp), angle_mismatch);
}

TEST_CASE("steering estimation against the exact value") {
    const auto r = steering::scenario_I(bench_state);
    const std::uint64_t master = 161803;
    const auto with_p = sim::simulate_counts(bench_state, r.settings.s_setting,
                                             r.settings.p_setting,
                                             cfg_with(sim::derive_seed(master, 0), 1e6));
    const auto with_q = sim::simulate_counts(bench_state, r.settings.t_setting,
                                             r.settings.q_setting,
                                             cfg_with(sim::derive_seed(master, 1), 1e6));
    const auto est = sim::estimate_steering(with_p, with_q);
    REQUIRE(est.estimate.value == Approx(r.f_value).margin(5.0 * est.estimate.sigma));
    REQUIRE(est.estimate.sigma < 5e-4);
    REQUIRE(est.outcome_a == est.outcome_b);

    const auto e00 = sim::estimate_steering_outcome(with_p, with_q, 0, 0);
    const auto e11 = sim::estimate_steering_outcome(with_p, with_q, 1, 1);
    REQUIRE(est.estimate.value == Approx(std::max(e00.value, e11.value)));

    sim::CoincidenceCounts starved;
    starved.c10 = 5;
    starved.c11 = 5;
    REQUIRE_THROWS_AS(sim::estimate_steering_outcome(starved, with_q, 0, 0), zero_denominator);
}

TEST_CASE("parameter fit inverts the visibilities") {
    const double alpha = 0.35;
    const core::StateParams truth{alpha, 0.90, 0.96, pi};
    const auto v = core::visibilities(truth);
    const auto fitted = sim::fit_params({v.vz, 1e-3, false}, {v.vx, 1e-3, false}, alpha,
                                        sim::PhiHint::pi);
    REQUIRE(fitted.p == Approx(truth.p).margin(1e-12));
    REQUIRE(fitted.eta == Approx(truth.eta).margin(1e-12));
    REQUIRE(fitted.phi == Approx(pi));
    REQUIRE(fitted.alpha == Approx(alpha));

    // small overshoots clamp, large ones are inconsistent
    REQUIRE(sim::fit_params({1.01, 1e-3, false}, {0.5, 1e-3, false}, 0.5, sim::PhiHint::zero).p ==
            Approx(1.0));
    REQUIRE_THROWS_AS(
        sim::fit_params({1.05, 1e-3, false}, {0.5, 1e-3, false}, 0.5, sim::PhiHint::zero),
        inconsistent_visibilities);
    const double vx_over = 2.0 * 0.9 * 0.5 * 1.06;  // implies eta just above 1 + slack
    REQUIRE_THROWS_AS(
        sim::fit_params({0.9, 1e-3, false}, {vx_over, 1e-3, false}, 0.5, sim::PhiHint::zero),
        inconsistent_visibilities);
    const double vx_slight = 2.0 * 0.9 * 0.5 * 1.01;
    REQUIRE(sim::fit_params({0.9, 1e-3, false}, {vx_slight, 1e-3, false}, 0.5,
                            sim::PhiHint::zero)
                .eta == Approx(1.0));

    REQUIRE_THROWS_AS(sim::fit_params({0.9, 1e-3, false}, {0.5, 1e-3, false}, 0.0,
                                      sim::PhiHint::zero),
                      zero_denominator);
    REQUIRE_THROWS_AS(sim::fit_params({0.0, 0.0, true}, {0.0, 0.0, true}, 0.5,
                                      sim::PhiHint::zero),
                      zero_denominator);
    REQUIRE_THROWS_AS(sim::fit_params({-0.1, 1e-3, false}, {0.5, 1e-3, false}, 0.5,
                                      sim::PhiHint::zero),
                      std::invalid_argument);
}

TEST_CASE("wave-plate angle error propagation") {
    REQUIRE(sim::alpha_error(pi / 8.0, 0.01) == Approx(0.02));
    REQUIRE(sim::alpha_error(0.0, 0.01) == Approx(0.0).margin(1e-15));
    REQUIRE(sim::alpha_error(pi / 4.0, 0.01) == Approx(0.0).margin(1e-12));
}

TEST_CASE("predicted sigmas track the spread over seeds") {
    // light version of the full calibration: 200 seeds at the paper's counts
    const auto opt = chsh::maximize(bench_state);
    std::vector<double> values;
    double sigma_sum = 0.0;
    const int n = 200;
    for (int k = 0; k < n; ++k) {
        const auto master = static_cast<std::uint64_t>(k);
        const auto ab = sim::simulate_counts(bench_state, opt.settings.a, opt.settings.b,
                                             cfg_with(sim::derive_seed(master, 0)));
        const auto abp = sim::simulate_counts(bench_state, opt.settings.a, opt.settings.b_prime,
                                              cfg_with(sim::derive_seed(master, 1)));
        const auto apb = sim::simulate_counts(bench_state, opt.settings.a_prime, opt.settings.b,
                                              cfg_with(sim::derive_seed(master, 2)));
        const auto apbp = sim::simulate_counts(bench_state, opt.settings.a_prime,
                                               opt.settings.b_prime,
                                               cfg_with(sim::derive_seed(master, 3)));
        const auto est = sim::estimate_chsh(ab, abp, apb, apbp);
        values.push_back(est.value);
        sigma_sum += est.sigma;
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double empirical = std::sqrt(var / (n - 1));
    const double predicted = sigma_sum / n;
    REQUIRE(empirical == Approx(predicted).epsilon(0.25));
    REQUIRE(predicted < 0.025);
}
