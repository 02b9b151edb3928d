#pragma once

// Photon-coincidence experiment simulation and the matching estimators.
//
// A run at one setting pair integrates four coincidence counters, one per
// outcome combination, modeled as independent Poisson draws whose means are
// the joint probabilities scaled by the expected total.  Estimators carry
// the exact Poisson error propagation of the counting statistics.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "steerkit/core.hpp"

namespace steerkit::sim {

struct Config {
    double mean_total_counts = 5500.0;  // expected coincidences per setting pair
    std::uint64_t seed = 0;
    double integration_seconds = 3.0;  // metadata only; the rate is folded into the mean
    bool multinomial_totals = false;   // condition on a fixed total instead of 4 Poissons
};

// Counts from one setting pair.  theta_a / theta_b are the signed in-plane
// observable angles (the polarizer physically sits at half the angle); the
// azimuth-pi half of the plane maps to negative angles.
struct CoincidenceCounts {
    double theta_a = 0.0;
    double theta_b = 0.0;
    std::uint64_t c00 = 0, c01 = 0, c10 = 0, c11 = 0;

    std::uint64_t total() const { return c00 + c01 + c10 + c11; }

    std::uint64_t at(int a, int b) const {
        if ((a != 0 && a != 1) || (b != 0 && b != 1))
            throw std::invalid_argument("outcomes must be 0 or 1");
        return a == 0 ? (b == 0 ? c00 : c01) : (b == 0 ? c10 : c11);
    }
};

struct Estimate {
    double value = 0.0;
    double sigma = 0.0;
    bool degenerate = false;  // sigma collapsed to 0 because a count bin is empty
};

// splitmix64 step: cheap, well-distributed derivation of per-stream seeds
// from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace detail_sim {

// Signed in-plane angle of a setting confined to the sigma_z / sigma_x
// plane; anything off-plane is not realizable by the polarizer model.
inline double in_plane_angle(const core::MeasurementSetting& u) {
    const double az = core::wrap_two_pi(u.phi_axis);
    const double tol = 1e-9;
    if (std::abs(az) < tol || std::abs(az - 2.0 * pi) < tol) return u.theta;
    if (std::abs(az - pi) < tol) return -u.theta;
    throw unsupported_setting(
        "setting azimuth " + std::to_string(az) +
        " lies outside the polarizer plane (azimuth 0 or pi)");
}

}  // namespace detail_sim

inline CoincidenceCounts simulate_counts(const core::StateParams& s,
                                         const core::MeasurementSetting& a,
                                         const core::MeasurementSetting& b,
                                         const Config& cfg) {
    if (!(cfg.mean_total_counts > 0.0))
        throw std::invalid_argument("mean_total_counts must be positive");
    CoincidenceCounts out;
    out.theta_a = detail_sim::in_plane_angle(a);
    out.theta_b = detail_sim::in_plane_angle(b);
    const auto jp = core::joint_probabilities(s, a, b);
    std::mt19937_64 rng(cfg.seed);
    std::uint64_t* bins[4] = {&out.c00, &out.c01, &out.c10, &out.c11};
    const double probs[4] = {jp.p00, jp.p01, jp.p10, jp.p11};
    if (!cfg.multinomial_totals) {
        for (int i = 0; i < 4; ++i) {
            std::poisson_distribution<std::uint64_t> draw(cfg.mean_total_counts * probs[i]);
            *bins[i] = probs[i] > 0.0 ? draw(rng) : 0;
        }
        return out;
    }
    // Conditioned variant: fixed total split by sequential binomials.
    auto remaining = static_cast<std::uint64_t>(std::llround(cfg.mean_total_counts));
    double mass = 1.0;
    for (int i = 0; i < 3 && remaining > 0; ++i) {
        const double q = mass > 0.0 ? std::min(1.0, probs[i] / mass) : 0.0;
        std::binomial_distribution<std::uint64_t> draw(remaining, q);
        const std::uint64_t c = q > 0.0 ? draw(rng) : 0;
        *bins[i] = c;
        remaining -= c;
        mass -= probs[i];
    }
    *bins[3] = remaining;
    return out;
}

inline core::JointProbabilities estimate_probabilities(const CoincidenceCounts& c) {
    const double n = static_cast<double>(c.total());
    if (n == 0.0) throw zero_denominator("no counts recorded");
    return {static_cast<double>(c.c00) / n, static_cast<double>(c.c01) / n,
            static_cast<double>(c.c10) / n, static_cast<double>(c.c11) / n};
}

namespace detail_sim {

// Correlation estimate E = (c00 + c11 - c01 - c10) / N with Poisson error
//   dE = 2 sqrt( (c00 + c11)(c01 + c10) / N^3 ).
inline Estimate correlation_estimate(const CoincidenceCounts& c) {
    const double n = static_cast<double>(c.total());
    if (n == 0.0) throw zero_denominator("no counts recorded");
    const double same = static_cast<double>(c.c00 + c.c11);
    const double diff = static_cast<double>(c.c01 + c.c10);
    Estimate e;
    e.value = (same - diff) / n;
    e.sigma = 2.0 * std::sqrt(same * diff / (n * n * n));
    e.degenerate = e.sigma == 0.0;
    return e;
}

inline bool close_angle(double a, double b, double tol = 1e-6) { return std::abs(a - b) < tol; }

}  // namespace detail_sim

// Visibility from counts taken with both sides at the same basis: along z
// (in-plane angle 0) or along x (in-plane angle +-pi/2).  The angle check
// guards against feeding mismatched count sets.
inline Estimate estimate_visibility(const CoincidenceCounts& c) {
    const bool along_z = detail_sim::close_angle(std::sin(c.theta_a), 0.0) &&
                         detail_sim::close_angle(std::sin(c.theta_b), 0.0);
    const bool along_x = detail_sim::close_angle(std::cos(c.theta_a), 0.0) &&
                         detail_sim::close_angle(std::cos(c.theta_b), 0.0);
    if (!along_z && !along_x)
        throw angle_mismatch("visibility expects both angles at 0 (z) or +-pi/2 (x), got " +
                             std::to_string(c.theta_a) + ", " + std::to_string(c.theta_b));
    Estimate e = detail_sim::correlation_estimate(c);
    e.value = std::abs(e.value);
    return e;
}

// CHSH estimate from the four setting pairs, ordered (a,b), (a,b'),
// (a',b), (a',b').  Uses the same sign arrangement as chsh::value:
//   S = | -E(a,b) + E(a,b') + E(a',b) + E(a',b') |,
// with dS the quadrature sum of the four dE.
inline Estimate estimate_chsh(const CoincidenceCounts& ab, const CoincidenceCounts& abp,
                              const CoincidenceCounts& apb, const CoincidenceCounts& apbp) {
    if (!detail_sim::close_angle(ab.theta_a, abp.theta_a) ||
        !detail_sim::close_angle(apb.theta_a, apbp.theta_a) ||
        !detail_sim::close_angle(ab.theta_b, apb.theta_b) ||
        !detail_sim::close_angle(abp.theta_b, apbp.theta_b))
        throw angle_mismatch("CHSH count sets do not share settings in the order "
                             "(a,b), (a,b'), (a',b), (a',b')");
    const Estimate e1 = detail_sim::correlation_estimate(ab);
    const Estimate e2 = detail_sim::correlation_estimate(abp);
    const Estimate e3 = detail_sim::correlation_estimate(apb);
    const Estimate e4 = detail_sim::correlation_estimate(apbp);
    Estimate e;
    e.value = std::abs(-e1.value + e2.value + e3.value + e4.value);
    e.sigma = std::sqrt(e1.sigma * e1.sigma + e2.sigma * e2.sigma + e3.sigma * e3.sigma +
                        e4.sigma * e4.sigma);
    e.degenerate = e1.degenerate || e2.degenerate || e3.degenerate || e4.degenerate;
    return e;
}

// Steering estimate for one outcome pair from the two setting pairs
// (S with P) and (T with Q):
//   F = 1/2 [ C1/(C1+C2) + C3/(C3+C4) ],
//   dF = 1/2 sqrt( C1 C2/(C1+C2)^3 + C3 C4/(C3+C4)^3 ),
// where C1, C3 count the requested outcomes and C2, C4 the flipped remote
// outcome at fixed conditioning outcome.
inline Estimate estimate_steering_outcome(const CoincidenceCounts& with_p,
                                          const CoincidenceCounts& with_q, int a, int b) {
    const double c1 = static_cast<double>(with_p.at(a, b));
    const double c2 = static_cast<double>(with_p.at(a, 1 - b));
    const double c3 = static_cast<double>(with_q.at(a, b));
    const double c4 = static_cast<double>(with_q.at(a, 1 - b));
    const double d1 = c1 + c2;
    const double d2 = c3 + c4;
    if (d1 == 0.0 || d2 == 0.0)
        throw zero_denominator("no counts for the conditioning outcome");
    Estimate e;
    e.value = 0.5 * (c1 / d1 + c3 / d2);
    e.sigma = 0.5 * std::sqrt(c1 * c2 / (d1 * d1 * d1) + c3 * c4 / (d2 * d2 * d2));
    e.degenerate = e.sigma == 0.0;
    return e;
}

struct SteeringEstimate {
    Estimate estimate;
    int outcome_a = 0;
    int outcome_b = 0;
};

// Reports the equal-outcome pair with the larger estimate, mirroring the
// branch selection of the exact computation.
inline SteeringEstimate estimate_steering(const CoincidenceCounts& with_p,
                                          const CoincidenceCounts& with_q) {
    const Estimate f00 = estimate_steering_outcome(with_p, with_q, 0, 0);
    const Estimate f11 = estimate_steering_outcome(with_p, with_q, 1, 1);
    if (f11.value > f00.value) return {f11, 1, 1};
    return {f00, 0, 0};
}

enum class PhiHint { zero, pi };

// Inverts the visibilities into state parameters at a known alpha:
//   p = V_z,   eta = (1 + V_x / (2 p sqrt(alpha(1-alpha)))) / 2,
// with phi = 0 or pi from the sign of the measured x correlation.  Values
// that overshoot the physical range by more than `slack` (measurement
// noise) are rejected; smaller overshoots are clamped.
inline core::StateParams fit_params(const Estimate& vz, const Estimate& vx, double alpha,
                                    PhiHint hint, double slack = 0.02) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw zero_denominator("alpha at 0 or 1 leaves eta unconstrained");
    if (vz.value < 0.0 || vx.value < 0.0)
        throw std::invalid_argument("visibilities are non-negative by construction");
    if (vz.value > 1.0 + slack)
        throw inconsistent_visibilities("V_z = " + std::to_string(vz.value) +
                                        " exceeds 1 beyond the allowed slack");
    const double p = std::min(vz.value, 1.0);
    if (p == 0.0) throw zero_denominator("V_z = 0 leaves eta unconstrained");
    const double eta_raw = 0.5 * (1.0 + vx.value / (2.0 * p * std::sqrt(alpha * (1.0 - alpha))));
    if (eta_raw > 1.0 + slack)
        throw inconsistent_visibilities(
            "V_x implies eta = " + std::to_string(eta_raw) +
            "; no state in the family reproduces these visibilities");
    const double eta = std::min(eta_raw, 1.0);
    return core::StateParams{alpha, p, eta, hint == PhiHint::zero ? 0.0 : pi};
}

// Propagated uncertainty of alpha = cos^2(2 chi) for a wave-plate angle
// uncertainty delta_chi: d alpha = 2 |sin(4 chi)| delta_chi.
inline double alpha_error(double chi, double delta_chi) {
    return 2.0 * std::abs(std::sin(4.0 * chi)) * std::abs(delta_chi);
}

}  // namespace steerkit::sim
