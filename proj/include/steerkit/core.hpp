#pragma once

// Two-qubit state family and its measurement statistics.
//
// The family mixes two phase-related pure states
//   |F+> = sqrt(alpha)|00> + e^{i phi} sqrt(1-alpha)|11>
//   |F-> = sqrt(alpha)|00> - e^{i phi} sqrt(1-alpha)|11>
// with weights eta/(1-eta), then blends the result with white noise with
// weight p.  The density matrix is X-shaped in the computational basis,
// which keeps probabilities, eigenvalues and concurrence in closed form.
//
// Joint outcome probabilities are provided both in closed form and through
// an explicit matrix-trace evaluation; the two paths are independent and
// cross-checked in the test suite.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace steerkit {

inline constexpr double pi = std::numbers::pi;

// Conditioning on an outcome whose probability vanishes.
class undefined_conditional : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A count-ratio denominator that is exactly zero.
class zero_denominator : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A measurement setting outside what the simulated hardware can realize.
class unsupported_setting : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Counts taken at angles that do not match the requested estimator.
class angle_mismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Measured visibilities that no state in the family can produce.
class inconsistent_visibilities : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace core {

using complexd = std::complex<double>;

// Wraps an angle into [0, 2*pi).
inline double wrap_two_pi(double a) {
    a = std::fmod(a, 2.0 * pi);
    return a < 0.0 ? a + 2.0 * pi : a;
}

// Wraps an angle into (-pi, pi].
inline double wrap_pi(double a) {
    a = wrap_two_pi(a);
    return a > pi ? a - 2.0 * pi : a;
}

struct StateParams {
    double alpha;  // weight of |00> in the pure-state pair
    double p;      // mixing weight of the pair against white noise
    double eta;    // blend between the + and - phase pure states
    double phi;    // relative phase, normalized to [0, 2*pi)

    StateParams(double alpha_, double p_, double eta_, double phi_)
        : alpha(alpha_), p(p_), eta(eta_), phi(wrap_two_pi(phi_)) {
        auto check_unit = [](double v, const char* name) {
            if (!(v >= 0.0 && v <= 1.0))
                throw std::invalid_argument(std::string(name) + " must lie in [0, 1], got " +
                                            std::to_string(v));
        };
        check_unit(alpha, "alpha");
        check_unit(p, "p");
        check_unit(eta, "eta");
        if (!std::isfinite(phi_)) throw std::invalid_argument("phi must be finite");
    }
};

// Projective qubit measurement along the Bloch direction
//   n = (sin(theta) cos(phi_axis), sin(theta) sin(phi_axis), cos(theta)).
// Construction canonicalizes theta into [0, pi]; a polar angle outside that
// range is folded back by advancing the azimuth by pi, which designates the
// same direction.
struct MeasurementSetting {
    double theta = 0.0;
    double phi_axis = 0.0;

    MeasurementSetting() = default;

    MeasurementSetting(double theta_, double phi_axis_) {
        if (!std::isfinite(theta_) || !std::isfinite(phi_axis_))
            throw std::invalid_argument("measurement angles must be finite");
        double t = wrap_two_pi(theta_);
        double f = phi_axis_;
        if (t > pi) {
            t = 2.0 * pi - t;
            f += pi;
        }
        theta = t;
        phi_axis = wrap_two_pi(f);
    }

    std::array<double, 3> bloch() const {
        return {std::sin(theta) * std::cos(phi_axis),
                std::sin(theta) * std::sin(phi_axis),
                std::cos(theta)};
    }
};

inline const MeasurementSetting sigma_z_setting{0.0, 0.0};
inline const MeasurementSetting sigma_x_setting{pi / 2.0, 0.0};

struct JointProbabilities {
    double p00 = 0.0, p01 = 0.0, p10 = 0.0, p11 = 0.0;

    double operator()(int a, int b) const {
        if ((a != 0 && a != 1) || (b != 0 && b != 1))
            throw std::invalid_argument("outcomes must be 0 or 1");
        return a == 0 ? (b == 0 ? p00 : p01) : (b == 0 ? p10 : p11);
    }

    double marginal_a(int a) const { return (*this)(a, 0) + (*this)(a, 1); }
    double marginal_b(int b) const { return (*this)(0, b) + (*this)(1, b); }

    // <A (x) B> = sum_{ab} (-1)^{a+b} P(a,b)
    double correlation() const { return p00 - p01 - p10 + p11; }

    double sum() const { return p00 + p01 + p10 + p11; }
};

struct DensityMatrix {
    std::array<std::array<complexd, 4>, 4> m{};

    complexd& at(int i, int j) { return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
    const complexd& at(int i, int j) const {
        return m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

    double trace_deviation() const {
        complexd tr = m[0][0] + m[1][1] + m[2][2] + m[3][3];
        return std::abs(tr - complexd{1.0, 0.0});
    }

    double hermiticity_deviation() const {
        double worst = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                worst = std::max(worst, std::abs(at(i, j) - std::conj(at(j, i))));
        return worst;
    }

    // Entries outside the main and anti diagonal must vanish for the
    // closed-form eigenvalue and concurrence paths to apply.
    bool is_x_shaped(double tol = 1e-12) const {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (i != j && i + j != 3 && std::abs(at(i, j)) > tol) return false;
        return true;
    }

    // Eigenvalues through the 2x2 block reduction of the X pattern: the
    // {|00>,|11>} and {|01>,|10>} sectors decouple, so no general
    // eigensolver is needed.
    std::array<double, 4> eigenvalues() const {
        if (!is_x_shaped())
            throw std::logic_error("eigenvalues: matrix is not X-shaped");
        auto pair_eigs = [](double d1, double d2, complexd off) {
            double mean = 0.5 * (d1 + d2);
            double rad = std::hypot(0.5 * (d1 - d2), std::abs(off));
            return std::array<double, 2>{mean - rad, mean + rad};
        };
        auto outer = pair_eigs(m[0][0].real(), m[3][3].real(), m[0][3]);
        auto inner = pair_eigs(m[1][1].real(), m[2][2].real(), m[1][2]);
        return {outer[0], outer[1], inner[0], inner[1]};
    }

    double min_eigenvalue() const {
        auto e = eigenvalues();
        return std::min(std::min(e[0], e[1]), std::min(e[2], e[3]));
    }
};

inline DensityMatrix build_state(const StateParams& s) {
    DensityMatrix rho;
    const double noise = (1.0 - s.p) / 4.0;
    const double root = std::sqrt(s.alpha * (1.0 - s.alpha));
    // Both pure states share the diagonal; the phase mixture only scales the
    // corner coherence by (2*eta - 1).
    rho.at(0, 0) = s.p * s.alpha + noise;
    rho.at(1, 1) = noise;
    rho.at(2, 2) = noise;
    rho.at(3, 3) = s.p * (1.0 - s.alpha) + noise;
    const double coherence = s.p * (2.0 * s.eta - 1.0) * root;
    rho.at(0, 3) = coherence * std::exp(complexd{0.0, -s.phi});
    rho.at(3, 0) = std::conj(rho.at(0, 3));
    return rho;
}

// 2(2*eta - 1) sqrt(alpha(1-alpha)): the in-plane correlation amplitude that
// every interference term below carries.  The factor 2 is fixed by the
// matrix-trace path (see the oracle tests).
inline double interference_amplitude(const StateParams& s) {
    return 2.0 * (2.0 * s.eta - 1.0) * std::sqrt(s.alpha * (1.0 - s.alpha));
}

namespace detail {

inline double clamp_probability(double v) {
    if (v < 0.0) {
        if (v < -1e-12)
            throw std::logic_error("probability below -1e-12: " + std::to_string(v));
        return 0.0;
    }
    return v;
}

// Eigenvector of the Bloch-direction observable for the given outcome,
// as a two-component column.
inline std::array<complexd, 2> outcome_vector(const MeasurementSetting& u, int outcome) {
    const double c = std::cos(u.theta / 2.0);
    const double s = std::sin(u.theta / 2.0);
    const complexd phase = std::exp(complexd{0.0, u.phi_axis});
    if (outcome == 0) return {complexd{c, 0.0}, phase * s};
    return {complexd{-s, 0.0}, phase * c};
}

}  // namespace detail

enum class ProbPath { closed_form, matrix_trace };

// Joint outcome probabilities for measurements a (first qubit) and b
// (second qubit).  Closed form:
//   P(a,b) = 1/4 [ 1 + (-1)^a <A> + (-1)^b <B> + (-1)^{a+b} <AB> ]
// with <A> = <B> = p (2 alpha - 1) cos(theta) on the respective side and
//   <AB> = p [ cosA cosB + k sinA sinB ],
//   k = interference_amplitude * cos(phi - phi_axis_a - phi_axis_b).
inline JointProbabilities joint_probabilities(const StateParams& s,
                                              const MeasurementSetting& a,
                                              const MeasurementSetting& b,
                                              ProbPath path = ProbPath::closed_form) {
    JointProbabilities jp;
    if (path == ProbPath::closed_form) {
        const double u = 2.0 * s.alpha - 1.0;
        const double ca = std::cos(a.theta), sa = std::sin(a.theta);
        const double cb = std::cos(b.theta), sb = std::sin(b.theta);
        const double k =
            interference_amplitude(s) * std::cos(s.phi - a.phi_axis - b.phi_axis);
        const double mean_a = s.p * u * ca;
        const double mean_b = s.p * u * cb;
        const double corr = s.p * (ca * cb + k * sa * sb);
        auto prob = [&](int oa, int ob) {
            const double za = oa == 0 ? 1.0 : -1.0;
            const double zb = ob == 0 ? 1.0 : -1.0;
            return detail::clamp_probability(
                0.25 * (1.0 + za * mean_a + zb * mean_b + za * zb * corr));
        };
        jp.p00 = prob(0, 0);
        jp.p01 = prob(0, 1);
        jp.p10 = prob(1, 0);
        jp.p11 = prob(1, 1);
        return jp;
    }
    // Matrix-trace path: <v_a (x) v_b | rho | v_a (x) v_b>.
    const DensityMatrix rho = build_state(s);
    auto prob = [&](int oa, int ob) {
        const auto va = detail::outcome_vector(a, oa);
        const auto vb = detail::outcome_vector(b, ob);
        std::array<complexd, 4> v{va[0] * vb[0], va[0] * vb[1], va[1] * vb[0], va[1] * vb[1]};
        complexd acc{0.0, 0.0};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) acc += std::conj(v[static_cast<std::size_t>(i)]) *
                                               rho.at(i, j) * v[static_cast<std::size_t>(j)];
        return detail::clamp_probability(acc.real());
    };
    jp.p00 = prob(0, 0);
    jp.p01 = prob(0, 1);
    jp.p10 = prob(1, 0);
    jp.p11 = prob(1, 1);
    return jp;
}

inline double correlation(const StateParams& s, const MeasurementSetting& a,
                          const MeasurementSetting& b,
                          ProbPath path = ProbPath::closed_form) {
    return joint_probabilities(s, a, b, path).correlation();
}

struct Visibilities {
    double vz = 0.0;  // |<sigma_z (x) sigma_z>|
    double vx = 0.0;  // |<sigma_x (x) sigma_x>|
};

// Computed from the correlation so that arbitrary phi is handled; the
// closed forms vz = p and vx = |interference_amplitude| p |cos(phi)| are
// asserted against this in the tests.
inline Visibilities visibilities(const StateParams& s) {
    return {std::abs(correlation(s, sigma_z_setting, sigma_z_setting)),
            std::abs(correlation(s, sigma_x_setting, sigma_x_setting))};
}

// Concurrence of the family in closed form.  The corner coherence is
// |rho_03| = p |2 eta - 1| sqrt(alpha(1-alpha)) and the inner diagonal is
// the noise floor (1-p)/4, so the X-state rule collapses to one branch.
// (The absolute value on 2 eta - 1 matters: eta and 1-eta label the same
// entanglement with opposite corner sign.)
inline double concurrence(const StateParams& s) {
    const double coherence =
        s.p * std::abs(2.0 * s.eta - 1.0) * std::sqrt(s.alpha * (1.0 - s.alpha));
    return 2.0 * std::max(0.0, coherence - (1.0 - s.p) / 4.0);
}

// General X-state concurrence rule, evaluated on an explicit matrix:
//   C = 2 max(0, |rho_12| - sqrt(rho_00 rho_33), |rho_03| - sqrt(rho_11 rho_22)).
inline double concurrence_x_state(const DensityMatrix& rho) {
    if (!rho.is_x_shaped())
        throw std::logic_error("concurrence_x_state: matrix is not X-shaped");
    const double a = rho.at(0, 0).real();
    const double b = rho.at(1, 1).real();
    const double c = rho.at(2, 2).real();
    const double d = rho.at(3, 3).real();
    const double inner = std::abs(rho.at(1, 2)) - std::sqrt(std::max(0.0, a * d));
    const double outer = std::abs(rho.at(0, 3)) - std::sqrt(std::max(0.0, b * c));
    return 2.0 * std::max({0.0, inner, outer});
}

// Half-wave-plate angle to alpha: alpha = cos^2(2 chi).
inline double hwp_to_alpha(double chi) {
    const double c = std::cos(2.0 * chi);
    return c * c;
}

}  // namespace core
}  // namespace steerkit
