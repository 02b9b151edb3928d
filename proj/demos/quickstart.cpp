// Minimal tour: build a state, read off the detection quantities, check the
// thresholds, and run one simulated acquisition.

#include <cstdio>

#include "steerkit/steerkit.hpp"

int main() {
    using namespace steerkit;

    // partially entangled pair, 90% singlet fraction, slight phase mixing
    core::StateParams s{0.5, 0.90, 0.96, pi};

    std::printf("concurrence        %.6f\n", core::concurrence(s));

    const auto bell = chsh::maximize(s);
    std::printf("max CHSH           %.6f  (Bob angles %.4f, %.4f)\n", bell.s_value,
                bell.settings.b.theta, bell.settings.b_prime.theta);

    const auto f1 = steering::scenario_I(s);
    const auto f2 = steering::scenario_II(s);
    std::printf("steering F (I)     %.6f  limit %.6f  violated %s\n", f1.f_value, f1.f_lim,
                f1.violates ? "yes" : "no");
    std::printf("steering F (II)    %.6f  limit %.6f  violated %s\n", f2.f_value, f2.f_lim,
                f2.violates ? "yes" : "no");

    for (auto kind : {bounds::Kind::entanglement, bounds::Kind::steering_II,
                      bounds::Kind::steering_I, bounds::Kind::chsh}) {
        const auto p_min = bounds::p_threshold(kind, s.alpha, s.eta);
        if (p_min)
            std::printf("threshold p        %.6f  (kind %d)\n", *p_min, static_cast<int>(kind));
    }

    // one night of counting at the CHSH settings
    sim::Config cfg;
    cfg.seed = 42;
    const auto ab = sim::simulate_counts(s, bell.settings.a, bell.settings.b, cfg);
    cfg.seed = 43;
    const auto abp = sim::simulate_counts(s, bell.settings.a, bell.settings.b_prime, cfg);
    cfg.seed = 44;
    const auto apb = sim::simulate_counts(s, bell.settings.a_prime, bell.settings.b, cfg);
    cfg.seed = 45;
    const auto apbp = sim::simulate_counts(s, bell.settings.a_prime, bell.settings.b_prime, cfg);
    const auto est = sim::estimate_chsh(ab, abp, apb, apbp);
    std::printf("estimated CHSH     %.4f +- %.4f\n", est.value, est.sigma);

    return 0;
}
