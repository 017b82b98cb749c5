#include "sixport/probability.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

namespace sixport {

namespace {

std::atomic<std::uint64_t> g_clamp_events{0};

double clamp_probability(double p) {
    if (p < 0.0) {
        if (p < -1e-12) g_clamp_events.fetch_add(1, std::memory_order_relaxed);
        return 0.0;
    }
    if (p > 1.0) {
        if (p > 1.0 + 1e-12) g_clamp_events.fetch_add(1, std::memory_order_relaxed);
        return 1.0;
    }
    return p;
}

}  // namespace

std::uint64_t clamp_diagnostic_count() { return g_clamp_events.load(); }
void reset_clamp_diagnostics() { g_clamp_events.store(0); }

// k*T_s*omega stays small at the defaults but reduction keeps long runs safe.
double reduced_cos(double omega, double t) {
    return std::cos(std::fmod(omega * t, 2.0 * std::numbers::pi));
}

double p_detect_plain(const ExperimentParams& params, double t) {
    const double e = params.epsilon;
    double mod = -reduced_cos(params.omega(2), t) + reduced_cos(params.omega(3), t) +
                 reduced_cos(params.omega(4), t);
    if (params.eta_present) mod += 2.0 * reduced_cos(params.omega(1), t);
    return clamp_probability((1.0 + 2.0 * e * mod) / 18.0);
}

double p_detect_given_l1(const ExperimentParams& params, double t) {
    const double e = params.epsilon;
    const double s = 2.0 * reduced_cos(params.omega(1), t) + reduced_cos(params.omega(3), t) +
                     reduced_cos(params.omega(4), t);
    double p = e * e / 12.0 * s * s;
    if (params.third_order) {
        p += e * e * e / 12.0 * s * s *
             (reduced_cos(params.omega(3), t) - reduced_cos(params.omega(4), t) +
              2.0 * reduced_cos(params.omega(5), t));
    }
    return clamp_probability(p);
}

double p_detect_given_l4(const ExperimentParams& params, double t) {
    const double e = params.epsilon;
    const double mod = reduced_cos(params.omega(1), t) + reduced_cos(params.omega(4), t) -
                       reduced_cos(params.omega(5), t);
    return clamp_probability((1.0 + 2.0 * e * mod) / 6.0);
}

double p_window(const ExperimentParams& params, int k, const ModelKind& model) {
    if (k < 1 || k > params.n_windows)
        throw std::out_of_range("window index k must be in 1..n_windows");
    const double t = (k - 0.5) * params.ts_seconds;
    switch (model.family) {
        case ModelKind::Family::Unconditioned: return p_detect_plain(params, t);
        case ModelKind::Family::LocalizedL1: return p_detect_given_l1(params, t);
        case ModelKind::Family::LocalizedL4: return p_detect_given_l4(params, t);
        default:
            throw std::invalid_argument("p_window requires a timed model kind");
    }
}

TwoWindowProbs simplified_probs(double epsilon, const ModelKind& model) {
    const double e = epsilon;
    if (model.family == ModelKind::Family::SimplifiedPlain) {
        const double quiet = 1.0 / 18.0;
        double disturbed = quiet;
        switch (model.site) {
            case Location::L1: disturbed = model.eta ? (1.0 + 4.0 * e) / 18.0 : 1.0 / 18.0; break;
            case Location::L2: disturbed = (1.0 - 2.0 * e) / 18.0; break;
            case Location::L3: disturbed = (1.0 + 2.0 * e) / 18.0; break;
            case Location::L4: disturbed = (model.eta ? 1.0 + 2.0 * e : 1.0 - 2.0 * e) / 18.0; break;
            case Location::L5: disturbed = 1.0 / 18.0; break;
        }
        return {disturbed, quiet, false};
    }
    if (model.family == ModelKind::Family::SimplifiedLocalized) {
        if (model.site == Location::L1) {
            if (model.eta) return {e * e / 3.0, 0.0, false};
            // Without eta the L1 pair vanishes with the inner-loop imbalance;
            // delta == 0 yields the analytic delta->0 limit in per-delta form,
            // usable only where the ratio enters.
            if (model.delta > 0.0)
                return {model.delta * (1.0 - 2.0 * e) / 3.0, model.delta / 3.0, false};
            return {(1.0 - 2.0 * e) / 3.0, 1.0 / 3.0, true};
        }
        const bool flip_l4 = model.site == Location::L4 && model.eta;
        const double base = model.site == Location::L5 ? 1.0 / 3.0 : 1.0 / 6.0;
        const double disturbed = base * (flip_l4 ? 1.0 + 2.0 * e : 1.0 - 2.0 * e);
        return {disturbed, base, false};
    }
    throw std::invalid_argument("simplified_probs requires a Simplified model kind");
}

}  // namespace sixport
