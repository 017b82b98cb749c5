#pragma once

#include <cstdint>
#include <vector>

#include "sixport/params.hpp"

namespace sixport {

/// First-order detection laws of the modulated experiment. All angles are
/// reduced mod 2*pi before the cosine; results are clamped to [0,1] and a
/// clamp diagnostic is counted when the overshoot exceeds 1e-12 (the
/// expansions can leave [0,1] when driven outside their small-epsilon
/// regime).

/// cos(omega * t) with the argument reduced mod 2*pi first. Every
/// probability law evaluates its phases through this one routine.
double reduced_cos(double omega, double t);

/// Plain run: (1/18)[1 + 2e(2cos w1 t - cos w2 t + cos w3 t + cos w4 t)];
/// without eta the 2cos w1 t term is absent.
double p_detect_plain(const ExperimentParams& params, double t);

/// Conditioned on presence at L1: (e^2/12)(2cos w1 t + cos w3 t + cos w4 t)^2,
/// plus the next-order term (e^3/12)(...)^2 (cos w3 t - cos w4 t + 2cos w5 t)
/// when params.third_order is set.
double p_detect_given_l1(const ExperimentParams& params, double t);

/// Conditioned on presence at L4: (1/6)[1 + 2e(cos w1 t + cos w4 t - cos w5 t)].
double p_detect_given_l4(const ExperimentParams& params, double t);

/// Model probability at the window midpoint t = (k - 1/2) T_s, k in 1..n_windows.
/// Only timed model kinds are accepted.
double p_window(const ExperimentParams& params, int k, const ModelKind& model);

/// Probabilities of the two-window simplified experiment: detection
/// probability with the constant disturbance on, and in the quiet window.
struct TwoWindowProbs {
    double disturbed = 0.0;
    double quiet = 0.0;
    /// Set when the pair is a delta->0 limit: values are rates per unit
    /// delta, valid only for ratio consumers. Absolute-probability callers
    /// must construct the model with delta > 0.
    bool scale_free = false;
};

/// Two-window detection probabilities for a Simplified model kind,
/// first order in epsilon. For SimplifiedLocalized(L1) without eta and
/// delta == 0 the pair is returned in scale-free (per-delta) form.
TwoWindowProbs simplified_probs(double epsilon, const ModelKind& model);

/// Count of clamp events with overshoot above 1e-12 since process start
/// (or since reset). Used by the CLI to fail loudly on out-of-regime use.
std::uint64_t clamp_diagnostic_count();
void reset_clamp_diagnostics();

}  // namespace sixport
