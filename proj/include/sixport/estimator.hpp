#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sixport/monte_carlo.hpp"

namespace sixport {

/// Search interval for the modulation frequency, in 1/s.
struct FrequencyBounds {
    double lo = 48.0;
    double hi = 202.0;
};

/// Result of a single maximum-likelihood search.
struct Estimate {
    double omega = 0.0;
    bool degenerate = false;  ///< likelihood flat over the whole interval
    bool tied = false;        ///< several exact grid maxima; smallest returned
};

/// Log-likelihood core: sum over the first m windows of
///   log C(N_s, N_k) + N_k log P_k + (N_s - N_k) log(1 - P_k).
/// Windows with P_k == 0 contribute 0 when N_k == 0 and -inf otherwise
/// (the candidate is impossible, which is informative); symmetrically for
/// P_k == 1.
double log_likelihood_probs(std::span<const std::int64_t> counts, std::int64_t ns,
                            std::span<const double> probs);

/// Model-aware log-likelihood with `candidate` substituted for the target
/// frequency; all other frequencies are taken as known from series.params.
double log_likelihood(const DetectionSeries& series, int m, double candidate, int target);

/// Maximize the log-likelihood over the bounds: dense 0.1 1/s grid scan,
/// then local ternary refinement to 1e-3 1/s. Deterministic; exact grid
/// ties resolve to the smallest candidate. A flat likelihood returns the
/// interval midpoint flagged degenerate.
Estimate estimate_omega(const DetectionSeries& series, int m, int target,
                        FrequencyBounds bounds = {});

/// Prefix estimates for m = 1..n_windows with deviations from the true
/// target frequency and cumulative postselected counts.
struct EstimationTrace {
    int target = 1;
    FrequencyBounds bounds;
    std::vector<double> estimates;        // omega_hat(m)
    std::vector<double> deviations;       // |omega_hat(m) - omega_target|
    std::vector<std::int64_t> n_post;     // sum of counts over k <= m
    std::vector<bool> degenerate;
};

EstimationTrace estimation_trace(const DetectionSeries& series, int target,
                                 FrequencyBounds bounds = {});

/// Smallest m such that the deviation stays within tol for every later
/// prefix as well; nullopt when the tail never settles.
std::optional<int> convergence_step(const EstimationTrace& trace, double tol = 1.0);

/// Cumulative postselected photons over the first m windows.
std::int64_t n_post(const DetectionSeries& series, int m);

/// Deviations and cumulative counts averaged over independent runs
/// (substreams of base_seed). Per-run convergence steps are kept for
/// median statistics; -1 marks a run that never settles.
struct EnsembleStats {
    int runs = 0;
    int target = 1;
    std::vector<double> mean_deviation;     // over m
    std::vector<double> mean_n_post;        // over m
    std::vector<int> run_convergence;       // per run, -1 = none
};

EnsembleStats ensemble_stats(const ExperimentParams& params, const ModelKind& model,
                             int target, int runs, std::uint64_t base_seed,
                             FrequencyBounds bounds = {}, double tol = 1.0,
                             int threads = 0);

/// Smallest m from which curve[m'] <= tol holds for all m' >= m (1-based);
/// nullopt when even the final value exceeds tol.
std::optional<int> sustained_crossing(std::span<const double> curve, double tol);

/// Median of per-run convergence steps; runs that never settle count as
/// +infinity. nullopt when the median itself is unsettled.
std::optional<double> median_convergence(std::span<const int> run_convergence);

}  // namespace sixport
