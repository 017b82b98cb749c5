#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sixport/params.hpp"
#include "sixport/probability.hpp"

namespace sixport {

/// Counts of postselected photons per time window together with the
/// generating model identity. Regenerating with the same
/// (params, model, seed, run) yields the identical sequence.
struct DetectionSeries {
    std::vector<std::int64_t> counts;  // length n_windows, each in [0, ns]
    ModelKind model;
    ExperimentParams params;
    std::uint64_t seed = 0;
    std::uint32_t run = 0;             // ensemble run index (substream)
};

/// Draw N_k ~ Binomial(N_s, p_window(k)) independently for every window.
DetectionSeries sample_counts(const ExperimentParams& params, const ModelKind& model,
                              std::uint64_t seed, std::uint32_t run = 0);

/// Low-level variant with explicit per-window probabilities (also the hook
/// for degenerate-model tests).
std::vector<std::int64_t> sample_counts_p(std::span<const double> probs, std::int64_t ns,
                                          std::uint64_t seed, std::uint32_t run = 0);

/// N_s * p_window(k) for every k: the expectation curve plotted with the data.
std::vector<double> expected_counts(const ExperimentParams& params, const ModelKind& model);

}  // namespace sixport
