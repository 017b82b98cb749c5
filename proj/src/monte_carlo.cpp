#include "sixport/monte_carlo.hpp"

#include "sixport/binomial.hpp"

namespace sixport {

DetectionSeries sample_counts(const ExperimentParams& params, const ModelKind& model,
                              std::uint64_t seed, std::uint32_t run) {
    params.validate();
    if (!model.timed())
        throw std::invalid_argument("sample_counts requires a timed model kind");
    DetectionSeries series;
    series.model = model;
    series.params = params;
    series.seed = seed;
    series.run = run;
    series.counts.resize(static_cast<std::size_t>(params.n_windows));
    for (int k = 1; k <= params.n_windows; ++k) {
        PhiloxStream rng(seed, run, static_cast<std::uint32_t>(k));
        const double p = p_window(params, k, model);
        series.counts[static_cast<std::size_t>(k - 1)] = binomial_draw(rng, params.ns, p);
    }
    return series;
}

std::vector<std::int64_t> sample_counts_p(std::span<const double> probs, std::int64_t ns,
                                          std::uint64_t seed, std::uint32_t run) {
    std::vector<std::int64_t> counts(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        PhiloxStream rng(seed, run, static_cast<std::uint32_t>(i + 1));
        counts[i] = binomial_draw(rng, ns, probs[i]);
    }
    return counts;
}

std::vector<double> expected_counts(const ExperimentParams& params, const ModelKind& model) {
    params.validate();
    std::vector<double> expected(static_cast<std::size_t>(params.n_windows));
    for (int k = 1; k <= params.n_windows; ++k)
        expected[static_cast<std::size_t>(k - 1)] =
            static_cast<double>(params.ns) * p_window(params, k, model);
    return expected;
}

}  // namespace sixport
