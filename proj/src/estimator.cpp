#include "sixport/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace sixport {

namespace {

constexpr double kGridStep = 0.1;     // dense scan resolution, 1/s
constexpr double kRefineTol = 1e-3;   // local refinement resolution, 1/s
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double window_log_term(std::int64_t count, std::int64_t ns, double p) {
    if (p <= 0.0) return count == 0 ? 0.0 : kNegInf;
    if (p >= 1.0) return count == ns ? 0.0 : kNegInf;
    return static_cast<double>(count) * std::log(p) +
           static_cast<double>(ns - count) * std::log1p(-p);
}

/// Shared machinery for estimate_omega and estimation_trace: per-window
/// caches plus incremental per-candidate grid sums, so a full prefix sweep
/// costs one window update per step instead of a fresh scan. The candidate
/// enters each law only through cos(candidate * t_k), which keeps the
/// refinement evaluations cheap as well.
class LikelihoodScanner {
public:
    LikelihoodScanner(const DetectionSeries& series, int target, FrequencyBounds bounds)
        : series_(series), target_(target), bounds_(bounds) {
        if (target < 1 || target > 5)
            throw std::out_of_range("target frequency index must be in 1..5");
        if (!(bounds.lo > 0.0) || !(bounds.hi > bounds.lo))
            throw std::invalid_argument("bad frequency bounds");
        const int n_grid = static_cast<int>(std::floor((bounds.hi - bounds.lo) / kGridStep)) + 1;
        grid_.resize(static_cast<std::size_t>(n_grid));
        for (int i = 0; i < n_grid; ++i)
            grid_[static_cast<std::size_t>(i)] = bounds.lo + kGridStep * i;
        sums_.assign(grid_.size(), 0.0);
        const int nw = static_cast<int>(series.counts.size());
        cos_cache_.resize(static_cast<std::size_t>(nw));
        times_.resize(static_cast<std::size_t>(nw));
        for (int k = 1; k <= nw; ++k) {
            const double t = (k - 0.5) * series.params.ts_seconds;
            times_[static_cast<std::size_t>(k - 1)] = t;
            for (int i = 1; i <= 5; ++i)
                cos_cache_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - 1)] =
                    reduced_cos(series.params.omega(i), t);
        }
    }

    /// Fold window m (1-based) into the grid sums.
    void advance(int m) {
        const std::size_t w = static_cast<std::size_t>(m - 1);
        const std::int64_t count = series_.counts[w];
        const double t = times_[w];
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double p = probability(w, reduced_cos(grid_[i], t));
            sums_[i] += window_log_term(count, series_.params.ns, p);
        }
    }

    Estimate best(int m) const {
        double max_sum = kNegInf;
        double min_sum = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        bool tied = false;
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            if (sums_[i] > max_sum) {
                max_sum = sums_[i];
                best_i = i;
                tied = false;
            } else if (sums_[i] == max_sum && max_sum != kNegInf) {
                tied = true;
            }
            min_sum = std::min(min_sum, sums_[i]);
        }
        if (max_sum == min_sum || max_sum == kNegInf)
            return {0.5 * (bounds_.lo + bounds_.hi), true, false};
        return {refine(m, best_i, max_sum), false, tied};
    }

    /// Log-likelihood over the first m windows, binomial-coefficient terms
    /// omitted (candidate-independent).
    double partial_loglik(int m, double candidate) const {
        double sum = 0.0;
        for (int k = 1; k <= m; ++k) {
            const std::size_t w = static_cast<std::size_t>(k - 1);
            const double p = probability(w, reduced_cos(candidate, times_[w]));
            sum += window_log_term(series_.counts[w], series_.params.ns, p);
        }
        return sum;
    }

private:
    /// Model probability at cached window w with x substituted for the
    /// target frequency's cosine.
    double probability(std::size_t w, double x) const {
        const auto& c = cos_cache_[w];
        const double e = series_.params.epsilon;
        auto at = [&](int i) {
            return i == target_ ? x : c[static_cast<std::size_t>(i - 1)];
        };
        double p = 0.0;
        switch (series_.model.family) {
            case ModelKind::Family::Unconditioned: {
                double mod = -at(2) + at(3) + at(4);
                if (series_.params.eta_present) mod += 2.0 * at(1);
                p = (1.0 + 2.0 * e * mod) / 18.0;
                break;
            }
            case ModelKind::Family::LocalizedL1: {
                const double s = 2.0 * at(1) + at(3) + at(4);
                p = e * e / 12.0 * s * s;
                if (series_.params.third_order)
                    p += e * e * e / 12.0 * s * s * (at(3) - at(4) + 2.0 * at(5));
                break;
            }
            case ModelKind::Family::LocalizedL4: {
                p = (1.0 + 2.0 * e * (at(1) + at(4) - at(5))) / 6.0;
                break;
            }
            default:
                throw std::invalid_argument("likelihood requires a timed model kind");
        }
        return std::clamp(p, 0.0, 1.0);
    }

    /// Ternary refinement around the winning grid point, clipped to the
    /// bounds; returns the best candidate seen.
    double refine(int m, std::size_t best_i, double grid_best_value) const {
        double lo = std::max(bounds_.lo, grid_[best_i] - kGridStep);
        double hi = std::min(bounds_.hi, grid_[best_i] + kGridStep);
        double best_x = grid_[best_i];
        double best_v = grid_best_value;
        auto consider = [&](double x) {
            const double v = partial_loglik(m, x);
            if (v > best_v || (v == best_v && x < best_x)) {
                best_v = v;
                best_x = x;
            }
            return v;
        };
        while (hi - lo > kRefineTol) {
            const double x1 = lo + (hi - lo) / 3.0;
            const double x2 = hi - (hi - lo) / 3.0;
            if (consider(x1) < consider(x2))
                lo = x1;
            else
                hi = x2;
        }
        return best_x;
    }

    const DetectionSeries& series_;
    int target_;
    FrequencyBounds bounds_;
    std::vector<double> grid_;
    std::vector<double> sums_;
    std::vector<std::array<double, 5>> cos_cache_;
    std::vector<double> times_;
};

}  // namespace

double log_likelihood_probs(std::span<const std::int64_t> counts, std::int64_t ns,
                            std::span<const double> probs) {
    if (counts.size() != probs.size())
        throw std::invalid_argument("counts and probs must have equal length");
    double sum = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double term = window_log_term(counts[i], ns, probs[i]);
        if (term == kNegInf) return kNegInf;
        sum += term + std::lgamma(static_cast<double>(ns) + 1.0) -
               std::lgamma(static_cast<double>(counts[i]) + 1.0) -
               std::lgamma(static_cast<double>(ns - counts[i]) + 1.0);
    }
    return sum;
}

double log_likelihood(const DetectionSeries& series, int m, double candidate, int target) {
    if (m < 1 || m > static_cast<int>(series.counts.size()))
        throw std::out_of_range("prefix length m out of range");
    if (!(candidate > 0.0)) throw std::invalid_argument("candidate frequency must be positive");
    ExperimentParams params = series.params;
    params.omegas[static_cast<std::size_t>(target - 1)] = candidate;
    std::vector<double> probs(static_cast<std::size_t>(m));
    for (int k = 1; k <= m; ++k)
        probs[static_cast<std::size_t>(k - 1)] = p_window(params, k, series.model);
    return log_likelihood_probs(std::span(series.counts).first(static_cast<std::size_t>(m)),
                                series.params.ns, probs);
}

Estimate estimate_omega(const DetectionSeries& series, int m, int target, FrequencyBounds bounds) {
    if (m < 1 || m > static_cast<int>(series.counts.size()))
        throw std::out_of_range("prefix length m out of range");
    LikelihoodScanner scanner(series, target, bounds);
    for (int k = 1; k <= m; ++k) scanner.advance(k);
    return scanner.best(m);
}

EstimationTrace estimation_trace(const DetectionSeries& series, int target,
                                 FrequencyBounds bounds) {
    const int nw = static_cast<int>(series.counts.size());
    EstimationTrace trace;
    trace.target = target;
    trace.bounds = bounds;
    trace.estimates.reserve(static_cast<std::size_t>(nw));
    trace.deviations.reserve(static_cast<std::size_t>(nw));
    trace.n_post.reserve(static_cast<std::size_t>(nw));
    trace.degenerate.reserve(static_cast<std::size_t>(nw));
    LikelihoodScanner scanner(series, target, bounds);
    const double truth = series.params.omega(target);
    std::int64_t cumulative = 0;
    for (int m = 1; m <= nw; ++m) {
        scanner.advance(m);
        const Estimate est = scanner.best(m);
        cumulative += series.counts[static_cast<std::size_t>(m - 1)];
        trace.estimates.push_back(est.omega);
        trace.deviations.push_back(std::fabs(est.omega - truth));
        trace.n_post.push_back(cumulative);
        trace.degenerate.push_back(est.degenerate);
    }
    return trace;
}

std::optional<int> convergence_step(const EstimationTrace& trace, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    return sustained_crossing(trace.deviations, tol);
}

std::int64_t n_post(const DetectionSeries& series, int m) {
    if (m < 0 || m > static_cast<int>(series.counts.size()))
        throw std::out_of_range("prefix length m out of range");
    std::int64_t sum = 0;
    for (int k = 0; k < m; ++k) sum += series.counts[static_cast<std::size_t>(k)];
    return sum;
}

EnsembleStats ensemble_stats(const ExperimentParams& params, const ModelKind& model, int target,
                             int runs, std::uint64_t base_seed, FrequencyBounds bounds, double tol,
                             int threads) {
    if (runs < 1) throw std::invalid_argument("runs must be at least 1");
    params.validate();
    const std::size_t nw = static_cast<std::size_t>(params.n_windows);
    std::vector<std::vector<double>> deviations(static_cast<std::size_t>(runs));
    std::vector<std::vector<std::int64_t>> posts(static_cast<std::size_t>(runs));
    std::vector<int> conv(static_cast<std::size_t>(runs), -1);

    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, runs);
    std::atomic<int> next_run{0};
    auto worker = [&]() {
        while (true) {
            const int r = next_run.fetch_add(1);
            if (r >= runs) break;
            const DetectionSeries series =
                sample_counts(params, model, base_seed, static_cast<std::uint32_t>(r));
            EstimationTrace trace = estimation_trace(series, target, bounds);
            conv[static_cast<std::size_t>(r)] = convergence_step(trace, tol).value_or(-1);
            deviations[static_cast<std::size_t>(r)] = std::move(trace.deviations);
            posts[static_cast<std::size_t>(r)] = std::move(trace.n_post);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads - 1));
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    EnsembleStats stats;
    stats.runs = runs;
    stats.target = target;
    stats.mean_deviation.assign(nw, 0.0);
    stats.mean_n_post.assign(nw, 0.0);
    stats.run_convergence = std::move(conv);
    for (int r = 0; r < runs; ++r) {
        for (std::size_t m = 0; m < nw; ++m) {
            stats.mean_deviation[m] += deviations[static_cast<std::size_t>(r)][m];
            stats.mean_n_post[m] += static_cast<double>(posts[static_cast<std::size_t>(r)][m]);
        }
    }
    for (std::size_t m = 0; m < nw; ++m) {
        stats.mean_deviation[m] /= runs;
        stats.mean_n_post[m] /= runs;
    }
    return stats;
}

std::optional<int> sustained_crossing(std::span<const double> curve, double tol) {
    int last_above = 0;  // 1-based index of the last entry above tol
    for (std::size_t i = 0; i < curve.size(); ++i)
        if (curve[i] > tol) last_above = static_cast<int>(i) + 1;
    if (last_above == static_cast<int>(curve.size())) return std::nullopt;
    return last_above + 1;
}

std::optional<double> median_convergence(std::span<const int> run_convergence) {
    std::vector<double> values;
    values.reserve(run_convergence.size());
    for (int c : run_convergence)
        values.push_back(c < 0 ? std::numeric_limits<double>::infinity()
                               : static_cast<double>(c));
    std::sort(values.begin(), values.end());
    if (values.empty()) return std::nullopt;
    const std::size_t n = values.size();
    const double median = n % 2 == 1 ? values[n / 2]
                                     : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    if (!std::isfinite(median)) return std::nullopt;
    return median;
}

}  // namespace sixport
