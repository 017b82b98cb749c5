#include "sixport/info_measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

namespace sixport {

namespace {

// Relative truncation of the binomial tail sum; terms below this leave the
// double-precision result unchanged.
constexpr double kTailCutoff = 1e-18;

// Largest N the minimality search will visit. Reaching it means the two
// windows are practically indistinguishable at the given threshold.
constexpr std::int64_t kSearchCap = 1LL << 28;

double log_term_at(std::int64_t n, std::int64_t k, double log_qhi, double log_qlo) {
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0) +
           static_cast<double>(k) * log_qhi + static_cast<double>(n - k) * log_qlo;
}

}  // namespace

void TwoWindowSetup::validate() const {
    if (!(p_disturbed >= 0.0) || !(p_quiet >= 0.0))
        throw std::invalid_argument("two-window probabilities must be non-negative");
    if (p_disturbed + p_quiet <= 0.0)
        throw std::invalid_argument("two-window probabilities must not both be zero");
    if (!(threshold > 0.0) || !(threshold < 0.5))
        throw std::invalid_argument("error threshold must lie in (0, 0.5)");
}

double prob_error(const TwoWindowSetup& setup, std::int64_t n) {
    setup.validate();
    if (n < 1) throw std::invalid_argument("prob_error requires at least one photon");
    const double hi = std::max(setup.p_disturbed, setup.p_quiet);
    const double lo = std::min(setup.p_disturbed, setup.p_quiet);
    const double q_hi = hi / (hi + lo);  // only the ratio enters
    const double q_lo = lo / (hi + lo);
    if (q_lo == 0.0) return 0.0;  // every photon lands in the likelier window

    const double log_qhi = std::log(q_hi);
    const double log_qlo = std::log(q_lo);
    const std::int64_t k_max = n / 2;
    // Terms shrink monotonically from k_max downward; stream until they
    // stop mattering.
    const double log_top = log_term_at(n, k_max, log_qhi, log_qlo);
    const double log_ratio_step = log_qlo - log_qhi;  // plus the k/(n-k+1) factor below
    double rel = 1.0;  // term / top
    double sum = 1.0;
    double log_rel = 0.0;
    for (std::int64_t k = k_max; k > 0; --k) {
        log_rel += std::log(static_cast<double>(k) / static_cast<double>(n - k + 1)) +
                   log_ratio_step;
        rel = std::exp(log_rel);
        sum += rel;
        if (rel < kTailCutoff * sum) break;
    }
    double error = std::exp(log_top + std::log(sum));
    if (setup.half_credit_ties && n % 2 == 0) error -= 0.5 * std::exp(log_top);
    return std::min(error, 1.0);
}

std::optional<std::int64_t> n_min(const TwoWindowSetup& setup) {
    setup.validate();
    if (setup.p_disturbed == setup.p_quiet) return std::nullopt;
    auto passes = [&](std::int64_t n) { return prob_error(setup, n) <= setup.threshold; };

    std::int64_t hi = 1;
    while (!passes(hi)) {
        if (hi >= kSearchCap) return std::nullopt;
        hi *= 2;
    }
    // Bisection keeps (lo fails, hi passes). The predicate zigzags with
    // parity (even N admits ties), so this lands on a local boundary only.
    std::int64_t lo = hi / 2;
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (passes(mid))
            hi = mid;
        else
            lo = mid;
    }
    // Walk down across both parities. The tail probability is monotone
    // within each parity class, so two consecutive failures prove
    // minimality.
    while (hi > 1) {
        if (passes(hi - 1))
            hi -= 1;
        else if (hi > 2 && passes(hi - 2))
            hi -= 2;
        else
            break;
    }
    return hi;
}

double information(const TwoWindowSetup& setup) {
    const auto n = n_min(setup);
    return n ? 1.0 / static_cast<double>(*n) : 0.0;
}

PresenceMeasure presence_measure(double i_plain, double i_localized) {
    if (i_localized < 0.0) throw std::invalid_argument("localized information must be >= 0");
    if (i_plain == 0.0) return {0.0, false};
    if (i_localized == 0.0) return {0.0, true};
    return {i_plain / i_localized, false};
}

InfoTable build_table1(double epsilon, double threshold) {
    InfoTable table;
    table.epsilon = epsilon;
    table.threshold = threshold;
    for (int i = 0; i < 5; ++i) {
        const auto site = static_cast<Location>(i + 1);
        const std::size_t idx = static_cast<std::size_t>(i);
        auto info_of = [&](const ModelKind& model) {
            const TwoWindowProbs pr = simplified_probs(epsilon, model);
            if (pr.disturbed + pr.quiet <= 0.0) {  // degenerate at epsilon = 0
                table.localized_degenerate[idx] = true;
                return 0.0;
            }
            TwoWindowSetup setup{pr.disturbed, pr.quiet, threshold};
            return information(setup);
        };
        table.info_plain[idx] = info_of(ModelKind::simplified_plain(site, true));
        table.info_localized[idx] = info_of(ModelKind::simplified_localized(site, true));
        table.info_plain_noeta[idx] = info_of(ModelKind::simplified_plain(site, false));
        // The delta -> 0 limit enters as a scale-free ratio pair; the
        // overall factor drops out of the error probability.
        table.info_localized_noeta[idx] = info_of(ModelKind::simplified_localized(site, false));
        const PresenceMeasure m = presence_measure(table.info_plain[idx], table.info_localized[idx]);
        const PresenceMeasure mp =
            presence_measure(table.info_plain_noeta[idx], table.info_localized_noeta[idx]);
        table.presence[idx] = m.value;
        table.presence_undefined[idx] = m.undefined;
        table.presence_noeta[idx] = mp.value;
        table.presence_noeta_undefined[idx] = mp.undefined;
    }
    return table;
}

namespace {

std::string sig3(double v) {
    if (v == 0.0) return "0";
    if (v == 1.0) return "1";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

std::string full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

const char* kRowLabels[6] = {"I[plain]",      "I[localized]",      "M",
                             "I[plain,eta-]", "I[localized,eta-]", "M[eta-]"};

std::array<const std::array<double, 5>*, 6> rows_of(const InfoTable& t) {
    return {&t.info_plain,       &t.info_localized,       &t.presence,
            &t.info_plain_noeta, &t.info_localized_noeta, &t.presence_noeta};
}

}  // namespace

std::string render_info_table_text(const InfoTable& table) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "Information and presence, epsilon=%g, threshold=%g\n",
                  table.epsilon, table.threshold);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-18s %10s %10s %10s %10s %10s\n", "", "L1", "L2", "L3",
                  "L4", "L5");
    out += buf;
    const auto rows = rows_of(table);
    for (int r = 0; r < 6; ++r) {
        std::snprintf(buf, sizeof(buf), "%-18s", kRowLabels[r]);
        out += buf;
        for (int c = 0; c < 5; ++c) {
            std::snprintf(buf, sizeof(buf), " %10s",
                          sig3((*rows[static_cast<std::size_t>(r)])[static_cast<std::size_t>(c)])
                              .c_str());
            out += buf;
        }
        out += '\n';
    }
    return out;
}

std::string render_info_table_csv(const InfoTable& table) {
    std::string out = "row,L1,L2,L3,L4,L5\n";
    const auto rows = rows_of(table);
    for (int r = 0; r < 6; ++r) {
        out += kRowLabels[r];
        for (int c = 0; c < 5; ++c)
            out += "," + full((*rows[static_cast<std::size_t>(r)])[static_cast<std::size_t>(c)]);
        out += '\n';
    }
    return out;
}

std::string render_info_table_json(const InfoTable& table) {
    nlohmann::ordered_json j;
    j["epsilon"] = table.epsilon;
    j["threshold"] = table.threshold;
    const auto rows = rows_of(table);
    for (int r = 0; r < 6; ++r)
        j["rows"][kRowLabels[r]] = *rows[static_cast<std::size_t>(r)];
    j["presence_undefined"] = table.presence_undefined;
    j["presence_noeta_undefined"] = table.presence_noeta_undefined;
    return j.dump(2) + "\n";
}

}  // namespace sixport
