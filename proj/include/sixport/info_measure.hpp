#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "sixport/params.hpp"
#include "sixport/probability.hpp"

namespace sixport {

/// The two-window inference game: a disturbance sits in one of two windows,
/// N postselected photons are split between them, majority vote picks the
/// window. P and p are the postselection probabilities with and without the
/// disturbance (order does not matter; only the ratio enters).
struct TwoWindowSetup {
    double p_disturbed = 0.0;
    double p_quiet = 0.0;
    double threshold = 0.01;   ///< error-probability bound, in (0, 0.5)

    /// Half-credit tie convention instead of ties-as-errors. Off by
    /// default: the literal floor(N/2) summation bound counts ties as
    /// failures.
    bool half_credit_ties = false;

    void validate() const;     // requires P + p > 0 and a sane threshold
};

/// Probability that majority vote over N photons picks the wrong window:
/// sum_{k=0}^{floor(N/2)} C(N,k) q^k (1-q)^{N-k} with q = max(P,p)/(P+p),
/// accumulated in log space. Ties (k = N/2, even N) count as errors unless
/// half_credit_ties is set. N must be >= 1.
double prob_error(const TwoWindowSetup& setup, std::int64_t n);

/// Smallest N with prob_error(N) <= threshold. The search brackets
/// exponentially, bisects each parity class separately (binomial tails
/// zigzag across parity), then walks down until both N-1 and N-2 fail,
/// guaranteeing minimality. nullopt when no N qualifies (P == p).
std::optional<std::int64_t> n_min(const TwoWindowSetup& setup);

/// Information per postselected photon: 1/N_min, or 0 when no N_min exists.
double information(const TwoWindowSetup& setup);

/// Ratio of information in the plain experiment to information carried by
/// a photon localized at the probed site.
struct PresenceMeasure {
    double value = 0.0;
    bool undefined = false;   ///< i_localized == 0 with i_plain > 0
};

PresenceMeasure presence_measure(double i_plain, double i_localized);

/// The six-row information/presence table over L1..L5: plain and localized
/// information, presence measure, and the same three with eta removed.
struct InfoTable {
    double epsilon = 0.01;
    double threshold = 0.01;
    std::array<double, 5> info_plain{};
    std::array<double, 5> info_localized{};
    std::array<double, 5> presence{};
    std::array<double, 5> info_plain_noeta{};
    std::array<double, 5> info_localized_noeta{};
    std::array<double, 5> presence_noeta{};
    std::array<bool, 5> presence_undefined{};
    std::array<bool, 5> presence_noeta_undefined{};
    /// Localized pair collapsed to (0,0), e.g. L1 at epsilon = 0; the
    /// corresponding information entry is reported as 0.
    std::array<bool, 5> localized_degenerate{};
};

/// Compose simplified_probs -> information -> presence_measure for every
/// location. The delta-dependent localized-no-eta column uses the analytic
/// delta->0 ratio form, so no explicit imbalance is needed.
InfoTable build_table1(double epsilon = 0.01, double threshold = 0.01);

/// Renderings: fixed-layout text (3 significant figures), CSV, and
/// full-precision JSON.
std::string render_info_table_text(const InfoTable& table);
std::string render_info_table_csv(const InfoTable& table);
std::string render_info_table_json(const InfoTable& table);

}  // namespace sixport
