#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sixport/probability.hpp"

using namespace sixport;

namespace {

ExperimentParams defaults() { return {}; }

}  // namespace

TEST_CASE("plain detection law at reference points") {
    ExperimentParams p = defaults();

    SUBCASE("epsilon 0 gives the bare 1/18 at any time") {
        p.epsilon = 0.0;
        for (double t : {0.0, 0.123, 7.7}) CHECK(p_detect_plain(p, t) == doctest::Approx(1.0 / 18.0).epsilon(1e-14));
    }
    SUBCASE("t = 0 with eta") {
        CHECK(p_detect_plain(p, 0.0) == doctest::Approx(1.06 / 18.0).epsilon(1e-12));
    }
    SUBCASE("t = 0 without eta drops the doubled omega1 term") {
        p.eta_present = false;
        CHECK(p_detect_plain(p, 0.0) == doctest::Approx(1.02 / 18.0).epsilon(1e-12));
    }
}

TEST_CASE("conditioned-on-L1 law") {
    ExperimentParams p = defaults();

    SUBCASE("epsilon 0 vanishes") {
        p.epsilon = 0.0;
        for (double t : {0.0, 0.2, 3.0}) CHECK(p_detect_given_l1(p, t) == 0.0);
    }
    SUBCASE("t = 0 leading order") {
        CHECK(p_detect_given_l1(p, 0.0) ==
              doctest::Approx(4.0 * p.epsilon * p.epsilon / 3.0).epsilon(1e-12));
    }
    SUBCASE("t = 0 with the next-order term") {
        p.third_order = true;
        const double expected = 4.0 * p.epsilon * p.epsilon / 3.0 * (1.0 + 2.0 * p.epsilon);
        CHECK(p_detect_given_l1(p, 0.0) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("conditioned-on-L4 law") {
    ExperimentParams p = defaults();

    SUBCASE("epsilon 0 gives 1/6") {
        p.epsilon = 0.0;
        CHECK(p_detect_given_l4(p, 0.5) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    }
    SUBCASE("t = 0") {
        CHECK(p_detect_given_l4(p, 0.0) == doctest::Approx(0.17).epsilon(1e-12));
    }
    SUBCASE("modulation cancels where cos w1 t + cos w4 t = cos w5 t") {
        // bisect for the cancellation point
        auto f = [&](double t) {
            return std::cos(p.omega(1) * t) + std::cos(p.omega(4) * t) - std::cos(p.omega(5) * t);
        };
        double lo = 0.0, hi = 0.02;
        REQUIRE(f(lo) > 0.0);
        REQUIRE(f(hi) < 0.0);
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) > 0.0 ? lo : hi) = mid;
        }
        CHECK(p_detect_given_l4(p, 0.5 * (lo + hi)) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    }
}

TEST_CASE("p_window evaluates the model at the window midpoint, bit for bit") {
    ExperimentParams p = defaults();
    SUBCASE("epsilon 0, k = 1") {
        p.epsilon = 0.0;
        CHECK(p_window(p, 1, ModelKind::unconditioned()) == 1.0 / 18.0);
    }
    SUBCASE("identical to the law at t = (k - 1/2) T_s") {
        for (int k : {1, 2, 100, 500}) {
            const double t = (k - 0.5) * p.ts_seconds;
            CHECK(p_window(p, k, ModelKind::unconditioned()) == p_detect_plain(p, t));
            CHECK(p_window(p, k, ModelKind::localized_l1()) == p_detect_given_l1(p, t));
            CHECK(p_window(p, k, ModelKind::localized_l4()) == p_detect_given_l4(p, t));
        }
    }
    SUBCASE("out-of-range k rejected") {
        CHECK_THROWS_AS(p_window(p, 0, ModelKind::unconditioned()), std::out_of_range);
        CHECK_THROWS_AS(p_window(p, 501, ModelKind::unconditioned()), std::out_of_range);
    }
    SUBCASE("simplified kinds rejected") {
        CHECK_THROWS_AS(p_window(p, 1, ModelKind::simplified_plain(Location::L1)),
                        std::invalid_argument);
    }
}

TEST_CASE("two-window simplified probabilities") {
    const double e = 0.01;
    SUBCASE("plain L1 with eta") {
        const auto pr = simplified_probs(e, ModelKind::simplified_plain(Location::L1, true));
        CHECK(pr.disturbed == doctest::Approx(0.057778).epsilon(1e-4));
        CHECK(pr.quiet == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
        CHECK_FALSE(pr.scale_free);
    }
    SUBCASE("plain L5 is insensitive") {
        const auto pr = simplified_probs(e, ModelKind::simplified_plain(Location::L5, true));
        CHECK(pr.disturbed == pr.quiet);
        CHECK(pr.quiet == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
    }
    SUBCASE("localized L1 with eta") {
        const auto pr = simplified_probs(e, ModelKind::simplified_localized(Location::L1, true));
        CHECK(pr.disturbed == doctest::Approx(e * e / 3.0).epsilon(1e-12));
        CHECK(pr.quiet == 0.0);
    }
    SUBCASE("localized L1 without eta: delta forms") {
        const auto limit = simplified_probs(e, ModelKind::simplified_localized(Location::L1, false));
        CHECK(limit.scale_free);
        CHECK(limit.disturbed == doctest::Approx((1.0 - 2.0 * e) / 3.0));
        CHECK(limit.quiet == doctest::Approx(1.0 / 3.0));
        const auto scaled =
            simplified_probs(e, ModelKind::simplified_localized(Location::L1, false, 1e-3));
        CHECK_FALSE(scaled.scale_free);
        CHECK(scaled.disturbed == doctest::Approx(1e-3 * (1.0 - 2.0 * e) / 3.0));
        CHECK(scaled.quiet == doctest::Approx(1e-3 / 3.0));
        // only the ratio is shared between the two forms
        CHECK(scaled.disturbed / (scaled.disturbed + scaled.quiet) ==
              doctest::Approx(limit.disturbed / (limit.disturbed + limit.quiet)).epsilon(1e-14));
    }
    SUBCASE("eta removal flips the localized L4 response") {
        const auto with = simplified_probs(e, ModelKind::simplified_localized(Location::L4, true));
        const auto without =
            simplified_probs(e, ModelKind::simplified_localized(Location::L4, false));
        CHECK(with.disturbed == doctest::Approx((1.0 + 2.0 * e) / 6.0));
        CHECK(without.disturbed == doctest::Approx((1.0 - 2.0 * e) / 6.0));
    }
    SUBCASE("disturbance off makes the windows indistinguishable") {
        for (int i = 1; i <= 5; ++i) {
            const auto site = static_cast<Location>(i);
            for (bool eta : {true, false}) {
                const auto plain = simplified_probs(0.0, ModelKind::simplified_plain(site, eta));
                CHECK(plain.disturbed == plain.quiet);
                const auto loc =
                    simplified_probs(0.0, ModelKind::simplified_localized(site, eta, 1e-4));
                CHECK(loc.disturbed == loc.quiet);
            }
        }
    }
}

TEST_CASE("probabilities stay in [0,1] over a dense grid") {
    for (double eps : {0.01, 0.05, 0.1}) {
        ExperimentParams p = defaults();
        p.epsilon = eps;
        for (int i = 0; i < 10000; ++i) {
            const double t = 1e-4 * i;
            for (double v : {p_detect_plain(p, t), p_detect_given_l1(p, t),
                             p_detect_given_l4(p, t)}) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
    }
}

TEST_CASE("time average of the plain law over the common period is 1/18") {
    // omegas share gcd 10 1/s, so the common period is 2 pi / 10; uniform
    // sampling over one exact period kills every oscillating term.
    ExperimentParams p = defaults();
    const double period = 2.0 * std::numbers::pi / 10.0;
    const int n = 1 << 14;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += p_detect_plain(p, period * i / n);
    CHECK(sum / n == doctest::Approx(1.0 / 18.0).epsilon(1e-12));
}

TEST_CASE("clamping fires a diagnostic only outside the expansion regime") {
    reset_clamp_diagnostics();
    ExperimentParams p = defaults();
    CHECK(p_detect_plain(p, 0.0) > 0.0);
    CHECK(clamp_diagnostic_count() == 0);
    // At omega1*t = pi the L4 modulation is near -1.23, so epsilon = 0.9
    // drives the first-order law negative.
    p.epsilon = 0.9;
    const double t = std::numbers::pi / p.omega(1);
    CHECK(p_detect_given_l4(p, t) == 0.0);
    CHECK(clamp_diagnostic_count() > 0);
    reset_clamp_diagnostics();
}

TEST_CASE("parameter validation names bad fields") {
    ExperimentParams p = defaults();
    p.epsilon = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = defaults();
    p.omegas[1] = p.omegas[0];
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = defaults();
    p.n_windows = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = defaults();
    p.ts_seconds = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
